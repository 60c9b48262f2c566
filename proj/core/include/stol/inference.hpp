#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "stol/chain_model.hpp"

namespace stol {

// Normalized Hamming loss: fraction of positions where the sequences differ.
double hamming_loss(std::span<const Label> y, std::span<const Label> ybar);

struct Decoded {
  Labels labels;
  // Score of `labels` (plus the loss term when loss-augmented).
  double value = 0.0;
};

// Exact argmax of the linear chain score by Viterbi, O(T K^2).
//
// Ties are broken toward the smaller label at every backtracking step, which
// selects the optimal sequence that is smallest when compared from the last
// position backwards.
Decoded decode(std::span<const double> weights, const ChainFeatureMap& map,
               std::span<const Vector> x);

// Separation oracle: argmax over y~ of hamming_loss(y_true, y~) + f^T(x, y~).
// The loss decomposes per position, so it is folded into the emission
// potentials as +1/T for every label differing from y_true.
Decoded loss_augmented_decode(const TransferScorer& ts, std::span<const Vector> x,
                              std::span<const Label> y_true);

// Same, for a bare weight vector (theta + w already combined).
Decoded loss_augmented_decode(std::span<const double> weights, const ChainFeatureMap& map,
                              std::span<const Vector> x, std::span<const Label> y_true);

inline constexpr std::size_t kBruteForceLimit = 1'000'000;

// Exhaustive search over all K^T sequences with the same tie-break and the
// same floating-point accumulation order as the Viterbi decoders, so results
// are comparable exactly. Rejects spaces larger than kBruteForceLimit.
Decoded brute_force_argmax(const ChainFeatureMap& map, std::span<const double> weights,
                           std::span<const Vector> x,
                           std::optional<std::span<const Label>> y_true = std::nullopt);

}  // namespace stol
