#include "stol/inference.hpp"

#include <string>

#include "stol/error.hpp"

namespace stol {

double hamming_loss(std::span<const Label> y, std::span<const Label> ybar) {
  require(!y.empty(), "hamming_loss: empty sequence");
  if (y.size() != ybar.size())
    throw Error("hamming_loss: length mismatch (" + std::to_string(y.size()) + " vs " +
                std::to_string(ybar.size()) + ")");
  std::size_t mismatches = 0;
  for (std::size_t t = 0; t < y.size(); ++t) mismatches += (y[t] != ybar[t]) ? 1 : 0;
  return static_cast<double>(mismatches) / static_cast<double>(y.size());
}

namespace {

// potentials(t, k): emission score of label k at position t, plus 1/T when
// loss-augmented and k != y_true[t].
Matrix emission_potentials(std::span<const double> weights, const ChainFeatureMap& map,
                           std::span<const Vector> x, const Label* y_true) {
  const std::size_t T = x.size();
  const double per_position = 1.0 / static_cast<double>(T);
  Matrix pot(T, map.K());
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < map.K(); ++k) {
      double e = 0.0;
      for (std::size_t j = 0; j < map.d(); ++j) e += weights[map.emission_index(k, j)] * x[t][j];
      if (y_true != nullptr && static_cast<Label>(k) != y_true[t]) e += per_position;
      pot(t, k) = e;
    }
  }
  return pot;
}

Decoded viterbi(std::span<const double> weights, const ChainFeatureMap& map,
                std::span<const Vector> x, const Label* y_true) {
  map.check_input(x);
  require(weights.size() == map.dim(), "decode: weight vector has length " +
                                           std::to_string(weights.size()) + ", expected m = " +
                                           std::to_string(map.dim()));
  const std::size_t T = x.size();
  const std::size_t K = map.K();
  const Matrix pot = emission_potentials(weights, map, x, y_true);

  Matrix delta(T, K);
  std::vector<std::size_t> back(T * K, 0);
  for (std::size_t k = 0; k < K; ++k) delta(0, k) = pot(0, k);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t q = 0; q < K; ++q) {
      std::size_t best_p = 0;
      double best = delta(t - 1, 0) + weights[map.transition_index(0, q)];
      for (std::size_t p = 1; p < K; ++p) {
        const double cand = delta(t - 1, p) + weights[map.transition_index(p, q)];
        if (cand > best) {
          best = cand;
          best_p = p;
        }
      }
      delta(t, q) = best + pot(t, q);
      back[t * K + q] = best_p;
    }
  }

  std::size_t last = 0;
  for (std::size_t k = 1; k < K; ++k)
    if (delta(T - 1, k) > delta(T - 1, last)) last = k;

  Decoded out;
  out.value = delta(T - 1, last);
  out.labels.assign(T, 0);
  out.labels[T - 1] = static_cast<Label>(last);
  for (std::size_t t = T - 1; t > 0; --t) {
    last = back[t * K + last];
    out.labels[t - 1] = static_cast<Label>(last);
  }
  return out;
}

// Reverse-lexicographic comparison: the later positions dominate.
bool reverse_lex_less(const Labels& a, const Labels& b) {
  for (std::size_t t = a.size(); t-- > 0;) {
    if (a[t] != b[t]) return a[t] < b[t];
  }
  return false;
}

}  // namespace

Decoded decode(std::span<const double> weights, const ChainFeatureMap& map,
               std::span<const Vector> x) {
  return viterbi(weights, map, x, nullptr);
}

Decoded loss_augmented_decode(std::span<const double> weights, const ChainFeatureMap& map,
                              std::span<const Vector> x, std::span<const Label> y_true) {
  map.check(x, y_true);
  return viterbi(weights, map, x, y_true.data());
}

Decoded loss_augmented_decode(const TransferScorer& ts, std::span<const Vector> x,
                              std::span<const Label> y_true) {
  const Vector weights = ts.combined_weights();
  return loss_augmented_decode(weights, ts.map(), x, y_true);
}

Decoded brute_force_argmax(const ChainFeatureMap& map, std::span<const double> weights,
                           std::span<const Vector> x,
                           std::optional<std::span<const Label>> y_true) {
  map.check_input(x);
  require(weights.size() == map.dim(), "brute_force_argmax: weight vector has wrong length");
  if (y_true) map.check(x, *y_true);
  const std::size_t T = x.size();
  const std::size_t K = map.K();

  std::size_t space = 1;
  for (std::size_t t = 0; t < T; ++t) {
    if (space > kBruteForceLimit / K)
      throw Error("brute_force_argmax: K^T exceeds " + std::to_string(kBruteForceLimit));
    space *= K;
  }

  const double per_position = 1.0 / static_cast<double>(T);
  auto potential = [&](std::size_t t, Label k) {
    double e = 0.0;
    for (std::size_t j = 0; j < map.d(); ++j)
      e += weights[map.emission_index(static_cast<std::size_t>(k), j)] * x[t][j];
    if (y_true && k != (*y_true)[t]) e += per_position;
    return e;
  };

  Decoded best;
  bool have_best = false;
  Labels labels(T, 0);
  for (std::size_t code = 0; code < space; ++code) {
    std::size_t rest = code;
    for (std::size_t t = 0; t < T; ++t) {
      labels[t] = static_cast<Label>(rest % K);
      rest /= K;
    }
    // Same association order as the Viterbi recursion: ((v + trans) + emit).
    double value = potential(0, labels[0]);
    for (std::size_t t = 1; t < T; ++t) {
      value = value + weights[map.transition_index(static_cast<std::size_t>(labels[t - 1]),
                                                   static_cast<std::size_t>(labels[t]))];
      value = value + potential(t, labels[t]);
    }
    if (!have_best || value > best.value ||
        (value == best.value && reverse_lex_less(labels, best.labels))) {
      best.value = value;
      best.labels = labels;
      have_best = true;
    }
  }
  return best;
}

}  // namespace stol
