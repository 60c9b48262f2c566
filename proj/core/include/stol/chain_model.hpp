#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "stol/linalg.hpp"

namespace stol {

using Label = int;
using Labels = std::vector<Label>;
// T input vectors, each of dimension d.
using Sequence = std::vector<Vector>;

struct Sample {
  Sequence x;
  std::optional<Labels> y;

  std::size_t length() const { return x.size(); }
  bool labeled() const { return y.has_value(); }

  friend bool operator==(const Sample&, const Sample&) = default;
};

enum class DomainTag { source, target };

std::string_view to_string(DomainTag tag);
DomainTag domain_from_string(std::string_view name);

struct Dataset {
  std::vector<Sample> samples;
  std::size_t d = 0;
  std::size_t K = 0;
  DomainTag domain = DomainTag::source;

  std::size_t size() const { return samples.size(); }
  std::size_t labeled_count() const;
  // True when every labeled sample precedes every unlabeled one.
  bool labeled_prefix() const;
  // Throws stol::Error naming the first offending sample.
  void validate() const;
};

// Joint feature map of a first-order linear chain.
//
// Layout (m = d*K + K*K):
//   [0, d*K)        emission block, label-major: entry k*d + j sums x_t[j]
//                   over positions with y_t = k
//   [d*K, m)        transition block, row-major: entry d*K + p*K + q counts
//                   adjacent pairs (y_{t-1}, y_t) = (p, q)
class ChainFeatureMap {
 public:
  ChainFeatureMap(std::size_t d, std::size_t K);

  std::size_t d() const { return d_; }
  std::size_t K() const { return K_; }
  std::size_t dim() const { return d_ * K_ + K_ * K_; }

  std::size_t emission_index(std::size_t label, std::size_t j) const { return label * d_ + j; }
  std::size_t transition_index(std::size_t prev, std::size_t next) const {
    return d_ * K_ + prev * K_ + next;
  }

  // Throws if x is empty or any x_t has the wrong dimension.
  void check_input(std::span<const Vector> x) const;
  // check_input plus label length and range.
  void check(std::span<const Vector> x, std::span<const Label> y) const;

  friend bool operator==(const ChainFeatureMap&, const ChainFeatureMap&) = default;

 private:
  std::size_t d_;
  std::size_t K_;
};

Vector joint_features(const ChainFeatureMap& map, std::span<const Vector> x,
                      std::span<const Label> y);

struct LinearScorer {
  ChainFeatureMap map;
  Vector theta;

  LinearScorer(ChainFeatureMap map, Vector theta);
  static LinearScorer zero(const ChainFeatureMap& map);
};

// f^T(x, y) = f^S(x, y) + w . Psi(x, y), with the source weights frozen.
struct TransferScorer {
  LinearScorer source;
  Vector w;

  TransferScorer(LinearScorer source, Vector w);

  const ChainFeatureMap& map() const { return source.map; }
  // theta + w; decoding under f^T is decoding under these weights.
  Vector combined_weights() const;
};

double score(const LinearScorer& scorer, std::span<const Vector> x, std::span<const Label> y);
double transfer_score(const TransferScorer& ts, std::span<const Vector> x,
                      std::span<const Label> y);

}  // namespace stol
