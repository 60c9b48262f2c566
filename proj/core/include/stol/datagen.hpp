#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "stol/chain_model.hpp"
#include "stol/linalg.hpp"

namespace stol {

// x -> R x + b
struct AffineMap {
  Matrix R;
  Vector b;

  static AffineMap identity(std::size_t d);
  Vector apply(std::span<const double> x) const;
};

// Generative process of one domain: a first-order Markov label chain with
// Gaussian emissions around per-label means, pushed through an affine map.
struct DomainParams {
  std::size_t d = 0;
  std::size_t K = 0;
  Vector label_prior;
  Matrix transition;  // K x K, row-stochastic
  std::vector<Vector> means;
  double noise_sigma = 0.0;
  AffineMap emission_transform;
  std::size_t t_min = 1;
  std::size_t t_max = 1;

  // d = 2, K = 3, uniform prior, self-transition 0.7, means on the unit circle
  // at angles 2 pi k / 3, sigma 0.3, identity transform, T in [4, 8].
  static DomainParams defaults();
  void validate() const;
};

inline constexpr double kDefaultShiftDegrees = 60.0;
inline constexpr double kDefaultShiftTranslation[2] = {0.5, -0.25};

// Draws n samples. Each sample i uses two engines seeded from (seed, i): one
// for its length and labels, one for the emission noise, so changing sigma
// never changes labels or lengths. Same arguments give the same dataset.
Dataset generate(const DomainParams& params, std::size_t n, std::uint64_t seed,
                 DomainTag tag = DomainTag::source);

// Composes the emission transform with x -> Q x + translation. Label
// dynamics are untouched. Q must be orthogonal to within 1e-8.
DomainParams shift(const DomainParams& params, const Matrix& orthogonal,
                   std::span<const double> translation);
// Planar rotation by `rotation_degrees` counter-clockwise; requires d = 2.
DomainParams shift(const DomainParams& params, double rotation_degrees,
                   std::span<const double> translation);

Matrix rotation_2d(double degrees);

struct MaskedDataset {
  // Labeled samples first (original relative order), then the rest with y
  // removed.
  Dataset data;
  // Same samples in the same order with every label present. Evaluation only.
  Dataset truth;
};

// Keeps labels on a seeded uniform choice of l samples of a fully labeled
// dataset.
MaskedDataset mask_labels(const Dataset& ds, std::size_t l, std::uint64_t seed);

// Independent stream seed derived from a base seed and a stream id.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace stol
