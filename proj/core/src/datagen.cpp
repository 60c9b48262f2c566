#include "stol/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <boost/random/discrete_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "stol/error.hpp"

namespace stol {

AffineMap AffineMap::identity(std::size_t d) { return {Matrix::identity(d), Vector(d, 0.0)}; }

Vector AffineMap::apply(std::span<const double> x) const {
  Vector out = R.apply(x);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

DomainParams DomainParams::defaults() {
  DomainParams p;
  p.d = 2;
  p.K = 3;
  p.label_prior.assign(p.K, 1.0 / 3.0);
  p.transition = Matrix(p.K, p.K, 0.15);
  for (std::size_t k = 0; k < p.K; ++k) p.transition(k, k) = 0.7;
  for (std::size_t k = 0; k < p.K; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / 3.0;
    p.means.push_back({std::cos(angle), std::sin(angle)});
  }
  p.noise_sigma = 0.3;
  p.emission_transform = AffineMap::identity(p.d);
  p.t_min = 4;
  p.t_max = 8;
  return p;
}

namespace {

void check_distribution(std::span<const double> probs, const std::string& what) {
  double total = 0.0;
  for (double v : probs) {
    require(std::isfinite(v) && v >= 0.0, what + " has a negative or non-finite entry");
    total += v;
  }
  require(std::abs(total - 1.0) <= 1e-12, what + " does not sum to 1");
}

}  // namespace

void DomainParams::validate() const {
  require(d >= 1 && K >= 1, "domain params: d and K must be positive");
  require(label_prior.size() == K, "domain params: label_prior must have K entries");
  check_distribution(label_prior, "domain params: label_prior");
  require(transition.rows() == K && transition.cols() == K,
          "domain params: transition must be K x K");
  for (std::size_t k = 0; k < K; ++k)
    check_distribution(transition.row(k), "domain params: transition row " + std::to_string(k));
  require(means.size() == K, "domain params: need one mean per label");
  for (const auto& m : means) require(m.size() == d, "domain params: mean has wrong dimension");
  require(std::isfinite(noise_sigma) && noise_sigma > 0.0,
          "domain params: noise_sigma must be positive");
  require(emission_transform.R.rows() == d && emission_transform.R.cols() == d &&
              emission_transform.b.size() == d,
          "domain params: emission transform must be d x d with a d-vector offset");
  require(emission_transform.R.all_finite(), "domain params: emission transform not finite");
  require(t_min >= 1 && t_max >= t_min, "domain params: need 1 <= t_min <= t_max");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

namespace {

constexpr std::uint64_t kLabelStream = 0;
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kMaskStream = 2;

std::mt19937_64 sample_engine(std::uint64_t seed, std::size_t index, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace

Dataset generate(const DomainParams& params, std::size_t n, std::uint64_t seed, DomainTag tag) {
  params.validate();
  require(n >= 1, "generate: n must be at least 1");

  boost::random::discrete_distribution<int> prior(params.label_prior.begin(),
                                                  params.label_prior.end());
  std::vector<boost::random::discrete_distribution<int>> rows;
  for (std::size_t k = 0; k < params.K; ++k) {
    const auto r = params.transition.row(k);
    rows.emplace_back(r.begin(), r.end());
  }
  boost::random::uniform_int_distribution<std::size_t> length(params.t_min, params.t_max);
  boost::random::normal_distribution<double> noise(0.0, params.noise_sigma);

  Dataset ds;
  ds.d = params.d;
  ds.K = params.K;
  ds.domain = tag;
  ds.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto label_rng = sample_engine(seed, i, kLabelStream);
    auto noise_rng = sample_engine(seed, i, kNoiseStream);

    const std::size_t T = length(label_rng);
    Labels y(T);
    y[0] = prior(label_rng);
    for (std::size_t t = 1; t < T; ++t) y[t] = rows[static_cast<std::size_t>(y[t - 1])](label_rng);

    Sequence x(T);
    for (std::size_t t = 0; t < T; ++t) {
      Vector point = params.means[static_cast<std::size_t>(y[t])];
      for (double& v : point) v += noise(noise_rng);
      x[t] = params.emission_transform.apply(point);
    }
    ds.samples.push_back({std::move(x), std::move(y)});
  }
  return ds;
}

Matrix rotation_2d(double degrees) {
  const double rad = degrees * std::numbers::pi / 180.0;
  Matrix r(2, 2);
  r(0, 0) = std::cos(rad);
  r(0, 1) = -std::sin(rad);
  r(1, 0) = std::sin(rad);
  r(1, 1) = std::cos(rad);
  return r;
}

DomainParams shift(const DomainParams& params, const Matrix& orthogonal,
                   std::span<const double> translation) {
  params.validate();
  require(orthogonal.rows() == params.d && orthogonal.cols() == params.d,
          "shift: matrix must be d x d");
  require(translation.size() == params.d, "shift: translation must have d entries");
  const Matrix gram = orthogonal.transpose().multiply(orthogonal);
  for (std::size_t r = 0; r < params.d; ++r)
    for (std::size_t c = 0; c < params.d; ++c)
      require(std::abs(gram(r, c) - (r == c ? 1.0 : 0.0)) <= 1e-8,
              "shift: matrix is not orthogonal");

  DomainParams out = params;
  out.emission_transform.R = orthogonal.multiply(params.emission_transform.R);
  out.emission_transform.b = orthogonal.apply(params.emission_transform.b);
  for (std::size_t i = 0; i < params.d; ++i) out.emission_transform.b[i] += translation[i];
  return out;
}

DomainParams shift(const DomainParams& params, double rotation_degrees,
                   std::span<const double> translation) {
  require(params.d == 2, "shift: rotation by angle requires d = 2");
  require(std::isfinite(rotation_degrees), "shift: rotation must be finite");
  return shift(params, rotation_2d(rotation_degrees), translation);
}

MaskedDataset mask_labels(const Dataset& ds, std::size_t l, std::uint64_t seed) {
  const std::size_t n = ds.size();
  if (l > n)
    throw Error("mask_labels: l = " + std::to_string(l) + " exceeds n = " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i)
    require(ds.samples[i].labeled(), "mask_labels: sample " + std::to_string(i) + " is unlabeled");

  // Partial Fisher-Yates: the first l entries become a uniform l-subset.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(derive_seed(seed, kMaskStream));
  for (std::size_t i = 0; i < l; ++i) {
    boost::random::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<bool> keep(n, false);
  for (std::size_t i = 0; i < l; ++i) keep[order[i]] = true;

  MaskedDataset out;
  for (Dataset* part : {&out.data, &out.truth}) {
    part->d = ds.d;
    part->K = ds.K;
    part->domain = ds.domain;
    part->samples.reserve(n);
  }
  for (int pass = 0; pass < 2; ++pass) {
    const bool labeled_pass = pass == 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (keep[i] != labeled_pass) continue;
      Sample s = ds.samples[i];
      out.truth.samples.push_back(s);
      if (!labeled_pass) s.y.reset();
      out.data.samples.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace stol
