#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stol/datagen.hpp"
#include "stol/error.hpp"
#include "stol/io.hpp"

using namespace stol;

namespace {

// Pools every emission of label k and returns its per-coordinate mean.
struct PooledMean {
  Vector mean;
  std::size_t count = 0;
};

PooledMean pooled_mean(const Dataset& ds, Label k) {
  PooledMean out{Vector(ds.d, 0.0), 0};
  for (const auto& s : ds.samples)
    for (std::size_t t = 0; t < s.x.size(); ++t)
      if ((*s.y)[t] == k) {
        for (std::size_t j = 0; j < ds.d; ++j) out.mean[j] += s.x[t][j];
        ++out.count;
      }
  for (double& v : out.mean) v /= static_cast<double>(out.count);
  return out;
}

void check_means(const Dataset& ds, const DomainParams& p) {
  for (std::size_t k = 0; k < p.K; ++k) {
    const PooledMean got = pooled_mean(ds, static_cast<Label>(k));
    REQUIRE(got.count > 100);
    const Vector want = p.emission_transform.apply(p.means[k]);
    const double tol = 4.0 * p.noise_sigma / std::sqrt(static_cast<double>(got.count));
    for (std::size_t j = 0; j < p.d; ++j) CHECK(std::abs(got.mean[j] - want[j]) <= tol);
  }
}

}  // namespace

TEST_CASE("defaults are valid") {
  const DomainParams p = DomainParams::defaults();
  CHECK_NOTHROW(p.validate());
  CHECK(p.d == 2);
  CHECK(p.K == 3);
  CHECK(p.means[1][0] == doctest::Approx(std::cos(2.0 * std::numbers::pi / 3.0)));
}

TEST_CASE("generate is deterministic") {
  const DomainParams p = DomainParams::defaults();
  const std::string a = io::dataset_to_jsonl(generate(p, 30, 5));
  const std::string b = io::dataset_to_jsonl(generate(p, 30, 5));
  const std::string c = io::dataset_to_jsonl(generate(p, 30, 6));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("generate respects the declared shape") {
  const DomainParams p = DomainParams::defaults();
  const Dataset ds = generate(p, 200, 1, DomainTag::target);
  CHECK_NOTHROW(ds.validate());
  CHECK(ds.domain == DomainTag::target);
  CHECK(ds.size() == 200);
  for (const auto& s : ds.samples) {
    CHECK(s.x.size() >= p.t_min);
    CHECK(s.x.size() <= p.t_max);
    REQUIRE(s.labeled());
  }
}

TEST_CASE("noise level never changes labels or lengths") {
  DomainParams quiet = DomainParams::defaults();
  DomainParams loud = quiet;
  quiet.noise_sigma = 0.01;
  loud.noise_sigma = 2.0;
  const Dataset a = generate(quiet, 50, 11);
  const Dataset b = generate(loud, 50, 11);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(a.samples[i].y == b.samples[i].y);
    CHECK(a.samples[i].x.size() == b.samples[i].x.size());
  }
}

TEST_CASE("emission means converge to the transformed class means") {
  const DomainParams p = DomainParams::defaults();
  check_means(generate(p, 1500, 21), p);
  const DomainParams shifted = shift(p, kDefaultShiftDegrees, kDefaultShiftTranslation);
  check_means(generate(shifted, 1500, 22), shifted);
}

TEST_CASE("initial label frequencies follow the prior") {
  DomainParams p = DomainParams::defaults();
  p.label_prior = {0.5, 0.3, 0.2};
  const std::size_t n = 4000;
  const Dataset ds = generate(p, n, 31);
  std::vector<double> counts(3, 0.0);
  for (const auto& s : ds.samples) counts[static_cast<std::size_t>((*s.y)[0])] += 1.0;
  double chi2 = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double expected = static_cast<double>(n) * p.label_prior[k];
    chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
  }
  // Upper 0.001 quantile of chi-square with 2 degrees of freedom.
  CHECK(chi2 < 13.816);
}

TEST_CASE("shift by the identity is a no-op") {
  const DomainParams p = DomainParams::defaults();
  const Vector zero{0.0, 0.0};
  const DomainParams same = shift(p, Matrix::identity(2), zero);
  CHECK(same.emission_transform.R == p.emission_transform.R);
  CHECK(same.emission_transform.b == p.emission_transform.b);
  CHECK(io::dataset_to_jsonl(generate(same, 10, 3)) == io::dataset_to_jsonl(generate(p, 10, 3)));
}

TEST_CASE("shift by 180 degrees negates emissions") {
  const DomainParams p = DomainParams::defaults();
  const Vector zero{0.0, 0.0};
  const Dataset a = generate(p, 10, 4);
  const Dataset b = generate(shift(p, 180.0, zero), 10, 4);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(a.samples[i].y == b.samples[i].y);
    for (std::size_t t = 0; t < a.samples[i].x.size(); ++t)
      for (std::size_t j = 0; j < 2; ++j)
        CHECK(b.samples[i].x[t][j] == doctest::Approx(-a.samples[i].x[t][j]).epsilon(1e-12));
  }
}

TEST_CASE("shift keeps label dynamics and moves means by R m + b") {
  const DomainParams p = DomainParams::defaults();
  const DomainParams s = shift(p, kDefaultShiftDegrees, kDefaultShiftTranslation);
  CHECK(s.label_prior == p.label_prior);
  CHECK(s.transition == p.transition);
  CHECK(s.means == p.means);
  const Matrix R = rotation_2d(kDefaultShiftDegrees);
  for (std::size_t k = 0; k < p.K; ++k) {
    const Vector got = s.emission_transform.apply(p.means[k]);
    const Vector rotated = R.apply(p.means[k]);
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(got[j] == doctest::Approx(rotated[j] + kDefaultShiftTranslation[j]).epsilon(1e-12));
  }
}

TEST_CASE("shift rejects non-orthogonal maps and bad shapes") {
  const DomainParams p = DomainParams::defaults();
  Matrix scale = Matrix::identity(2);
  scale(0, 0) = 2.0;
  const Vector zero{0.0, 0.0};
  CHECK_THROWS_AS(shift(p, scale, zero), Error);
  CHECK_THROWS_AS(shift(p, Matrix::identity(3), Vector{0.0, 0.0, 0.0}), Error);
  CHECK_THROWS_AS(shift(p, Matrix::identity(2), Vector{0.0}), Error);
}

TEST_CASE("mask_labels boundary cases") {
  const Dataset ds = generate(DomainParams::defaults(), 20, 8);
  const MaskedDataset all = mask_labels(ds, 20, 1);
  CHECK(all.data.labeled_count() == 20);
  CHECK(io::dataset_to_jsonl(all.data) == io::dataset_to_jsonl(ds));
  const MaskedDataset none = mask_labels(ds, 0, 1);
  CHECK(none.data.labeled_count() == 0);
  CHECK(io::dataset_to_jsonl(none.truth) == io::dataset_to_jsonl(ds));
  CHECK_THROWS_AS(mask_labels(ds, 21, 1), Error);
}

TEST_CASE("mask_labels is deterministic and preserves the sample multiset") {
  const Dataset ds = generate(DomainParams::defaults(), 40, 9);
  const MaskedDataset a = mask_labels(ds, 7, 3);
  const MaskedDataset b = mask_labels(ds, 7, 3);
  CHECK(io::dataset_to_jsonl(a.data) == io::dataset_to_jsonl(b.data));
  CHECK(a.data.labeled_count() == 7);
  CHECK(a.data.labeled_prefix());
  CHECK(a.data.size() == 40);

  std::vector<std::string> before, after;
  for (std::size_t i = 0; i < 40; ++i) {
    Dataset one;
    one.d = ds.d;
    one.K = ds.K;
    one.samples = {ds.samples[i]};
    before.push_back(io::dataset_to_jsonl(one));
    one.samples = {a.truth.samples[i]};
    after.push_back(io::dataset_to_jsonl(one));
    CHECK(a.truth.samples[i].x == a.data.samples[i].x);
    if (i < 7) CHECK(a.truth.samples[i].y == a.data.samples[i].y);
  }
  std::sort(before.begin(), before.end());
  std::sort(after.begin(), after.end());
  CHECK(before == after);

  const MaskedDataset other = mask_labels(ds, 7, 4);
  CHECK(io::dataset_to_jsonl(other.data) != io::dataset_to_jsonl(a.data));
}

TEST_CASE("mask_labels requires a fully labeled input") {
  Dataset ds = generate(DomainParams::defaults(), 5, 2);
  ds.samples[3].y.reset();
  CHECK_THROWS_AS(mask_labels(ds, 2, 1), Error);
}

TEST_CASE("invalid params are rejected") {
  auto broken = [](auto mutate) {
    DomainParams p = DomainParams::defaults();
    mutate(p);
    return p;
  };
  CHECK_THROWS_AS(broken([](DomainParams& p) { p.label_prior = {0.5, 0.5, 0.5}; }).validate(), Error);
  CHECK_THROWS_AS(broken([](DomainParams& p) { p.label_prior = {1.2, -0.1, -0.1}; }).validate(), Error);
  CHECK_THROWS_AS(broken([](DomainParams& p) { p.transition(0, 0) = 0.9; }).validate(), Error);
  CHECK_THROWS_AS(broken([](DomainParams& p) { p.noise_sigma = 0.0; }).validate(), Error);
  CHECK_THROWS_AS(broken([](DomainParams& p) { p.t_min = 0; }).validate(), Error);
  CHECK_THROWS_AS(broken([](DomainParams& p) { p.t_max = 2; }).validate(), Error);
  CHECK_THROWS_AS(broken([](DomainParams& p) { p.means.pop_back(); }).validate(), Error);
  CHECK_THROWS_AS(generate(broken([](DomainParams& p) { p.noise_sigma = -1.0; }), 3, 1), Error);
  CHECK_THROWS_AS(generate(DomainParams::defaults(), 0, 1), Error);
}

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}
