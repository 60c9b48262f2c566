#include "stol/chain_model.hpp"

#include <cmath>
#include <string>

#include "stol/error.hpp"

namespace stol {

std::string_view to_string(DomainTag tag) {
  return tag == DomainTag::source ? "source" : "target";
}

DomainTag domain_from_string(std::string_view name) {
  if (name == "source") return DomainTag::source;
  if (name == "target") return DomainTag::target;
  throw Error("unknown domain tag '" + std::string(name) + "' (expected source|target)");
}

std::size_t Dataset::labeled_count() const {
  std::size_t l = 0;
  for (const auto& s : samples) l += s.labeled() ? 1 : 0;
  return l;
}

bool Dataset::labeled_prefix() const {
  bool seen_unlabeled = false;
  for (const auto& s : samples) {
    if (!s.labeled())
      seen_unlabeled = true;
    else if (seen_unlabeled)
      return false;
  }
  return true;
}

void Dataset::validate() const {
  require(d >= 1, "dataset: d must be at least 1");
  require(K >= 1, "dataset: K must be at least 1");
  const ChainFeatureMap map(d, K);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    try {
      if (samples[i].y)
        map.check(samples[i].x, *samples[i].y);
      else
        map.check_input(samples[i].x);
    } catch (const Error& e) {
      throw Error("sample " + std::to_string(i) + ": " + e.what());
    }
  }
}

ChainFeatureMap::ChainFeatureMap(std::size_t d, std::size_t K) : d_(d), K_(K) {
  require(d >= 1, "feature map: d must be at least 1");
  require(K >= 1, "feature map: K must be at least 1");
}

void ChainFeatureMap::check_input(std::span<const Vector> x) const {
  require(!x.empty(), "empty input sequence");
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (x[t].size() != d_)
      throw Error("input vector at position " + std::to_string(t) + " has dimension " +
                  std::to_string(x[t].size()) + ", expected " + std::to_string(d_));
    for (double v : x[t])
      require(std::isfinite(v), "non-finite input at position " + std::to_string(t));
  }
}

void ChainFeatureMap::check(std::span<const Vector> x, std::span<const Label> y) const {
  check_input(x);
  if (y.size() != x.size())
    throw Error("label sequence length " + std::to_string(y.size()) +
                " does not match input length " + std::to_string(x.size()));
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (y[t] < 0 || static_cast<std::size_t>(y[t]) >= K_)
      throw Error("label " + std::to_string(y[t]) + " at position " + std::to_string(t) +
                  " out of range [0, " + std::to_string(K_) + ")");
  }
}

Vector joint_features(const ChainFeatureMap& map, std::span<const Vector> x,
                      std::span<const Label> y) {
  map.check(x, y);
  Vector psi(map.dim(), 0.0);
  for (std::size_t t = 0; t < x.size(); ++t) {
    const auto k = static_cast<std::size_t>(y[t]);
    for (std::size_t j = 0; j < map.d(); ++j) psi[map.emission_index(k, j)] += x[t][j];
    if (t > 0) psi[map.transition_index(static_cast<std::size_t>(y[t - 1]), k)] += 1.0;
  }
  return psi;
}

LinearScorer::LinearScorer(ChainFeatureMap m, Vector w) : map(m), theta(std::move(w)) {
  require(theta.size() == map.dim(), "linear scorer: theta has length " +
                                         std::to_string(theta.size()) + ", expected m = " +
                                         std::to_string(map.dim()));
}

LinearScorer LinearScorer::zero(const ChainFeatureMap& map) {
  return LinearScorer(map, Vector(map.dim(), 0.0));
}

TransferScorer::TransferScorer(LinearScorer src, Vector delta)
    : source(std::move(src)), w(std::move(delta)) {
  require(w.size() == source.map.dim(), "transfer scorer: w has length " +
                                            std::to_string(w.size()) + ", expected m = " +
                                            std::to_string(source.map.dim()));
}

Vector TransferScorer::combined_weights() const { return add(source.theta, w); }

double score(const LinearScorer& scorer, std::span<const Vector> x, std::span<const Label> y) {
  return dot(scorer.theta, joint_features(scorer.map, x, y));
}

double transfer_score(const TransferScorer& ts, std::span<const Vector> x,
                      std::span<const Label> y) {
  const Vector psi = joint_features(ts.map(), x, y);
  return dot(ts.source.theta, psi) + dot(ts.w, psi);
}

}  // namespace stol
