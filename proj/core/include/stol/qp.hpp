#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stol/chain_model.hpp"
#include "stol/linalg.hpp"

namespace stol {

// One joint labeling ybar^k of the l labeled target samples, with the
// averaged quantities that enter its margin constraint:
//   dpsi           = (1/l) sum_i [Psi(x_i, y_i) - Psi(x_i, ybar_i)]
//   delta_loss     = (1/l) sum_i L(y_i, ybar_i)
//   source_margin  = (1/l) sum_i [f^S(x_i, y_i) - f^S(x_i, ybar_i)]
// The constraint reads  source_margin + w . dpsi >= delta_loss - xi.
struct ConstraintRecord {
  std::vector<Labels> ybar;
  Vector dpsi;
  double delta_loss = 0.0;
  double source_margin = 0.0;

  // Linear coefficient of this record in the dual objective.
  double offset() const { return delta_loss - source_margin; }
};

// Ordered set of constraint records with the dual's Gram matrix and linear
// term maintained incrementally.
class WorkingSet {
 public:
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<ConstraintRecord>& records() const { return records_; }

  bool contains(const std::vector<Labels>& ybar) const;
  // Rejects a record whose joint labeling is already present.
  void add(ConstraintRecord record);

  // H(k, k') = dpsi_k . dpsi_k'
  const Matrix& gram() const { return gram_; }
  // b_k = delta_loss_k - source_margin_k
  const Vector& offsets() const { return offsets_; }

 private:
  std::vector<ConstraintRecord> records_;
  Matrix gram_;
  Vector offsets_;
};

struct DualState {
  Vector alpha;
  double C = 0.0;
  double objective = 0.0;
  double kkt_residual = 0.0;
  std::size_t updates = 0;
};

inline constexpr double kDefaultQpTolerance = 1e-8;
inline constexpr std::size_t kMaxPairUpdates = 1'000'000;

// -1/2 a'Ha + b'a
double dual_objective(const Matrix& H, std::span<const double> b, std::span<const double> alpha);

// Maximizes -1/2 a'Ha + b'a subject to a >= 0, sum(a) <= C.
//
// The budget is turned into an equality by a virtual slack coordinate
// (gradient 0, no curvature) holding C - sum(a); the solver then repeatedly
// moves mass from the smallest-gradient coordinate with positive mass to the
// largest-gradient coordinate, with an exact line search on that pair. Ties go
// to the lowest index, real coordinates before the slack. Stops once
// kkt_residual <= eps_qp; throws if kMaxPairUpdates is exceeded.
//
// `warm_start`, when non-empty, must be a feasible alpha of length <= |b|; it
// is padded with zeros. When `trace` is non-null the exact dual objective is
// appended before the first and after every pair update.
DualState solve_dual(const Matrix& H, std::span<const double> b, double C,
                     double eps_qp = kDefaultQpTolerance,
                     std::span<const double> warm_start = {},
                     std::vector<double>* trace = nullptr);

// w = sum_k alpha_k dpsi_k
Vector recover_w(std::span<const ConstraintRecord> records, std::span<const double> alpha);

// Smallest xi >= 0 satisfying every record's constraint at w.
double primal_slack(std::span<const ConstraintRecord> records, std::span<const double> w);

// Optimality certificate for the dual QP at a feasible alpha.
//
// With g = b - H alpha and the budget counted active when
// C - sum(alpha) <= 1e-12 max(1, C), take mu = max(0, max_k g_k) if the
// budget is active and mu = 0 otherwise. The residual is
//   max( max_k max(0, g_k - mu), max_k alpha_k |g_k - mu| ) / max(1, |b|_inf)
// and vanishes exactly at an optimum.
double kkt_residual(const Matrix& H, std::span<const double> b, double C,
                    std::span<const double> alpha);

}  // namespace stol
