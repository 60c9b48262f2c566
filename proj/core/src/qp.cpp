#include "stol/qp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stol/error.hpp"

namespace stol {

bool WorkingSet::contains(const std::vector<Labels>& ybar) const {
  return std::any_of(records_.begin(), records_.end(),
                     [&](const ConstraintRecord& r) { return r.ybar == ybar; });
}

void WorkingSet::add(ConstraintRecord record) {
  require(!contains(record.ybar), "working set: joint labeling already present");
  if (!records_.empty())
    require(record.dpsi.size() == records_.front().dpsi.size(),
            "working set: dpsi length differs from existing records");
  const std::size_t n = records_.size();
  gram_.grow_square();
  for (std::size_t k = 0; k < n; ++k) {
    const double h = dot(records_[k].dpsi, record.dpsi);
    gram_(k, n) = h;
    gram_(n, k) = h;
  }
  gram_(n, n) = squared_norm(record.dpsi);
  offsets_.push_back(record.offset());
  records_.push_back(std::move(record));
}

double dual_objective(const Matrix& H, std::span<const double> b, std::span<const double> alpha) {
  require(H.rows() == b.size() && H.cols() == b.size() && alpha.size() == b.size(),
          "dual_objective: dimension mismatch");
  const Vector Ha = H.apply(alpha);
  return -0.5 * dot(alpha, Ha) + dot(b, alpha);
}

namespace {

void check_problem(const Matrix& H, std::span<const double> b, double C) {
  require(H.rows() == H.cols(), "solve_dual: H is not square");
  require(H.rows() == b.size(), "solve_dual: H and b sizes differ");
  require(H.all_finite(), "solve_dual: H has non-finite entries");
  require(std::all_of(b.begin(), b.end(), [](double v) { return std::isfinite(v); }),
          "solve_dual: b has non-finite entries");
  double scale = 1.0;
  for (std::size_t i = 0; i < H.rows(); ++i) scale = std::max(scale, std::abs(H(i, i)));
  require(H.is_symmetric(1e-12 * scale), "solve_dual: H is not symmetric");
  require(std::isfinite(C) && C > 0.0, "solve_dual: C must be positive and finite");
}

double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double b_scale(std::span<const double> b) {
  double s = 1.0;
  for (double v : b) s = std::max(s, std::abs(v));
  return s;
}

bool budget_active(double total, double C) { return C - total <= 1e-12 * std::max(1.0, C); }

double residual_from_gradient(std::span<const double> g, std::span<const double> alpha,
                              double C, double scale) {
  const double total = sum(alpha);
  double mu = 0.0;
  if (budget_active(total, C))
    for (double gk : g) mu = std::max(mu, gk);
  double r = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    r = std::max(r, std::max(0.0, g[k] - mu));
    r = std::max(r, alpha[k] * std::abs(g[k] - mu));
  }
  return r / scale;
}

Vector gradient(const Matrix& H, std::span<const double> b, std::span<const double> alpha) {
  Vector g = H.apply(alpha);
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = b[k] - g[k];
  return g;
}

}  // namespace

double kkt_residual(const Matrix& H, std::span<const double> b, double C,
                    std::span<const double> alpha) {
  check_problem(H, b, C);
  require(alpha.size() == b.size(), "kkt_residual: alpha has wrong length");
  for (double a : alpha) require(a >= 0.0, "kkt_residual: alpha is infeasible (negative entry)");
  require(sum(alpha) <= C + 1e-9, "kkt_residual: alpha is infeasible (sum exceeds C)");
  return residual_from_gradient(gradient(H, b, alpha), alpha, C, b_scale(b));
}

DualState solve_dual(const Matrix& H, std::span<const double> b, double C, double eps_qp,
                     std::span<const double> warm_start, std::vector<double>* trace) {
  check_problem(H, b, C);
  require(std::isfinite(eps_qp) && eps_qp > 0.0, "solve_dual: eps_qp must be positive");
  const std::size_t n = b.size();

  DualState state;
  state.C = C;
  state.alpha.assign(n, 0.0);
  if (!warm_start.empty()) {
    require(warm_start.size() <= n, "solve_dual: warm start longer than problem");
    for (std::size_t k = 0; k < warm_start.size(); ++k) {
      require(warm_start[k] >= 0.0, "solve_dual: warm start has a negative entry");
      state.alpha[k] = warm_start[k];
    }
    require(sum(state.alpha) <= C + 1e-9, "solve_dual: warm start exceeds the budget");
  }
  Vector& alpha = state.alpha;
  double slack = std::max(0.0, C - sum(alpha));
  const double scale = b_scale(b);
  Vector g = gradient(H, b, alpha);

  if (trace != nullptr) trace->push_back(dual_objective(H, b, alpha));

  // Coordinate n is the virtual slack: gradient 0, zero row in H.
  const std::size_t slack_index = n;
  auto grad_of = [&](std::size_t k) { return k == slack_index ? 0.0 : g[k]; };
  auto mass_of = [&](std::size_t k) { return k == slack_index ? slack : alpha[k]; };
  auto h = [&](std::size_t i, std::size_t j) {
    return (i == slack_index || j == slack_index) ? 0.0 : H(i, j);
  };

  for (;;) {
    if (residual_from_gradient(g, alpha, C, scale) <= eps_qp) {
      g = gradient(H, b, alpha);
      if (residual_from_gradient(g, alpha, C, scale) <= eps_qp) break;
    }

    std::size_t up = 0;
    for (std::size_t k = 1; k <= n; ++k)
      if (grad_of(k) > grad_of(up)) up = k;
    std::size_t down = n + 1;
    for (std::size_t k = 0; k <= n; ++k) {
      if (mass_of(k) <= 0.0) continue;
      if (down == n + 1 || grad_of(k) < grad_of(down)) down = k;
    }

    const double gap = down == n + 1 ? 0.0 : grad_of(up) - grad_of(down);
    if (up == down || gap <= 0.0) {
      g = gradient(H, b, alpha);
      if (residual_from_gradient(g, alpha, C, scale) <= eps_qp) break;
      throw Error("solve_dual: stalled with KKT residual " +
                  std::to_string(residual_from_gradient(g, alpha, C, scale)) +
                  " above tolerance");
    }

    const double curvature = h(up, up) + h(down, down) - 2.0 * h(up, down);
    const double available = mass_of(down);
    double step = available;
    if (curvature > 0.0) step = std::min(available, gap / curvature);
    if (step <= 0.0) throw Error("solve_dual: zero step with positive gap");

    if (up == slack_index) {
      slack += step;
    } else {
      alpha[up] += step;
    }
    if (down == slack_index) {
      slack = step == available ? 0.0 : slack - step;
    } else {
      alpha[down] = step == available ? 0.0 : alpha[down] - step;
    }
    for (std::size_t k = 0; k < n; ++k) g[k] -= step * (h(k, up) - h(k, down));

    if (trace != nullptr) trace->push_back(dual_objective(H, b, alpha));
    if (++state.updates > kMaxPairUpdates)
      throw Error("solve_dual: exceeded " + std::to_string(kMaxPairUpdates) + " pair updates");
  }

  state.objective = dual_objective(H, b, alpha);
  state.kkt_residual = residual_from_gradient(gradient(H, b, alpha), alpha, C, scale);
  return state;
}

Vector recover_w(std::span<const ConstraintRecord> records, std::span<const double> alpha) {
  require(records.size() == alpha.size(), "recover_w: alpha length " +
                                              std::to_string(alpha.size()) +
                                              " does not match working set size " +
                                              std::to_string(records.size()));
  if (records.empty()) return {};
  Vector w(records.front().dpsi.size(), 0.0);
  for (std::size_t k = 0; k < records.size(); ++k) {
    require(records[k].dpsi.size() == w.size(), "recover_w: inconsistent dpsi lengths");
    axpy(alpha[k], records[k].dpsi, w);
  }
  return w;
}

double primal_slack(std::span<const ConstraintRecord> records, std::span<const double> w) {
  double xi = 0.0;
  for (const auto& r : records) {
    require(r.dpsi.size() == w.size(), "primal_slack: w has wrong length");
    xi = std::max(xi, r.delta_loss - r.source_margin - dot(w, r.dpsi));
  }
  return xi;
}

}  // namespace stol
