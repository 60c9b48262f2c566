#include "stol/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "stol/error.hpp"
#include "stol/inference.hpp"

namespace stol {

void TrainConfig::validate() const {
  require(std::isfinite(C) && C > 0.0, "train config: C must be positive");
  require(std::isfinite(eps_cp) && eps_cp > 0.0, "train config: eps_cp must be positive");
  require(std::isfinite(eps_qp) && eps_qp > 0.0, "train config: eps_qp must be positive");
  require(max_cp_iters >= 1, "train config: max_cp_iters must be positive");
  require(eps_cp > eps_qp, "train config: eps_cp must exceed eps_qp");
}

std::string_view to_string(Termination t) {
  return t == Termination::converged ? "converged" : "iteration_cap";
}

ConstraintRecord build_constraint(std::span<const Sample> labeled, const LinearScorer& source,
                                  std::span<const Labels> ybar) {
  require(!labeled.empty(), "build_constraint: no labeled samples");
  if (ybar.size() != labeled.size())
    throw Error("build_constraint: " + std::to_string(ybar.size()) +
                " competitor labelings for " + std::to_string(labeled.size()) + " samples");
  const auto& map = source.map;
  const double l = static_cast<double>(labeled.size());

  ConstraintRecord rec;
  rec.ybar.assign(ybar.begin(), ybar.end());
  rec.dpsi.assign(map.dim(), 0.0);
  double loss_sum = 0.0;
  double margin_sum = 0.0;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    const Sample& s = labeled[i];
    require(s.labeled(), "build_constraint: sample " + std::to_string(i) + " has no labels");
    if (ybar[i].size() != s.length())
      throw Error("build_constraint: competitor for sample " + std::to_string(i) +
                  " has length " + std::to_string(ybar[i].size()) + ", expected " +
                  std::to_string(s.length()));
    const Vector psi_true = joint_features(map, s.x, *s.y);
    const Vector psi_bar = joint_features(map, s.x, ybar[i]);
    for (std::size_t j = 0; j < psi_true.size(); ++j) rec.dpsi[j] += psi_true[j] - psi_bar[j];
    loss_sum += hamming_loss(*s.y, ybar[i]);
    margin_sum += dot(source.theta, psi_true) - dot(source.theta, psi_bar);
  }
  for (double& v : rec.dpsi) v /= l;
  rec.delta_loss = loss_sum / l;
  rec.source_margin = margin_sum / l;
  return rec;
}

namespace {

// Calls fn(i) for i in [0, n) on a few threads; fn writes only to slot i.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  constexpr std::size_t kMinPerThread = 64;
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, n / kMinPerThread);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<Sample> labeled_samples(const Dataset& data) {
  std::vector<Sample> out;
  out.reserve(data.labeled_count());
  for (const auto& s : data.samples)
    if (s.labeled()) out.push_back(s);
  return out;
}

}  // namespace

ConstraintRecord most_violated_constraint(std::span<const Sample> labeled,
                                          const TransferScorer& ts) {
  const Vector weights = ts.combined_weights();
  std::vector<Labels> ybar(labeled.size());
  parallel_for(labeled.size(), [&](std::size_t i) {
    require(labeled[i].labeled(), "separation: sample " + std::to_string(i) + " has no labels");
    ybar[i] = loss_augmented_decode(weights, ts.map(), labeled[i].x, *labeled[i].y).labels;
  });
  return build_constraint(labeled, ts.source, ybar);
}

double constraint_violation(const ConstraintRecord& record, std::span<const double> w, double xi) {
  return record.delta_loss - record.source_margin - dot(w, record.dpsi) - xi;
}

double objective(std::span<const double> w, double xi, double C) {
  require(xi >= 0.0, "objective: xi must be nonnegative");
  return 0.5 * squared_norm(w) + C * xi;
}

AdaptResult adapt(const LinearScorer& source, const Dataset& target, const TrainConfig& cfg) {
  cfg.validate();
  target.validate();
  const ChainFeatureMap& map = source.map;
  if (target.d != map.d() || target.K != map.K())
    throw Error("adapt: dataset has d=" + std::to_string(target.d) + ", K=" +
                std::to_string(target.K) + " but the source model has d=" +
                std::to_string(map.d()) + ", K=" + std::to_string(map.K()));
  const std::vector<Sample> labeled = labeled_samples(target);
  require(!labeled.empty(),
          "adapt: requires at least one labeled target sample (l >= 1), dataset has l = 0");

  TrainReport report;
  WorkingSet working_set;
  Vector w(map.dim(), 0.0);
  Vector alpha;
  double xi = 0.0;

  for (;;) {
    const ConstraintRecord candidate = most_violated_constraint(labeled, TransferScorer(source, w));
    report.final_violation = constraint_violation(candidate, w, xi);
    if (report.final_violation <= cfg.eps_cp) {
      report.terminated_by = Termination::converged;
      break;
    }
    if (report.iterations >= cfg.max_cp_iters) {
      report.terminated_by = Termination::iteration_cap;
      break;
    }
    // A record already in the working set is satisfied to QP precision,
    // far below eps_cp, so separation cannot return it.
    if (working_set.contains(candidate.ybar))
      throw std::logic_error("adapt: separation returned a constraint already in the working set");

    working_set.add(candidate);
    alpha.push_back(0.0);
    const DualState dual =
        solve_dual(working_set.gram(), working_set.offsets(), cfg.C, cfg.eps_qp, alpha);
    alpha = dual.alpha;
    w = recover_w(working_set.records(), alpha);
    xi = primal_slack(working_set.records(), w);

    ++report.iterations;
    report.dual_objective_trace.push_back(dual.objective);
    report.duality_gap_trace.push_back(objective(w, xi, cfg.C) - dual.objective);
  }

  report.final_xi = xi;
  report.final_primal_objective = objective(w, xi, cfg.C);
  report.working_set_size = working_set.size();
  return {TransferScorer(source, std::move(w)), std::move(report)};
}

SourceResult train_source(const Dataset& source_data, const TrainConfig& cfg) {
  source_data.validate();
  for (std::size_t i = 0; i < source_data.samples.size(); ++i)
    require(source_data.samples[i].labeled(),
            "train_source: sample " + std::to_string(i) + " is unlabeled; source data must be fully labeled");
  const ChainFeatureMap map(source_data.d, source_data.K);
  AdaptResult fit = adapt(LinearScorer::zero(map), source_data, cfg);
  return {LinearScorer(map, std::move(fit.model.w)), std::move(fit.report)};
}

}  // namespace stol
