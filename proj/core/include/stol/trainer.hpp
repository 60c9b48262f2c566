#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "stol/chain_model.hpp"
#include "stol/qp.hpp"

namespace stol {

struct TrainConfig {
  double C = 100.0;
  double eps_cp = 1e-3;
  double eps_qp = 1e-8;
  std::size_t max_cp_iters = 1000;

  void validate() const;
};

enum class Termination { converged, iteration_cap };

std::string_view to_string(Termination t);

struct TrainReport {
  std::size_t iterations = 0;
  // Dual objective after each inner QP solve.
  std::vector<double> dual_objective_trace;
  // Primal objective over the working set minus the dual objective, per solve.
  std::vector<double> duality_gap_trace;
  double final_primal_objective = 0.0;
  double final_xi = 0.0;
  // Violation beyond xi of the last separated constraint.
  double final_violation = 0.0;
  Termination terminated_by = Termination::converged;
  std::size_t working_set_size = 0;
};

// Averages of Psi differences, losses and source-score margins over the
// labeled samples for one joint labeling ybar (one label sequence per sample).
ConstraintRecord build_constraint(std::span<const Sample> labeled, const LinearScorer& source,
                                  std::span<const Labels> ybar);

// Runs the loss-augmented decoder on every labeled sample under `ts` and
// assembles the joint most-violated constraint. Samples are decoded in
// parallel; results are gathered in index order.
ConstraintRecord most_violated_constraint(std::span<const Sample> labeled,
                                          const TransferScorer& ts);

// How far `record` is violated at (w, xi):  delta_loss - source_margin - w.dpsi - xi.
double constraint_violation(const ConstraintRecord& record, std::span<const double> w, double xi);

// 1/2 |w|^2 + C xi
double objective(std::span<const double> w, double xi, double C);

struct AdaptResult {
  TransferScorer model;
  TrainReport report;
};

// Cutting-plane training of the delta weights w on the labeled samples of
// `target`, with `source` frozen. Starts from w = 0 and an empty working
// set; each round adds the jointly most violated constraint and re-solves the
// dual over the working set, until the new constraint is violated by at most
// eps_cp beyond the current xi.
AdaptResult adapt(const LinearScorer& source, const Dataset& target, const TrainConfig& cfg);

struct SourceResult {
  LinearScorer model;
  TrainReport report;
};

// adapt() with a zero base on fully labeled data: the 1-slack margin-rescaling
// structural SVM.
SourceResult train_source(const Dataset& source_data, const TrainConfig& cfg);

}  // namespace stol
