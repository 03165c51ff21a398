#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jante/engine.hpp"

namespace jante {

/// Slack for F(t+1) <= F(t).
inline constexpr double kMonotoneSlack = 1e-9;
/// Relative slack for the range/energy sandwich and the step bound.
inline constexpr double kSandwichRelTol = 1e-9;

struct Violation {
  std::size_t step = 0;
  std::string invariant;  ///< "monotone", "sandwich_lower", "sandwich_upper", "step_bound", "rejection"
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Steps t with F(t) > F(previous record) + 1e−9.
std::vector<Violation> check_monotone(std::span<const StepRecord> records);

/// Per record: sqrt(2F/(N−K−1)) <= D <= sqrt(2F). Between consecutive steps:
/// D(t+1) <= sqrt(2F(t)) <= D(t)·sqrt(N−K−1). All within 1e−9 relative.
std::vector<Violation> check_sandwich(std::span<const StepRecord> records, std::size_t n,
                                      std::size_t k);

struct RejectionTally {
  std::size_t triggers = 0;    ///< steps whose samples were all beyond D·sqrt(N−K−1) of the old core
  std::size_t violations = 0;  ///< triggered steps where the core nevertheless changed
  std::vector<Violation> details;
};

/// Empty (not applicable) unless 2K < N.
std::optional<RejectionTally> check_rejection(std::span<const StepRecord> records, std::size_t n,
                                              std::size_t k);

struct DriftReport {
  double c = 0.0;
  double r_plus = 0.0;
  std::size_t n_transitions = 0;
  double mean_delta_h = 0.0;
  double stderr_delta_h = 0.0;
  /// The estimate uses every consecutive pair of records, with no stopping-time gating.
  std::string window = "all-steps";
};

/// Mean one-step increment of h_c = sqrt(F) + c·(μ' + max(0, −R_plus)).
/// Only defined for d = 1, K = 1 (NotApplicable otherwise); needs two records.
DriftReport supermartingale_drift(std::span<const StepRecord> records, std::size_t dim,
                                  std::size_t k, double c, double r_plus);

/// Completed traversals of (a, b) by coordinate 0 of μ'. Requires a < b.
std::size_t count_crossings(std::span<const StepRecord> records, double a, double b);

struct InvariantTally {
  std::size_t monotone = 0;
  std::size_t sandwich = 0;
  std::optional<RejectionTally> rejection;  ///< empty when 2K >= N
};

InvariantTally check_all(std::span<const StepRecord> records, std::size_t n, std::size_t k);

struct RunSummary {
  std::size_t run_id = 0;
  std::uint64_t seed = 0;
  Outcome outcome;
  InvariantTally invariants;
  std::optional<std::size_t> time_to_tol_f;  ///< first t with F < tol_f
  std::vector<double> f_at_checkpoints;
};

struct RunViolation {
  std::size_t run_id = 0;
  Violation violation;
};

struct BatchSummary {
  std::size_t n_runs = 0;
  std::map<OutcomeKind, std::size_t> outcome_counts;
  std::vector<std::size_t> checkpoints;
  std::vector<double> quantile_levels;
  /// f_quantiles[i][j]: quantile_levels[j] of F at checkpoints[i] across runs.
  std::vector<std::vector<double>> f_quantiles;
  std::optional<double> mean_time_to_tol_f;
  std::size_t monotone_violations = 0;
  std::size_t sandwich_violations = 0;
  std::size_t rejection_violations = 0;
  std::size_t rejection_triggers = 0;
  bool rejection_applicable = false;
  std::vector<RunSummary> runs;
  std::vector<RunViolation> violations;
};

/// 0, 10, 100, ... below max_steps, then max_steps.
std::vector<std::size_t> default_checkpoints(std::size_t max_steps);

RunSummary summarize_run(const Trajectory& traj, std::size_t run_id,
                         std::span<const std::size_t> checkpoints,
                         std::vector<Violation>* violations = nullptr);

struct BatchOptions {
  std::size_t jobs = 1;
  /// Called from worker threads once per finished run.
  std::function<void(std::size_t run_id, const Trajectory&)> on_trajectory;
};

/// Runs n_runs copies of the template. Run i uses seeds[i], or
/// derive_seed(config.seed, i) when `seeds` is empty. The summary does not
/// depend on the number of jobs.
BatchSummary batch_run(const RunConfig& config, std::size_t n_runs,
                       std::span<const std::uint64_t> seeds, const BatchOptions& options = {});

}  // namespace jante
