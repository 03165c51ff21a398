#include "jante/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "jante/error.hpp"

namespace jante {

namespace {

bool exceeds(double lhs, double rhs) {
  return lhs > rhs + kSandwichRelTol * std::max(std::abs(lhs), std::abs(rhs));
}

bool consecutive(const StepRecord& prev, const StepRecord& cur) { return cur.t == prev.t + 1; }

// Linear interpolation between order statistics.
double quantile(std::vector<double> values, double level) {
  std::sort(values.begin(), values.end());
  const double pos = level * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace

std::vector<Violation> check_monotone(std::span<const StepRecord> records) {
  std::vector<Violation> out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].f > records[i - 1].f + kMonotoneSlack) {
      out.push_back({records[i].t, "monotone", records[i].f, records[i - 1].f});
    }
  }
  return out;
}

std::vector<Violation> check_sandwich(std::span<const StepRecord> records, std::size_t n,
                                      std::size_t k) {
  if (n < k + 2) throw Error(ErrorCode::InvalidArgument, "sandwich needs N-K >= 2");
  const double spread = static_cast<double>(n - k - 1);
  std::vector<Violation> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const double lower = std::sqrt(2.0 * r.f / spread);
    const double upper = std::sqrt(2.0 * r.f);
    if (exceeds(lower, r.d)) out.push_back({r.t, "sandwich_lower", lower, r.d});
    if (exceeds(r.d, upper)) out.push_back({r.t, "sandwich_upper", r.d, upper});
    if (i == 0 || !consecutive(records[i - 1], r)) continue;
    const auto& prev = records[i - 1];
    const double bound = std::sqrt(2.0 * prev.f);
    if (exceeds(r.d, bound)) out.push_back({r.t, "step_bound", r.d, bound});
    const double widened = prev.d * std::sqrt(spread);
    if (exceeds(bound, widened)) out.push_back({r.t, "step_bound", bound, widened});
  }
  return out;
}

std::optional<RejectionTally> check_rejection(std::span<const StepRecord> records, std::size_t n,
                                              std::size_t k) {
  if (2 * k >= n) return std::nullopt;
  const double factor = std::sqrt(static_cast<double>(n - k - 1));
  RejectionTally tally;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& prev = records[i - 1];
    const auto& cur = records[i];
    if (!consecutive(prev, cur)) continue;
    const double threshold = prev.d * factor;
    if (!(cur.min_sample_core_dist > threshold)) continue;
    ++tally.triggers;
    if (cur.core_changed) {
      ++tally.violations;
      tally.details.push_back({cur.t, "rejection", cur.min_sample_core_dist, threshold});
    }
  }
  return tally;
}

DriftReport supermartingale_drift(std::span<const StepRecord> records, std::size_t dim,
                                  std::size_t k, double c, double r_plus) {
  if (dim != 1 || k != 1) throw Error(ErrorCode::NotApplicable, "drift statistic needs d = 1 and K = 1");
  if (!(c >= 0.0)) throw Error(ErrorCode::InvalidArgument, "c must be non-negative");
  const double offset = std::max(0.0, -r_plus);
  auto h = [&](const StepRecord& r) { return std::sqrt(r.f) + c * (r.mu_core[0] + offset); };

  std::vector<double> deltas;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (consecutive(records[i - 1], records[i])) deltas.push_back(h(records[i]) - h(records[i - 1]));
  }
  if (deltas.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one transition");

  DriftReport report;
  report.c = c;
  report.r_plus = r_plus;
  report.n_transitions = deltas.size();
  double sum = 0.0;
  for (double x : deltas) sum += x;
  report.mean_delta_h = sum / static_cast<double>(deltas.size());
  if (deltas.size() > 1) {
    double ss = 0.0;
    for (double x : deltas) ss += (x - report.mean_delta_h) * (x - report.mean_delta_h);
    const double var = ss / static_cast<double>(deltas.size() - 1);
    report.stderr_delta_h = std::sqrt(var / static_cast<double>(deltas.size()));
  }
  return report;
}

std::size_t count_crossings(std::span<const StepRecord> records, double a, double b) {
  if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "crossing interval needs a < b");
  CrossingCounter counter(a, b);
  for (const auto& r : records) counter.push(r.mu_core[0]);
  return counter.count();
}

InvariantTally check_all(std::span<const StepRecord> records, std::size_t n, std::size_t k) {
  InvariantTally tally;
  tally.monotone = check_monotone(records).size();
  tally.sandwich = check_sandwich(records, n, k).size();
  tally.rejection = check_rejection(records, n, k);
  return tally;
}

std::vector<std::size_t> default_checkpoints(std::size_t max_steps) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < max_steps; t = (t == 0 ? 10 : t * 10)) out.push_back(t);
  out.push_back(max_steps);
  return out;
}

RunSummary summarize_run(const Trajectory& traj, std::size_t run_id,
                         std::span<const std::size_t> checkpoints,
                         std::vector<Violation>* violations) {
  const auto& cfg = traj.config;
  RunSummary s;
  s.run_id = run_id;
  s.seed = cfg.seed;
  s.outcome = traj.outcome;

  auto monotone = check_monotone(traj.records);
  auto sandwich = check_sandwich(traj.records, cfg.n, cfg.k);
  s.invariants.monotone = monotone.size();
  s.invariants.sandwich = sandwich.size();
  s.invariants.rejection = check_rejection(traj.records, cfg.n, cfg.k);
  if (violations) {
    violations->insert(violations->end(), monotone.begin(), monotone.end());
    violations->insert(violations->end(), sandwich.begin(), sandwich.end());
    if (s.invariants.rejection) {
      const auto& d = s.invariants.rejection->details;
      violations->insert(violations->end(), d.begin(), d.end());
    }
  }

  for (const auto& r : traj.records) {
    if (r.f < cfg.tol_f) {
      s.time_to_tol_f = r.t;
      break;
    }
  }
  // Records are indexed by t; a run that stopped early keeps its final F.
  for (std::size_t cp : checkpoints) {
    const std::size_t idx = std::min(cp, traj.records.size() - 1);
    s.f_at_checkpoints.push_back(traj.records[idx].f);
  }
  return s;
}

BatchSummary batch_run(const RunConfig& config, std::size_t n_runs,
                       std::span<const std::uint64_t> seeds, const BatchOptions& options) {
  if (n_runs < 1) throw Error(ErrorCode::InvalidArgument, "n_runs must be at least 1");
  if (!seeds.empty() && seeds.size() != n_runs) {
    throw Error(ErrorCode::InvalidArgument, "seed list length must equal n_runs");
  }
  validate(config);

  BatchSummary summary;
  summary.n_runs = n_runs;
  summary.checkpoints = default_checkpoints(config.max_steps);
  summary.quantile_levels = {0.05, 0.25, 0.5, 0.75, 0.95};
  summary.runs.resize(n_runs);
  std::vector<std::vector<Violation>> per_run(n_runs);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_runs) return;
      try {
        RunConfig cfg = config;
        cfg.seed = seeds.empty() ? derive_seed(config.seed, i) : seeds[i];
        const auto traj = run(cfg);
        summary.runs[i] = summarize_run(traj, i, summary.checkpoints, &per_run[i]);
        if (options.on_trajectory) options.on_trajectory(i, traj);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, n_runs);
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  double time_sum = 0.0;
  std::size_t time_count = 0;
  for (std::size_t i = 0; i < n_runs; ++i) {
    const auto& r = summary.runs[i];
    ++summary.outcome_counts[r.outcome.kind];
    summary.monotone_violations += r.invariants.monotone;
    summary.sandwich_violations += r.invariants.sandwich;
    if (r.invariants.rejection) {
      summary.rejection_applicable = true;
      summary.rejection_triggers += r.invariants.rejection->triggers;
      summary.rejection_violations += r.invariants.rejection->violations;
    }
    if (r.time_to_tol_f) {
      time_sum += static_cast<double>(*r.time_to_tol_f);
      ++time_count;
    }
    for (const auto& v : per_run[i]) summary.violations.push_back({i, v});
  }
  if (time_count > 0) summary.mean_time_to_tol_f = time_sum / static_cast<double>(time_count);

  for (std::size_t c = 0; c < summary.checkpoints.size(); ++c) {
    std::vector<double> fs;
    for (const auto& r : summary.runs) fs.push_back(r.f_at_checkpoints[c]);
    std::vector<double> row;
    for (double level : summary.quantile_levels) row.push_back(quantile(fs, level));
    summary.f_quantiles.push_back(std::move(row));
  }
  return summary;
}

}  // namespace jante
