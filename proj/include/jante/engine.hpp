#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "jante/core_select.hpp"
#include "jante/distributions.hpp"
#include "jante/geometry.hpp"
#include "jante/random.hpp"

namespace jante {

struct RunConfig {
  std::size_t n = 5;
  std::size_t k = 1;
  std::size_t dim = 1;
  DistributionSpec dist;
  std::uint64_t seed = 0;
  std::size_t max_steps = 100000;
  double tol_f = 1e-12;
  std::size_t move_window = 1000;
  double tol_move = 1e-9;
  double diverge_radius = 1e6;
  std::optional<std::vector<Point>> initial_points;
  /// (a, b) on coordinate 0 whose traversals count as core oscillations.
  /// Defaults to default_oscillation_interval(dist).
  std::optional<std::pair<double, double>> oscillation_interval;
  std::size_t oscillation_threshold = 10;
  double tie_rel_tol = 0.0;
};

/// Throws InvalidK, BadInitial, InvalidDistribution or ConfigError.
void validate(const RunConfig& config);

/// 2K < N, the regime in which a new core always keeps an old core point.
bool strict_majority_kept(const RunConfig& config) noexcept;

struct StepRecord {
  std::size_t t = 0;
  double f = 0.0;    ///< core energy
  double d = 0.0;    ///< core range
  Point mu_core;     ///< core barycenter
  bool core_changed = false;          ///< kept point multiset differs from the previous core
  bool all_samples_rejected = false;  ///< removed set is exactly the fresh samples
  double min_sample_core_dist = 0.0;  ///< +inf at t = 0
  std::size_t tie_count = 1;
};

enum class OutcomeKind { ConvergedToPoint, Diverged, OscillatingCore, Undecided };

const char* to_string(OutcomeKind kind) noexcept;
std::optional<OutcomeKind> outcome_from_string(const std::string& name);

struct Evidence {
  double final_f = 0.0;
  double final_origin_distance = 0.0;  ///< min ||x|| over the final core
  double window_displacement = 0.0;    ///< max ||μ'(s) − μ'(T)|| over the last window
  std::size_t crossings = 0;           ///< traversals of the oscillation interval
  std::size_t core_changes = 0;
  std::size_t steps = 0;               ///< index of the last record
};

struct Outcome {
  OutcomeKind kind = OutcomeKind::Undecided;
  std::optional<Point> phi;  ///< set iff kind == ConvergedToPoint
  Evidence evidence;
};

struct ClassifyThresholds {
  double tol_f = 1e-12;
  std::size_t move_window = 1000;
  double tol_move = 1e-9;
  double diverge_radius = 1e6;
  double cross_lo = 0.25;
  double cross_hi = 0.75;
  std::size_t oscillation_threshold = 10;
  /// With 2K < N a core of identical points can never change, so F = 0
  /// counts as converged before the motion window has filled.
  bool zero_energy_absorbing = false;
};

/// Quarter points between the extreme atoms for Bernoulli/FiniteDiscrete laws,
/// otherwise the sample quartiles of coordinate 0 from 4096 draws of a fixed
/// internal stream. Falls back to (x − 1, x + 1) when the quartiles coincide.
std::pair<double, double> default_oscillation_interval(const Sampler& sampler);

ClassifyThresholds thresholds_for(const RunConfig& config);

/// Counts completed traversals of (lo, hi): a value < lo followed later by a
/// value > hi, or the reverse. Values inside the interval never change state.
class CrossingCounter {
 public:
  CrossingCounter(double lo, double hi) : lo_(lo), hi_(hi) {}

  void push(double x) noexcept {
    const int side = x < lo_ ? -1 : (x > hi_ ? 1 : 0);
    if (side == 0) return;
    if (side_ != 0 && side != side_) ++count_;
    side_ = side;
  }
  std::size_t count() const noexcept { return count_; }

 private:
  double lo_;
  double hi_;
  int side_ = 0;
  std::size_t count_ = 0;
};

/// max ||μ'(s) − μ'(T)|| over the records s in [T − window, T], maintained
/// incrementally from the steps at which μ' changed.
class MotionWindow {
 public:
  explicit MotionWindow(std::size_t window) : window_(window) {}

  void push(std::size_t t, std::span<const double> mu);
  double displacement() const;

 private:
  std::size_t window_;
  std::deque<std::pair<std::size_t, Point>> changes_;
};

struct ProcessState {
  PointConfiguration pool;  ///< X(t), N points
  CoreSelection core;       ///< core of pool
  std::size_t t = 0;
};

/// X(0): the explicit points verbatim, or N draws from the sampler.
PointConfiguration init_state(const RunConfig& config, const Sampler& sampler, Rng& rng);

/// Selects the core of X(0) and produces the t = 0 record.
std::pair<ProcessState, StepRecord> start(PointConfiguration pool, std::size_t k, Rng& rng,
                                          const SelectOptions& options = {});

/// X(t+1) = core(t) ∪ samples, then the core of X(t+1). The old core keeps
/// its order and occupies indices [0, N−K); samples follow.
std::pair<ProcessState, StepRecord> step_with_samples(const ProcessState& state,
                                                      const PointConfiguration& samples, Rng& rng,
                                                      const SelectOptions& options = {});

/// Draws K samples, then resolves ties; that order is fixed.
std::pair<ProcessState, StepRecord> step(const ProcessState& state, const RunConfig& config,
                                         const Sampler& sampler, Rng& rng);

struct Trajectory {
  RunConfig config;
  std::vector<StepRecord> records;
  std::vector<Point> final_core;
  Outcome outcome;
  /// Explicit initial points are never checked against the support of ζ.
  bool initial_support_unchecked = false;
};

/// Deterministic in config: the stream is Rng(config.seed).
Trajectory run(const RunConfig& config);

Outcome classify(std::span<const StepRecord> records, std::span<const Point> final_core,
                 const ClassifyThresholds& thresholds);

}  // namespace jante
