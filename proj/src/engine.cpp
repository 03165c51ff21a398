#include "jante/engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "jante/error.hpp"

namespace jante {

namespace {

constexpr std::array<const char*, 4> kOutcomeNames = {"ConvergedToPoint", "Diverged",
                                                      "OscillatingCore", "Undecided"};

// Fixed stream for data-dependent defaults that must not vary with the run seed.
constexpr std::uint64_t kDefaultsSeed = 0x6a616e7465ULL;

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::ConfigError, message);
}

double min_norm(std::span<const Point> points) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points) best = std::min(best, squared_norm(p));
  return std::sqrt(best);
}

// Lexicographically sorted copies of the points, used as a multiset key.
std::vector<Point> sorted_points(const PointConfiguration& cfg) {
  auto pts = cfg.points();
  std::sort(pts.begin(), pts.end());
  return pts;
}

StepRecord describe(std::size_t t, const PointConfiguration& core, const CoreSelection& sel) {
  StepRecord rec;
  rec.t = t;
  rec.f = sel.core_energy;
  rec.d = range(core);
  rec.mu_core = barycenter(core);
  rec.tie_count = sel.tie_count;
  return rec;
}

}  // namespace

const char* to_string(OutcomeKind kind) noexcept {
  return kOutcomeNames[static_cast<std::size_t>(kind)];
}

std::optional<OutcomeKind> outcome_from_string(const std::string& name) {
  for (std::size_t i = 0; i < kOutcomeNames.size(); ++i) {
    if (name == kOutcomeNames[i]) return static_cast<OutcomeKind>(i);
  }
  return std::nullopt;
}

void validate(const RunConfig& config) {
  if (config.n < 3) config_error("N must be at least 3");
  if (config.k < 1 || config.k > config.n - 2) {
    throw Error(ErrorCode::InvalidK, "K must satisfy 1 <= K <= N-2 (got K=" +
                                         std::to_string(config.k) + ", N=" + std::to_string(config.n) + ")");
  }
  if (config.dim < 1) config_error("dim must be positive");
  if (config.dist.dim != config.dim) config_error("dist.dim must equal dim");
  validate(config.dist);
  if (config.max_steps < 1) config_error("max_steps must be positive");
  if (!(config.tol_f > 0.0) || !(config.tol_move > 0.0) || !(config.diverge_radius > 0.0) ||
      config.move_window < 1 || config.tie_rel_tol < 0.0) {
    config_error("tolerances must be positive");
  }
  if (config.oscillation_interval && !(config.oscillation_interval->first < config.oscillation_interval->second)) {
    config_error("oscillation_interval needs a < b");
  }
  if (config.initial_points) {
    if (config.initial_points->size() != config.n) {
      throw Error(ErrorCode::BadInitial, "initial_points must contain exactly N points");
    }
    for (const auto& p : *config.initial_points) {
      if (p.size() != config.dim) throw Error(ErrorCode::BadInitial, "initial point has wrong dimension");
      for (double c : p) {
        if (!std::isfinite(c)) throw Error(ErrorCode::BadInitial, "initial point is not finite");
      }
    }
  }
}

bool strict_majority_kept(const RunConfig& config) noexcept { return 2 * config.k < config.n; }

std::pair<double, double> default_oscillation_interval(const Sampler& sampler) {
  const auto& params = sampler.spec().params;
  auto quarter_points = [](double lo, double hi) {
    return std::make_pair(lo + 0.25 * (hi - lo), hi - 0.25 * (hi - lo));
  };
  if (std::holds_alternative<BernoulliParams>(params)) return quarter_points(0.0, 1.0);

  std::vector<double> xs;
  if (const auto* fd = std::get_if<FiniteDiscreteParams>(&params)) {
    for (std::size_t i = 0; i < fd->atoms.size(); ++i) {
      if (fd->weights[i] > 0.0) xs.push_back(fd->atoms[i][0]);
    }
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    if (*lo < *hi) return quarter_points(*lo, *hi);
    return {*lo - 1.0, *lo + 1.0};
  }

  Rng rng(kDefaultsSeed);
  Point p(sampler.dim());
  xs.resize(4096);
  for (auto& x : xs) {
    sampler.draw(rng, p);
    x = p[0];
  }
  std::sort(xs.begin(), xs.end());
  const double q1 = xs[xs.size() / 4];
  const double q3 = xs[3 * xs.size() / 4];
  if (q1 < q3) return {q1, q3};
  return {q1 - 1.0, q1 + 1.0};
}

ClassifyThresholds thresholds_for(const RunConfig& config) {
  ClassifyThresholds th;
  th.tol_f = config.tol_f;
  th.move_window = config.move_window;
  th.tol_move = config.tol_move;
  th.diverge_radius = config.diverge_radius;
  th.oscillation_threshold = config.oscillation_threshold;
  th.zero_energy_absorbing = strict_majority_kept(config);
  const auto interval = config.oscillation_interval
                            ? *config.oscillation_interval
                            : default_oscillation_interval(Sampler(config.dist));
  th.cross_lo = interval.first;
  th.cross_hi = interval.second;
  return th;
}

void MotionWindow::push(std::size_t t, std::span<const double> mu) {
  if (changes_.empty() || !std::equal(mu.begin(), mu.end(), changes_.back().second.begin())) {
    changes_.emplace_back(t, Point(mu.begin(), mu.end()));
  }
  if (t >= window_) {
    const std::size_t start = t - window_;
    while (changes_.size() >= 2 && changes_[1].first <= start) changes_.pop_front();
  }
}

double MotionWindow::displacement() const {
  if (changes_.empty()) return 0.0;
  const auto& current = changes_.back().second;
  double best = 0.0;
  for (const auto& [t, mu] : changes_) best = std::max(best, squared_distance(mu, current));
  return std::sqrt(best);
}

PointConfiguration init_state(const RunConfig& config, const Sampler& sampler, Rng& rng) {
  if (config.initial_points) {
    for (const auto& p : *config.initial_points) {
      if (p.size() != config.dim) throw Error(ErrorCode::BadInitial, "initial point has wrong dimension");
    }
    if (config.initial_points->size() != config.n) {
      throw Error(ErrorCode::BadInitial, "initial_points must contain exactly N points");
    }
    return PointConfiguration::from_points(*config.initial_points);
  }
  std::vector<double> coords(config.n * config.dim);
  for (std::size_t i = 0; i < config.n; ++i) {
    sampler.draw(rng, std::span<double>(coords).subspan(i * config.dim, config.dim));
  }
  return PointConfiguration(config.dim, std::move(coords));
}

std::pair<ProcessState, StepRecord> start(PointConfiguration pool, std::size_t k, Rng& rng,
                                          const SelectOptions& options) {
  auto sel = select_core(pool, k, rng, options);
  auto rec = describe(0, pool.subset(sel.kept), sel);
  rec.min_sample_core_dist = std::numeric_limits<double>::infinity();
  return {ProcessState{std::move(pool), std::move(sel), 0}, std::move(rec)};
}

std::pair<ProcessState, StepRecord> step_with_samples(const ProcessState& state,
                                                      const PointConfiguration& samples, Rng& rng,
                                                      const SelectOptions& options) {
  const std::size_t d = state.pool.dim();
  if (samples.dim() != d) throw Error(ErrorCode::InvalidArgument, "samples have wrong dimension");
  const auto old_core = state.pool.subset(state.core.kept);
  const std::size_t kept = old_core.size();
  const std::size_t k = samples.size();

  std::vector<double> coords(old_core.coords().begin(), old_core.coords().end());
  coords.insert(coords.end(), samples.coords().begin(), samples.coords().end());
  PointConfiguration pool(d, std::move(coords));

  auto sel = select_core(pool, k, rng, options);
  const auto core = pool.subset(sel.kept);
  auto rec = describe(state.t + 1, core, sel);

  rec.all_samples_rejected = true;
  for (std::size_t j = 0; j < k; ++j) {
    if (sel.removed[j] != kept + j) rec.all_samples_rejected = false;
  }
  rec.core_changed = !rec.all_samples_rejected && sorted_points(core) != sorted_points(old_core);

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t c = 0; c < kept; ++c) {
      best = std::min(best, squared_distance(samples.point(s), old_core.point(c)));
    }
  }
  rec.min_sample_core_dist = std::sqrt(best);

  return {ProcessState{std::move(pool), std::move(sel), state.t + 1}, std::move(rec)};
}

std::pair<ProcessState, StepRecord> step(const ProcessState& state, const RunConfig& config,
                                         const Sampler& sampler, Rng& rng) {
  std::vector<double> coords(config.k * config.dim);
  for (std::size_t j = 0; j < config.k; ++j) {
    sampler.draw(rng, std::span<double>(coords).subspan(j * config.dim, config.dim));
  }
  return step_with_samples(state, PointConfiguration(config.dim, std::move(coords)), rng,
                           SelectOptions{config.tie_rel_tol});
}

namespace {

bool settled(const StepRecord& last, double displacement, const ClassifyThresholds& th) {
  if (th.zero_energy_absorbing && last.f == 0.0) return true;
  return last.t >= th.move_window && last.f < th.tol_f && displacement < th.tol_move;
}

}  // namespace

Trajectory run(const RunConfig& config) {
  validate(config);
  const Sampler sampler(config.dist);
  const auto thresholds = thresholds_for(config);
  const SelectOptions options{config.tie_rel_tol};
  Rng rng(config.seed);

  Trajectory traj;
  traj.config = config;
  traj.initial_support_unchecked = config.initial_points.has_value();
  traj.records.reserve(std::min<std::size_t>(config.max_steps + 1, 1U << 20));

  auto [state, rec] = start(init_state(config, sampler, rng), config.k, rng, options);
  MotionWindow motion(config.move_window);
  auto stop_now = [&](const ProcessState& s, const StepRecord& r) {
    motion.push(r.t, r.mu_core);
    if (settled(r, motion.displacement(), thresholds)) return true;
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t i : s.core.kept) nearest = std::min(nearest, squared_norm(s.pool.point(i)));
    return std::sqrt(nearest) > thresholds.diverge_radius;
  };

  bool done = stop_now(state, rec);
  traj.records.push_back(std::move(rec));
  while (!done && state.t < config.max_steps) {
    auto [next, next_rec] = step(state, config, sampler, rng);
    done = stop_now(next, next_rec);
    state = std::move(next);
    traj.records.push_back(std::move(next_rec));
  }

  traj.final_core = state.pool.subset(state.core.kept).points();
  traj.outcome = classify(traj.records, traj.final_core, thresholds);
  return traj;
}

Outcome classify(std::span<const StepRecord> records, std::span<const Point> final_core,
                 const ClassifyThresholds& thresholds) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "cannot classify an empty trajectory");
  const auto& last = records.back();

  Outcome out;
  auto& ev = out.evidence;
  ev.final_f = last.f;
  ev.final_origin_distance = min_norm(final_core);
  ev.steps = last.t;

  CrossingCounter crossings(thresholds.cross_lo, thresholds.cross_hi);
  double displacement2 = 0.0;
  const std::size_t window_start = last.t >= thresholds.move_window ? last.t - thresholds.move_window : 0;
  for (const auto& r : records) {
    crossings.push(r.mu_core[0]);
    if (r.core_changed) ++ev.core_changes;
    if (r.t >= window_start) displacement2 = std::max(displacement2, squared_distance(r.mu_core, last.mu_core));
  }
  ev.crossings = crossings.count();
  ev.window_displacement = std::sqrt(displacement2);

  if (settled(last, ev.window_displacement, thresholds)) {
    out.kind = OutcomeKind::ConvergedToPoint;
    out.phi = last.mu_core;
  } else if (ev.final_origin_distance > thresholds.diverge_radius) {
    out.kind = OutcomeKind::Diverged;
  } else if (ev.crossings >= thresholds.oscillation_threshold) {
    out.kind = OutcomeKind::OscillatingCore;
  } else {
    out.kind = OutcomeKind::Undecided;
  }
  return out;
}

}  // namespace jante
