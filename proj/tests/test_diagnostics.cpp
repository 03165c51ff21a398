#include "doctest.h"

#include <cmath>

#include "jante/diagnostics.hpp"
#include "jante/error.hpp"

using namespace jante;

namespace {

RunConfig config_for(DistributionParams params, std::size_t n, std::size_t k, std::size_t steps,
                     std::uint64_t seed, std::size_t dim = 1) {
  RunConfig cfg;
  cfg.n = n;
  cfg.k = k;
  cfg.dim = dim;
  cfg.dist = DistributionSpec{dim, std::move(params)};
  cfg.max_steps = steps;
  cfg.seed = seed;
  return cfg;
}

StepRecord record(std::size_t t, double f, double d, double mu) {
  StepRecord r;
  r.t = t;
  r.f = f;
  r.d = d;
  r.mu_core = {mu};
  return r;
}

}  // namespace

TEST_CASE("conforming runs produce no violations") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto traj = run(config_for(UniformCubeParams{}, 6, 1, 5000, seed, 2));
    CHECK(check_monotone(traj.records).empty());
    CHECK(check_sandwich(traj.records, 6, 1).empty());
    const auto tally = check_all(traj.records, 6, 1);
    CHECK(tally.monotone == 0);
    CHECK(tally.sandwich == 0);
    REQUIRE(tally.rejection.has_value());
    CHECK(tally.rejection->violations == 0);
  }
}

TEST_CASE("monotonicity negative control") {
  std::vector<StepRecord> recs = {record(0, 1.0, 1.0, 0.0), record(1, 0.5, 1.0, 0.0),
                                  record(2, 0.5 + 2e-9, 1.0, 0.0), record(3, 0.5 + 2e-9, 1.0, 0.0)};
  const auto v = check_monotone(recs);
  REQUIRE(v.size() == 1);
  CHECK(v[0].step == 2);
  CHECK(v[0].invariant == "monotone");
  recs[2].f = 0.5 + 5e-10;
  recs[3].f = 0.5 + 5e-10;
  CHECK(check_monotone(recs).empty());
}

TEST_CASE("sandwich negative controls") {
  // N=5, K=1: sqrt(2F/3) <= D <= sqrt(2F).
  const double f = 1.5;
  std::vector<StepRecord> recs = {record(0, f, 1.5, 0.0), record(1, f, 1.5, 0.0)};
  CHECK(check_sandwich(recs, 5, 1).empty());

  recs[1].d = std::sqrt(2 * f) * (1 + 1e-6);
  auto v = check_sandwich(recs, 5, 1);
  REQUIRE_FALSE(v.empty());
  CHECK(v[0].invariant == "sandwich_upper");
  CHECK(v[0].step == 1);

  recs[1].d = std::sqrt(2 * f / 3) * (1 - 1e-6);
  v = check_sandwich(recs, 5, 1);
  REQUIRE_FALSE(v.empty());
  CHECK(v[0].invariant == "sandwich_lower");

  // Each record is fine on its own; D jumps past sqrt(2F) of the previous step.
  std::vector<StepRecord> jump = {record(0, 0.5, 1.0, 0.0), record(1, 2.0, 2.0, 0.0)};
  v = check_sandwich(jump, 5, 1);
  bool step_bound = false;
  for (const auto& x : v) step_bound = step_bound || x.invariant == "step_bound";
  CHECK(step_bound);
}

TEST_CASE("rejection law is not applicable when 2K >= N") {
  const auto traj = run(config_for(BernoulliParams{0.5}, 4, 2, 100, 1));
  CHECK_FALSE(check_rejection(traj.records, 4, 2).has_value());
  CHECK_FALSE(check_all(traj.records, 4, 2).rejection.has_value());
}

TEST_CASE("Cauchy samples trigger the rejection law without violating it") {
  const auto traj = run(config_for(CauchyParams{}, 5, 1, 10000, 2));
  const auto tally = check_rejection(traj.records, 5, 1);
  REQUIRE(tally.has_value());
  CHECK(tally->triggers > 0);
  CHECK(tally->violations == 0);
}

TEST_CASE("bounded samples trigger the rejection law once the core is small") {
  auto cfg = config_for(UniformCubeParams{}, 5, 1, 10000, 3);
  cfg.tol_f = 1e-30;
  const auto traj = run(cfg);
  REQUIRE(traj.records.back().f < 1e-4);
  const auto tally = check_rejection(traj.records, 5, 1);
  REQUIRE(tally.has_value());
  CHECK(tally->triggers > 0);
  CHECK(tally->violations == 0);
}

TEST_CASE("rejection negative control") {
  std::vector<StepRecord> recs = {record(0, 0.02, 0.2, 0.1), record(1, 0.02, 0.2, 0.1)};
  recs[1].min_sample_core_dist = 10.0;
  recs[1].core_changed = true;
  const auto tally = check_rejection(recs, 4, 1);
  REQUIRE(tally.has_value());
  CHECK(tally->triggers == 1);
  CHECK(tally->violations == 1);
  CHECK(tally->details.at(0).invariant == "rejection");
}

TEST_CASE("drift of a constant trajectory is zero") {
  std::vector<StepRecord> recs;
  for (std::size_t t = 0; t < 50; ++t) recs.push_back(record(t, 0.0, 0.0, 2.5));
  const auto rep = supermartingale_drift(recs, 1, 1, 0.01, -1.0);
  CHECK(rep.mean_delta_h == 0.0);
  CHECK(rep.stderr_delta_h == 0.0);
  CHECK(rep.n_transitions == 49);
}

TEST_CASE("drift with c = 0 is the mean change of sqrt(F)") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto traj = run(config_for(GaussianParams{}, 5, 1, 5000, seed));
    const auto rep = supermartingale_drift(traj.records, 1, 1, 0.0, 0.0);
    CHECK(rep.mean_delta_h <= 0.0);
    const double telescoped = (std::sqrt(traj.records.back().f) - std::sqrt(traj.records.front().f)) /
                              static_cast<double>(traj.records.size() - 1);
    CHECK(rep.mean_delta_h == doctest::Approx(telescoped).epsilon(1e-9));
  }
}

TEST_CASE("Gaussian drift is not significantly positive") {
  std::size_t ok = 0;
  const std::size_t runs = 20;
  for (std::uint64_t seed = 0; seed < runs; ++seed) {
    auto cfg = config_for(GaussianParams{}, 5, 1, 10000, derive_seed(17, seed));
    cfg.tol_f = 1e-30;
    const auto traj = run(cfg);
    const auto rep = supermartingale_drift(traj.records, 1, 1, 0.01, 0.0);
    if (rep.mean_delta_h <= 2 * rep.stderr_delta_h) ++ok;
  }
  CHECK(ok >= 18);
}

TEST_CASE("drift is only defined for d = 1 and K = 1") {
  const std::vector<StepRecord> recs = {record(0, 0, 0, 0), record(1, 0, 0, 0)};
  auto code_of = [&](std::size_t dim, std::size_t k) {
    try {
      supermartingale_drift(recs, dim, k, 0.1, 0.0);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of(2, 1) == ErrorCode::NotApplicable);
  CHECK(code_of(1, 2) == ErrorCode::NotApplicable);
}

TEST_CASE("crossing counts") {
  std::vector<StepRecord> rising;
  for (std::size_t t = 0; t < 100; ++t) rising.push_back(record(t, 0, 0, 0.01 * static_cast<double>(t)));
  CHECK(count_crossings(rising, 0.25, 0.75) <= 1);

  const auto traj = run(config_for(BernoulliParams{0.5}, 4, 2, 10000, 5));
  const auto n = count_crossings(traj.records, 0.25, 0.75);
  CHECK(n >= 50);
  CHECK(n == traj.outcome.evidence.crossings);

  auto cfg = config_for(UniformCubeParams{}, 5, 1, 20000, 6);
  cfg.tol_f = 1e-30;
  const auto conv = run(cfg);
  const double phi = conv.records.back().mu_core[0];
  const std::span<const StepRecord> tail(conv.records.begin() + 5000, conv.records.end());
  const double a = phi < 0.5 ? phi + 0.1 : phi - 0.2;
  CHECK(count_crossings(tail, a, a + 0.1) == 0);
  CHECK_THROWS_AS(count_crossings(tail, 1.0, 1.0), Error);
}

TEST_CASE("batch summaries do not depend on the number of jobs") {
  auto cfg = config_for(UniformCubeParams{}, 5, 1, 2000, 77, 2);
  const auto serial = batch_run(cfg, 12, {}, BatchOptions{1, {}});
  const auto parallel = batch_run(cfg, 12, {}, BatchOptions{4, {}});
  CHECK(serial.n_runs == 12);
  CHECK(serial.f_quantiles == parallel.f_quantiles);
  CHECK(serial.outcome_counts == parallel.outcome_counts);
  REQUIRE(serial.runs.size() == parallel.runs.size());
  for (std::size_t i = 0; i < serial.runs.size(); ++i) {
    CHECK(serial.runs[i].seed == derive_seed(77, i));
    CHECK(serial.runs[i].seed == parallel.runs[i].seed);
    CHECK(serial.runs[i].f_at_checkpoints == parallel.runs[i].f_at_checkpoints);
  }
  CHECK(serial.checkpoints == std::vector<std::size_t>{0, 10, 100, 1000, 2000});
  CHECK(serial.monotone_violations + serial.sandwich_violations + serial.rejection_violations == 0);
  CHECK(serial.rejection_applicable);

  const std::vector<std::uint64_t> seeds = {5, 6};
  const auto explicit_seeds = batch_run(cfg, 2, seeds);
  CHECK(explicit_seeds.runs[1].seed == 6);
}
