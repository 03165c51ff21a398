// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance [--criterion N] [--cli PATH] [--workdir DIR] [--jobs J]

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "jante/core_select.hpp"
#include "jante/diagnostics.hpp"
#include "jante/distributions.hpp"
#include "jante/engine.hpp"
#include "jante/io.hpp"

namespace fs = std::filesystem;
using namespace jante;

namespace {

// Tolerances and sizes, fixed by the criteria.
constexpr double kFixtureEnergyTol = 1e-12;
constexpr std::size_t kFurthestConfigs = 10000;
constexpr std::size_t kOracleConfigs = 1000;
constexpr std::size_t kBatchSeeds = 100;
constexpr std::size_t kLongRun = 100000;
constexpr double kUniformConvergedShare = 0.95;
constexpr double kUniformFinalF = 1e-10;
constexpr std::size_t kBernoulliSteps = 10000;
constexpr double kFlipRelTol = 0.20;
constexpr double kCauchyConvergedShare = 0.90;
constexpr std::size_t kCantorSeeds = 50;
constexpr double kCantorConvergedShare = 0.90;
constexpr int kCantorDigits = 20;
constexpr double kTailBound = 1.1;
constexpr std::size_t kTailSamples = 1000000;
constexpr double kRegularityTol = 0.05;
constexpr std::size_t kRegularitySamples = 100000;

struct Context {
  std::string cli;
  fs::path workdir;
  std::size_t jobs = 1;
};

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) { return format_double(x); }

double gaussian(Rng& rng) {
  const double r = std::sqrt(-2.0 * std::log(rng.uniform_open()));
  return r * std::cos(6.283185307179586 * rng.uniform());
}

PointConfiguration random_configuration(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<double> coords(n * d);
  for (auto& c : coords) c = gaussian(rng);
  return PointConfiguration(d, std::move(coords));
}

std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

RunConfig base_config(std::size_t n, std::size_t k, std::size_t dim, DistributionParams params,
                      std::uint64_t seed, std::size_t steps) {
  RunConfig cfg;
  cfg.n = n;
  cfg.k = k;
  cfg.dim = dim;
  cfg.dist = DistributionSpec{dim, std::move(params)};
  cfg.seed = seed;
  cfg.max_steps = steps;
  return cfg;
}

Result five_point_fixture(const Context&) {
  Rng rng(1);
  const auto cfg = PointConfiguration::from_scalars(std::vector<double>{-24, -19, -14, 28, 29});
  const auto sel = select_core(cfg, 3, rng);
  std::vector<double> kept;
  for (std::size_t i : sel.kept) kept.push_back(cfg.point(i)[0]);
  std::sort(kept.begin(), kept.end());
  const bool ok = kept == std::vector<double>{28, 29} && std::abs(sel.core_energy - 0.5) <= kFixtureEnergyTol;
  return {ok, "kept={" + fmt(kept.at(0)) + "," + fmt(kept.at(1)) + "} energy=" + fmt(sel.core_energy)};
}

Result furthest_point_equivalence(const Context&) {
  Rng gen(0x4c656d6d61);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < kFurthestConfigs; ++i) {
    const std::size_t n = between(gen, 3, 12);
    const std::size_t d = between(gen, 1, 3);
    const auto cfg = random_configuration(gen, n, d);
    const std::uint64_t seed = gen();
    Rng a(seed);
    Rng b(seed);
    if (select_core(cfg, 1, a).removed != furthest_point_core(cfg, b).removed) ++mismatches;
  }
  return {mismatches == 0, "configurations=" + std::to_string(kFurthestConfigs) + " mismatches=" + std::to_string(mismatches)};
}

// Rebuilds every candidate core from scratch and scores it with the same
// energy routine select_core reports.
Result oracle_equivalence(const Context&) {
  Rng gen(0x4f7261636c65);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < kOracleConfigs; ++i) {
    const std::size_t n = between(gen, 3, 10);
    const std::size_t k = between(gen, 1, std::min<std::size_t>(4, n - 2));
    const std::size_t d = between(gen, 1, 3);
    const auto cfg = random_configuration(gen, n, d);
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != n - k) continue;
      std::vector<std::size_t> kept;
      for (std::size_t j = 0; j < n; ++j) {
        if (mask & (1U << j)) kept.push_back(j);
      }
      best = std::min(best, energy(cfg.subset(kept)));
    }
    Rng rng(gen());
    const auto sel = select_core(cfg, k, rng);
    if (sel.core_energy != best || energy(cfg.subset(sel.kept)) != best) ++mismatches;
  }
  return {mismatches == 0, "configurations=" + std::to_string(kOracleConfigs) + " mismatches=" + std::to_string(mismatches)};
}

Result invariant_suite(const Context& ctx) {
  const auto cfg = base_config(6, 1, 2, UniformCubeParams{}, 0x496e76, kLongRun);
  const auto s = batch_run(cfg, kBatchSeeds, {}, BatchOptions{ctx.jobs, {}});
  const bool ok = s.monotone_violations == 0 && s.sandwich_violations == 0 && s.rejection_applicable &&
                  s.rejection_violations == 0 && s.rejection_triggers > 0;
  return {ok, "runs=" + std::to_string(s.n_runs) + " monotone=" + std::to_string(s.monotone_violations) +
                  " sandwich=" + std::to_string(s.sandwich_violations) +
                  " rejection=" + std::to_string(s.rejection_violations) +
                  " rejection_triggers=" + std::to_string(s.rejection_triggers)};
}

Result uniform_convergence(const Context& ctx) {
  bool ok = true;
  std::ostringstream detail;
  for (std::size_t d : {1, 2, 3}) {
    for (std::size_t n : {5, 8}) {
      for (std::size_t k : {1, 2}) {
        auto cfg = base_config(n, k, d, UniformCubeParams{}, 0x556e69 + 100 * d + 10 * n + k, kLongRun);
        cfg.tol_f = kUniformFinalF;
        std::size_t good = 0;
        double worst_f = 0.0;
        const auto s = batch_run(cfg, kBatchSeeds, {}, BatchOptions{ctx.jobs, {}});
        for (const auto& r : s.runs) {
          worst_f = std::max(worst_f, r.outcome.evidence.final_f);
          if (r.outcome.kind == OutcomeKind::ConvergedToPoint && r.outcome.evidence.final_f < kUniformFinalF) ++good;
        }
        const bool cell = static_cast<double>(good) >= kUniformConvergedShare * kBatchSeeds;
        ok = ok && cell;
        const std::size_t median_idx = s.f_quantiles.size() - 1;
        std::printf("#   d=%zu N=%zu K=%zu converged=%zu/%zu median_final_F=%s max_final_F=%s %s\n", d, n, k,
                    good, kBatchSeeds, fmt(s.f_quantiles[median_idx][2]).c_str(), fmt(worst_f).c_str(),
                    cell ? "ok" : "short");
        std::fflush(stdout);
        detail << (detail.tellp() > 0 ? " " : "") << "d" << d << "N" << n << "K" << k << "=" << good;
      }
    }
  }
  return {ok, detail.str()};
}

// One-step switch probability of the two-atom chain with N=4, K=2, p=1/2.
// The core is always a pair of equal atoms; the pool adds two fresh atoms and
// the new core is a uniformly chosen minimum-energy pair.
double bernoulli_switch_probability() {
  double p = 0.0;
  for (int s1 : {0, 1}) {
    for (int s2 : {0, 1}) {
      const int pool[4] = {0, 0, s1, s2};
      int best = std::numeric_limits<int>::max();
      int ties = 0;
      int switched = 0;
      for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
          const int e = (pool[i] - pool[j]) * (pool[i] - pool[j]);
          if (e < best) {
            best = e;
            ties = 0;
            switched = 0;
          }
          if (e == best) {
            ++ties;
            if (pool[i] == 1 && pool[j] == 1) ++switched;
          }
        }
      }
      p += 0.25 * switched / ties;
    }
  }
  return p;
}

Result bernoulli_oscillation(const Context& ctx) {
  const double expected = static_cast<double>(kBernoulliSteps) * bernoulli_switch_probability();
  const auto cfg = base_config(4, 2, 1, BernoulliParams{0.5}, 0x4265726e, kBernoulliSteps);
  std::vector<std::size_t> flips(kBatchSeeds, 0);
  BatchOptions opts{ctx.jobs, [&](std::size_t i, const Trajectory& traj) {
                      std::size_t n = 0;
                      for (std::size_t t = 1; t < traj.records.size(); ++t) {
                        const double a = traj.records[t - 1].mu_core[0];
                        const double b = traj.records[t].mu_core[0];
                        if ((a == 0.0 && b == 1.0) || (a == 1.0 && b == 0.0)) ++n;
                      }
                      flips[i] = n;
                    }};
  const auto s = batch_run(cfg, kBatchSeeds, {}, opts);
  const auto it = s.outcome_counts.find(OutcomeKind::OscillatingCore);
  const std::size_t oscillating = it == s.outcome_counts.end() ? 0 : it->second;
  double mean = 0.0;
  for (std::size_t f : flips) mean += static_cast<double>(f);
  mean /= static_cast<double>(kBatchSeeds);
  const bool ok = oscillating == kBatchSeeds && std::abs(mean - expected) <= kFlipRelTol * expected;
  return {ok, "oscillating=" + std::to_string(oscillating) + "/" + std::to_string(kBatchSeeds) +
                  " mean_flips=" + fmt(mean) + " oracle=" + fmt(expected)};
}

std::size_t converged_count(const BatchSummary& s) {
  const auto it = s.outcome_counts.find(OutcomeKind::ConvergedToPoint);
  return it == s.outcome_counts.end() ? 0 : it->second;
}

std::string outcome_breakdown(const BatchSummary& s) {
  std::string out;
  for (const auto& [kind, count] : s.outcome_counts) {
    out += std::string(" ") + to_string(kind) + "=" + std::to_string(count);
  }
  return out;
}

Result cauchy_convergence(const Context& ctx) {
  const auto cfg = base_config(5, 1, 1, CauchyParams{}, 0x436175, kLongRun);
  const auto s = batch_run(cfg, kBatchSeeds, {}, BatchOptions{ctx.jobs, {}});
  const std::size_t violations = s.monotone_violations + s.sandwich_violations + s.rejection_violations;
  std::vector<double> final_f;
  for (const auto& r : s.runs) final_f.push_back(r.outcome.evidence.final_f);
  std::sort(final_f.begin(), final_f.end());
  const bool ok = static_cast<double>(converged_count(s)) >= kCauchyConvergedShare * kBatchSeeds && violations == 0;
  return {ok, "converged=" + std::to_string(converged_count(s)) + "/" + std::to_string(kBatchSeeds) +
                  outcome_breakdown(s) + " median_final_F=" + fmt(final_f[final_f.size() / 2]) +
                  " violations=" + std::to_string(violations)};
}

bool has_ternary_one(double x, int depth) {
  const double scaled = std::floor(x * std::pow(3.0, depth));
  auto v = static_cast<std::uint64_t>(scaled);
  for (int i = 0; i < depth; ++i, v /= 3) {
    if (v % 3 == 1) return true;
  }
  return false;
}

Result cantor_convergence(const Context& ctx) {
  const auto cfg = base_config(5, 1, 1, CantorParams{}, 0x43616e, kLongRun);
  const auto s = batch_run(cfg, kCantorSeeds, {}, BatchOptions{ctx.jobs, {}});
  std::size_t bad_digits = 0;
  std::vector<double> final_f;
  for (const auto& r : s.runs) {
    final_f.push_back(r.outcome.evidence.final_f);
    if (r.outcome.phi && has_ternary_one((*r.outcome.phi)[0], kCantorDigits)) ++bad_digits;
  }
  std::sort(final_f.begin(), final_f.end());
  const bool ok = static_cast<double>(converged_count(s)) >= kCantorConvergedShare * kCantorSeeds && bad_digits == 0;
  return {ok, "converged=" + std::to_string(converged_count(s)) + "/" + std::to_string(kCantorSeeds) +
                  outcome_breakdown(s) + " median_final_F=" + fmt(final_f[final_f.size() / 2]) +
                  " phi_with_digit_1=" + std::to_string(bad_digits)};
}

Result assumption_checkers(const Context&) {
  std::vector<std::pair<double, double>> grid;
  for (double a : {0.0, 0.5, 1.0, 2.0, 3.0}) {
    for (double u : {0.25, 0.5, 1.0}) grid.emplace_back(a, u);
  }
  Rng tail_rng(0x5461696c);
  const auto tail = estimate_tail_constant(Sampler(DistributionSpec{1, ExponentialParams{1.0}}), 0.0, -1.0, grid,
                                           kTailSamples, tail_rng);

  // Uniform[0,1]: the inner/outer conditional mass is a ratio of clipped interval lengths.
  auto clipped = [](double x, double r) { return std::min(1.0, x + r) - std::max(0.0, x - r); };
  const double delta = 0.5;
  const std::vector<double> radii = {0.05, 0.1, 0.2};
  const std::vector<Point> probes = {{0.25}, {0.5}, {0.75}};
  double exact = 1.0;
  for (const auto& x : probes) {
    for (double r : radii) exact = std::min(exact, clipped(x[0], r * delta) / clipped(x[0], r));
  }
  Rng reg_rng(0x52656775);
  const auto reg = estimate_regularity(Sampler(DistributionSpec{1, UniformCubeParams{}}), Ball{{0.5}, 0.5}, delta,
                                       radii, probes, kRegularitySamples, reg_rng);
  const bool ok = tail.c_hat <= kTailBound && std::abs(reg.sigma_hat - exact) <= kRegularityTol;
  return {ok, "tail_C_hat=" + fmt(tail.c_hat) + " sigma_hat=" + fmt(reg.sigma_hat) + " closed_form=" + fmt(exact)};
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    const auto rel = fs::relative(entry.path(), root).generic_string();
    if (entry.is_directory()) {
      files[rel + "/"] = "";
    } else {
      std::ifstream in(entry.path(), std::ios::binary);
      files[rel] = std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
  }
  return files;
}

Result reproducibility(const Context& ctx) {
  if (ctx.cli.empty()) return {false, "no --cli given"};
  const fs::path dir = ctx.workdir / "reproducibility";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path config = dir / "config.json";
  std::ofstream(config) << R"({"N":6,"K":1,"dim":2,"dist":{"family":"Cauchy","dim":2},)"
                        << R"("seed":2024,"max_steps":3000,"n_runs":8})" << "\n";
  const std::string jobs = std::to_string(std::max<std::size_t>(ctx.jobs, 2));
  for (const char* name : {"a", "b"}) {
    const std::string cmd = quote(ctx.cli) + " batch --config " + quote(config) + " --out " + quote(dir / name) +
                            " --jobs " + jobs + " --trajectories > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, std::string("batch invocation ") + name + " failed"};
  }
  const auto a = read_tree(dir / "a");
  const auto b = read_tree(dir / "b");
  std::size_t bytes = 0;
  for (const auto& [name, text] : a) bytes += text.size();
  return {a == b && !a.empty(), "files=" + std::to_string(a.size()) + " bytes=" + std::to_string(bytes) +
                                    (a == b ? " identical" : " differ")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  Context ctx;
  ctx.workdir = fs::temp_directory_path() / "jante_acceptance";
  ctx.jobs = std::max(1U, std::thread::hardware_concurrency());
  std::string workdir = ctx.workdir.string();
  app.add_option("--criterion", only, "Run a single criterion (1-10)")->check(CLI::Range(1, 10));
  app.add_option("--cli", ctx.cli, "Path to the jante executable");
  app.add_option("--workdir", workdir, "Scratch directory");
  app.add_option("--jobs", ctx.jobs, "Worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  ctx.workdir = workdir;

  const std::vector<std::pair<const char*, std::function<Result(const Context&)>>> criteria = {
      {"fixed five-point core", five_point_fixture},
      {"K=1 furthest-point equivalence", furthest_point_equivalence},
      {"exhaustive oracle equivalence", oracle_equivalence},
      {"invariant suite", invariant_suite},
      {"uniform cube convergence", uniform_convergence},
      {"Bernoulli oscillation", bernoulli_oscillation},
      {"Cauchy convergence", cauchy_convergence},
      {"Cantor convergence", cantor_convergence},
      {"assumption checkers", assumption_checkers},
      {"batch reproducibility", reproducibility},
  };

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<std::size_t>(only) != i + 1) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = criteria[i].second(ctx);
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %zu %s: %s  %s (%.1fs)\n", i + 1, criteria[i].first, r.pass ? "PASS" : "FAIL",
                r.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
