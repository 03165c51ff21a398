// Command-line driver: run | batch | verify | check-dist.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "jante/diagnostics.hpp"
#include "jante/distributions.hpp"
#include "jante/error.hpp"
#include "jante/io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitVerify = 3;

struct Options {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::size_t thin = 1;
  bool trajectories = false;
  std::string verify_dir;
};

std::vector<std::string> effective_overrides(const Options& opt) {
  auto out = opt.overrides;
  if (opt.seed) out.push_back("seed=" + std::to_string(*opt.seed));
  return out;
}

void write_run_dir(const fs::path& dir, const jante::Trajectory& traj, std::size_t thin) {
  fs::create_directories(dir);
  std::ofstream csv(dir / "trajectory.csv");
  jante::write_trajectory_csv(csv, traj.records, traj.config.dim, thin);
  auto summary = jante::run_summary_json(traj);
  summary["thin"] = thin;
  jante::write_json_file(dir / "summary.json", summary);
}

int cmd_run(const Options& opt) {
  const auto cfg = jante::parse_config(opt.config_path, effective_overrides(opt));
  const auto traj = jante::run(cfg);
  write_run_dir(opt.out_dir, traj, opt.thin);
  std::cout << jante::to_string(traj.outcome.kind) << " after " << traj.outcome.evidence.steps
            << " steps, F=" << jante::format_double(traj.outcome.evidence.final_f) << '\n';
  return kExitOk;
}

int cmd_batch(const Options& opt) {
  const auto json = jante::load_config_json(opt.config_path, effective_overrides(opt));
  const auto cfg = jante::run_config_from_json(json);
  std::size_t n_runs = 1;
  std::vector<std::uint64_t> seeds;
  if (json.contains("seeds")) {
    if (!json.at("seeds").is_array()) throw jante::Error(jante::ErrorCode::ConfigError, "'seeds' must be an array");
    for (const auto& s : json.at("seeds")) {
      if (!s.is_number_unsigned()) throw jante::Error(jante::ErrorCode::ConfigError, "seeds must be unsigned integers");
      seeds.push_back(s.get<std::uint64_t>());
    }
    n_runs = seeds.size();
  }
  if (json.contains("n_runs")) {
    const auto& n = json.at("n_runs");
    if (!n.is_number_unsigned() || n.get<std::size_t>() == 0) {
      throw jante::Error(jante::ErrorCode::ConfigError, "'n_runs' must be a positive integer");
    }
    n_runs = n.get<std::size_t>();
  }
  if (!seeds.empty() && seeds.size() != n_runs) {
    throw jante::Error(jante::ErrorCode::ConfigError, "'seeds' length must equal 'n_runs'");
  }

  const fs::path out = opt.out_dir;
  fs::create_directories(out / "runs");
  jante::BatchOptions bopt;
  bopt.jobs = opt.jobs;
  if (opt.trajectories) {
    bopt.on_trajectory = [&](std::size_t id, const jante::Trajectory& traj) {
      char name[32];
      std::snprintf(name, sizeof(name), "run_%04zu", id);
      write_run_dir(out / "runs" / name, traj, opt.thin);
    };
  }
  const auto summary = jante::batch_run(cfg, n_runs, seeds, bopt);

  auto j = jante::to_json(summary);
  j["config"] = jante::to_json(cfg);
  j["assumption_2K_lt_N"] = jante::strict_majority_kept(cfg);
  jante::write_json_file(out / "batch_summary.json", j);
  for (const auto& r : summary.runs) {
    char name[32];
    std::snprintf(name, sizeof(name), "run_%04zu.json", r.run_id);
    jante::write_json_file(out / "runs" / name, jante::to_json(r));
  }
  std::ofstream vcsv(out / "violations.csv");
  jante::write_violations_csv(vcsv, summary.violations);

  for (const auto& [kind, count] : summary.outcome_counts) {
    std::cout << jante::to_string(kind) << ": " << count << '\n';
  }
  return kExitOk;
}

// Returns the number of violations found under `dir`.
std::size_t verify_trajectory_dir(const fs::path& dir, nlohmann::json& report) {
  const auto summary = jante::read_json_file(dir / "summary.json");
  const auto& cfg = summary.at("config");
  const auto n = cfg.at("N").get<std::size_t>();
  const auto k = cfg.at("K").get<std::size_t>();
  std::ifstream in(dir / "trajectory.csv");
  if (!in) throw jante::Error(jante::ErrorCode::InvalidArgument, "missing trajectory.csv in " + dir.string());
  const auto records = jante::read_trajectory_csv(in);
  const auto tally = jante::check_all(records, n, k);
  std::size_t bad = tally.monotone + tally.sandwich + (tally.rejection ? tally.rejection->violations : 0);
  report[dir.string()] = jante::to_json(tally);
  return bad;
}

int cmd_verify(const Options& opt) {
  const fs::path dir = opt.verify_dir;
  nlohmann::json report = nlohmann::json::object();
  std::size_t bad = 0;
  bool found = false;
  if (fs::exists(dir / "trajectory.csv")) {
    found = true;
    bad += verify_trajectory_dir(dir, report);
  }
  if (fs::exists(dir / "batch_summary.json")) {
    found = true;
    const auto summary = jante::read_json_file(dir / "batch_summary.json");
    const auto& counts = summary.at("violation_counts");
    bad += counts.at("monotone").get<std::size_t>() + counts.at("sandwich").get<std::size_t>();
    if (counts.at("rejection").is_number()) bad += counts.at("rejection").get<std::size_t>();
    report["batch_summary"] = counts;
    if (fs::exists(dir / "runs")) {
      std::vector<fs::path> subdirs;
      for (const auto& entry : fs::directory_iterator(dir / "runs")) {
        if (entry.is_directory() && fs::exists(entry.path() / "trajectory.csv")) subdirs.push_back(entry.path());
      }
      std::sort(subdirs.begin(), subdirs.end());
      for (const auto& sub : subdirs) bad += verify_trajectory_dir(sub, report);
    }
  }
  if (!found) {
    throw jante::Error(jante::ErrorCode::InvalidArgument, "no trajectory.csv or batch_summary.json in " + dir.string());
  }
  report["total_violations"] = bad;
  std::cout << report.dump(2) << '\n';
  return bad == 0 ? kExitOk : kExitVerify;
}

std::vector<double> numbers(const nlohmann::json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(x.get<double>());
  return out;
}

int cmd_check_dist(const Options& opt) {
  const auto json = jante::load_config_json(opt.config_path, effective_overrides(opt));
  if (!json.contains("dist")) throw jante::Error(jante::ErrorCode::ConfigError, "missing 'dist'");
  const jante::Sampler sampler(jante::distribution_from_json(json.at("dist")));
  const std::uint64_t seed = json.value("seed", std::uint64_t{0});
  const std::size_t n_samples = json.value("n_samples", std::size_t{100000});

  nlohmann::json out;
  out["dist"] = jante::to_json(sampler.spec());
  out["seed"] = seed;
  if (json.contains("regularity")) {
    const auto& r = json.at("regularity");
    jante::Ball region;
    region.center = r.at("region").at("center").get<std::vector<double>>();
    region.radius = r.at("region").at("radius").get<double>();
    std::vector<jante::Point> probes;
    for (const auto& p : r.at("probes")) {
      probes.push_back(p.is_number() ? jante::Point{p.get<double>()} : p.get<jante::Point>());
    }
    const auto radii = numbers(r.at("radii"));
    jante::Rng rng(jante::derive_seed(seed, 0));
    out["regularity"] = jante::to_json(jante::estimate_regularity(
        sampler, region, r.at("delta").get<double>(), radii, probes, n_samples, rng));
  }
  if (json.contains("tail")) {
    const auto& t = json.at("tail");
    std::vector<std::pair<double, double>> grid;
    for (const auto& g : t.at("grid")) grid.emplace_back(g.at(0).get<double>(), g.at(1).get<double>());
    jante::Rng rng(jante::derive_seed(seed, 1));
    out["tail"] = jante::to_json(jante::estimate_tail_constant(
        sampler, t.at("R_plus").get<double>(), t.at("R_minus").get<double>(), grid, n_samples, rng));
  }
  if (!out.contains("regularity") && !out.contains("tail")) {
    throw jante::Error(jante::ErrorCode::ConfigError, "config needs a 'regularity' or 'tail' section");
  }
  fs::create_directories(opt.out_dir);
  jante::write_json_file(fs::path(opt.out_dir) / "check_dist.json", out);
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and invariant checker for the Jante's-law core process"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON config file");
    sub->add_option("--out", opt.out_dir, "Output directory");
    sub->add_option("--seed", opt.seed, "Override the config seed");
    sub->add_option("--set", opt.overrides, "Override a config field, key=value (repeatable)");
  };

  auto* run = app.add_subcommand("run", "Run one trajectory; writes trajectory.csv and summary.json");
  add_common(run);
  run->add_option("--thin", opt.thin, "Write every n-th record")->check(CLI::PositiveNumber);

  auto* batch = app.add_subcommand("batch", "Run many seeds; writes batch_summary.json and per-run summaries");
  add_common(batch);
  batch->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
  batch->add_option("--thin", opt.thin, "Trajectory stride with --trajectories")->check(CLI::PositiveNumber);
  batch->add_flag("--trajectories", opt.trajectories, "Also write runs/run_NNNN/trajectory.csv");

  auto* verify = app.add_subcommand("verify", "Re-check invariants of a run or batch output directory");
  verify->add_option("dir", opt.verify_dir, "Directory produced by run or batch")->required();

  auto* check = app.add_subcommand("check-dist", "Empirical regularity / tail-constant checks");
  add_common(check);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(opt);
    if (*batch) return cmd_batch(opt);
    if (*verify) return cmd_verify(opt);
    return cmd_check_dist(opt);
  } catch (const jante::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case jante::ErrorCode::ConfigError:
      case jante::ErrorCode::InvalidK:
      case jante::ErrorCode::BadInitial:
      case jante::ErrorCode::InvalidDistribution:
        return kExitConfig;
      default:
        return kExitRuntime;
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
