#include "jante/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "jante/error.hpp"

namespace jante {

namespace {

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::ConfigError, message);
}

std::size_t size_field(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    config_error(std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double real_field(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) config_error(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

Point point_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) config_error("initial_points entries must be numbers or arrays");
  Point p;
  for (const auto& c : j) {
    if (!c.is_number()) config_error("initial_points coordinates must be numbers");
    p.push_back(c.get<double>());
  }
  return p;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument, "bad number '" + s + "' in trajectory CSV");
  }
  return v;
}

std::size_t parse_size(const std::string& s) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument, "bad integer '" + s + "' in trajectory CSV");
  }
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void apply_overrides(nlohmann::json& config, std::span<const std::string> overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) config_error("override '" + item + "' is not key=value");
    std::string key = item.substr(0, eq);
    const std::string raw = item.substr(eq + 1);
    nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    std::string pointer;
    std::istringstream parts(key);
    std::string part;
    while (std::getline(parts, part, '.')) pointer += "/" + part;
    config[nlohmann::json::json_pointer(pointer)] = value;
  }
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) config_error("config must be a JSON object");
  static const std::vector<std::string> known = {
      "N",        "K",           "dim",           "dist",           "seed",
      "max_steps", "tol_F",      "move_window",   "tol_move",       "diverge_radius",
      "initial_points", "oscillation_interval", "oscillation_threshold", "tie_tolerance",
      "n_runs",   "seeds"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      config_error("unknown config field '" + item.key() + "'");
    }
  }
  for (const char* required : {"N", "K", "dist"}) {
    if (!j.contains(required)) config_error(std::string("missing required field '") + required + "'");
  }

  RunConfig cfg;
  cfg.n = size_field(j, "N");
  cfg.k = size_field(j, "K");
  try {
    cfg.dist = distribution_from_json(j.at("dist"));
  } catch (const Error& e) {
    throw Error(e.code(), std::string("dist: ") + e.what());
  }
  cfg.dim = j.contains("dim") ? size_field(j, "dim") : cfg.dist.dim;
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      config_error("'seed' must be an unsigned 64-bit integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (j.contains("max_steps")) cfg.max_steps = size_field(j, "max_steps");
  if (j.contains("tol_F")) cfg.tol_f = real_field(j, "tol_F");
  if (j.contains("move_window")) cfg.move_window = size_field(j, "move_window");
  if (j.contains("tol_move")) cfg.tol_move = real_field(j, "tol_move");
  if (j.contains("diverge_radius")) cfg.diverge_radius = real_field(j, "diverge_radius");
  if (j.contains("oscillation_threshold")) cfg.oscillation_threshold = size_field(j, "oscillation_threshold");
  if (j.contains("tie_tolerance")) cfg.tie_rel_tol = real_field(j, "tie_tolerance");
  if (j.contains("oscillation_interval") && !j.at("oscillation_interval").is_null()) {
    const auto& iv = j.at("oscillation_interval");
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
      config_error("'oscillation_interval' must be [a, b]");
    }
    cfg.oscillation_interval = std::make_pair(iv[0].get<double>(), iv[1].get<double>());
  }
  if (j.contains("initial_points") && !j.at("initial_points").is_null()) {
    const auto& pts = j.at("initial_points");
    if (!pts.is_array()) config_error("'initial_points' must be an array");
    std::vector<Point> points;
    for (const auto& p : pts) points.push_back(point_from_json(p));
    cfg.initial_points = std::move(points);
  }
  validate(cfg);
  return cfg;
}

nlohmann::json to_json(const RunConfig& config) {
  nlohmann::json j;
  j["N"] = config.n;
  j["K"] = config.k;
  j["dim"] = config.dim;
  j["dist"] = to_json(config.dist);
  j["seed"] = config.seed;
  j["max_steps"] = config.max_steps;
  j["tol_F"] = config.tol_f;
  j["move_window"] = config.move_window;
  j["tol_move"] = config.tol_move;
  j["diverge_radius"] = config.diverge_radius;
  j["initial_points"] = config.initial_points ? nlohmann::json(*config.initial_points) : nlohmann::json(nullptr);
  j["oscillation_interval"] =
      config.oscillation_interval
          ? nlohmann::json{config.oscillation_interval->first, config.oscillation_interval->second}
          : nlohmann::json(nullptr);
  j["oscillation_threshold"] = config.oscillation_threshold;
  j["tie_tolerance"] = config.tie_rel_tol;
  return j;
}

nlohmann::json load_config_json(const std::filesystem::path& path,
                                std::span<const std::string> overrides) {
  nlohmann::json j;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) config_error("cannot open config file '" + path.string() + "'");
    j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) config_error("config file '" + path.string() + "' is not valid JSON");
  } else {
    j = nlohmann::json::object();
  }
  try {
    apply_overrides(j, overrides);
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("bad override: ") + e.what());
  }
  return j;
}

RunConfig parse_config(const std::filesystem::path& path, std::span<const std::string> overrides) {
  return run_config_from_json(load_config_json(path, overrides));
}

void write_trajectory_csv(std::ostream& os, std::span<const StepRecord> records, std::size_t dim,
                          std::size_t thin) {
  if (thin == 0) thin = 1;
  os << "t,F,D";
  for (std::size_t c = 0; c < dim; ++c) os << ",mu_" << c;
  os << ",core_changed,rejected,tie_count,min_sample_dist\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i % thin != 0 && i + 1 != records.size()) continue;
    const auto& r = records[i];
    os << r.t << ',' << format_double(r.f) << ',' << format_double(r.d);
    for (double m : r.mu_core) os << ',' << format_double(m);
    os << ',' << (r.core_changed ? 1 : 0) << ',' << (r.all_samples_rejected ? 1 : 0) << ','
       << r.tie_count << ',' << format_double(r.min_sample_core_dist) << '\n';
  }
}

std::vector<StepRecord> read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::InvalidArgument, "trajectory CSV is empty");
  const auto header = split(line, ',');
  if (header.size() < 8 || header[0] != "t" || header[1] != "F" || header[2] != "D") {
    throw Error(ErrorCode::InvalidArgument, "unexpected trajectory CSV header");
  }
  const std::size_t dim = header.size() - 7;
  std::vector<StepRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) throw Error(ErrorCode::InvalidArgument, "ragged trajectory CSV row");
    StepRecord r;
    r.t = parse_size(cells[0]);
    r.f = parse_double(cells[1]);
    r.d = parse_double(cells[2]);
    for (std::size_t c = 0; c < dim; ++c) r.mu_core.push_back(parse_double(cells[3 + c]));
    r.core_changed = cells[3 + dim] == "1";
    r.all_samples_rejected = cells[4 + dim] == "1";
    r.tie_count = parse_size(cells[5 + dim]);
    r.min_sample_core_dist = parse_double(cells[6 + dim]);
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json to_json(const Outcome& outcome) {
  const auto& ev = outcome.evidence;
  return {{"kind", to_string(outcome.kind)},
          {"phi", outcome.phi ? nlohmann::json(*outcome.phi) : nlohmann::json(nullptr)},
          {"evidence",
           {{"final_F", ev.final_f},
            {"final_origin_distance", ev.final_origin_distance},
            {"window_displacement", ev.window_displacement},
            {"crossings", ev.crossings},
            {"core_changes", ev.core_changes},
            {"steps", ev.steps}}}};
}

nlohmann::json to_json(const InvariantTally& tally) {
  nlohmann::json j;
  j["monotone_violations"] = tally.monotone;
  j["sandwich_violations"] = tally.sandwich;
  if (tally.rejection) {
    j["rejection"] = {{"triggers", tally.rejection->triggers}, {"violations", tally.rejection->violations}};
  } else {
    j["rejection"] = "NotApplicable";
  }
  return j;
}

nlohmann::json to_json(const DriftReport& report) {
  return {{"c", report.c},
          {"R_plus", report.r_plus},
          {"n_transitions", report.n_transitions},
          {"mean_delta_h", report.mean_delta_h},
          {"stderr", report.stderr_delta_h},
          {"window", report.window}};
}

nlohmann::json run_summary_json(const Trajectory& traj) {
  const auto th = thresholds_for(traj.config);
  nlohmann::json j;
  j["config"] = to_json(traj.config);
  j["outcome"] = to_json(traj.outcome);
  j["oscillation_interval"] = {th.cross_lo, th.cross_hi};
  j["assumption_2K_lt_N"] = strict_majority_kept(traj.config);
  j["initial_support_unchecked"] = traj.initial_support_unchecked;
  j["n_records"] = traj.records.size();
  j["final_core"] = traj.final_core;
  j["invariants"] = to_json(check_all(traj.records, traj.config.n, traj.config.k));
  return j;
}

nlohmann::json to_json(const RunSummary& summary) {
  return {{"run_id", summary.run_id},
          {"seed", summary.seed},
          {"outcome", to_json(summary.outcome)},
          {"invariants", to_json(summary.invariants)},
          {"time_to_tol_F", summary.time_to_tol_f ? nlohmann::json(*summary.time_to_tol_f) : nlohmann::json(nullptr)},
          {"F_at_checkpoints", summary.f_at_checkpoints}};
}

nlohmann::json to_json(const BatchSummary& summary) {
  nlohmann::json j;
  j["n_runs"] = summary.n_runs;
  j["outcome_counts"] = nlohmann::json::object();
  for (auto kind : {OutcomeKind::ConvergedToPoint, OutcomeKind::Diverged, OutcomeKind::OscillatingCore,
                    OutcomeKind::Undecided}) {
    const auto it = summary.outcome_counts.find(kind);
    j["outcome_counts"][to_string(kind)] = it == summary.outcome_counts.end() ? 0 : it->second;
  }
  j["F_quantiles_at_checkpoints"] = {{"checkpoints", summary.checkpoints},
                                     {"levels", summary.quantile_levels},
                                     {"values", summary.f_quantiles}};
  j["mean_time_to_tol_F"] = summary.mean_time_to_tol_f ? nlohmann::json(*summary.mean_time_to_tol_f)
                                                       : nlohmann::json(nullptr);
  nlohmann::json counts = {{"monotone", summary.monotone_violations},
                           {"sandwich", summary.sandwich_violations}};
  if (summary.rejection_applicable) {
    counts["rejection"] = summary.rejection_violations;
    counts["rejection_triggers"] = summary.rejection_triggers;
  } else {
    counts["rejection"] = "NotApplicable";
  }
  j["violation_counts"] = counts;
  return j;
}

void write_violations_csv(std::ostream& os, std::span<const RunViolation> violations) {
  os << "run_id,step,invariant,lhs,rhs\n";
  for (const auto& v : violations) {
    os << v.run_id << ',' << v.violation.step << ',' << v.violation.invariant << ','
       << format_double(v.violation.lhs) << ',' << format_double(v.violation.rhs) << '\n';
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path.string() + "'");
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::InvalidArgument, "'" + path.string() + "' is not valid JSON");
  return j;
}

}  // namespace jante
