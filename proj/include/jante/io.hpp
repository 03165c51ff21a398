#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "jante/diagnostics.hpp"
#include "jante/engine.hpp"

namespace jante {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// Applies `key=value` overrides to a config object. The value is parsed as
/// JSON when possible and taken as a string otherwise; dotted keys address
/// nested fields ("dist.params.p=0.3"). Throws ConfigError.
void apply_overrides(nlohmann::json& config, std::span<const std::string> overrides);

/// Strict: unknown keys are a ConfigError. "n_runs" and "seeds" are accepted
/// and ignored (they belong to batch invocations).
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);

/// Reads the JSON file, applies overrides last, validates.
RunConfig parse_config(const std::filesystem::path& path, std::span<const std::string> overrides);
nlohmann::json load_config_json(const std::filesystem::path& path,
                                std::span<const std::string> overrides);

/// Header: t,F,D,mu_0..mu_{d-1},core_changed,rejected,tie_count,min_sample_dist.
/// Every `thin`-th record is written, plus the last one.
void write_trajectory_csv(std::ostream& os, std::span<const StepRecord> records, std::size_t dim,
                          std::size_t thin = 1);
std::vector<StepRecord> read_trajectory_csv(std::istream& is);

nlohmann::json to_json(const Outcome& outcome);
nlohmann::json to_json(const InvariantTally& tally);
nlohmann::json to_json(const DriftReport& report);

/// Config echo, outcome, invariant tallies and the 2K < N flag.
nlohmann::json run_summary_json(const Trajectory& traj);
nlohmann::json to_json(const RunSummary& summary);
nlohmann::json to_json(const BatchSummary& summary);

/// run_id,step,invariant,lhs,rhs
void write_violations_csv(std::ostream& os, std::span<const RunViolation> violations);

/// Serialized with a trailing newline and two-space indent.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace jante
