#pragma once

#include "hpmd/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hpmd {

inline constexpr const char* kOutputRootEnv = "HPMD_OUTPUT_ROOT";

struct CommandOptions {
    std::string out_dir;                      ///< overrides config.output_dir
    std::optional<int> threads;
    std::optional<std::uint64_t> seed_override;
};

struct RunOutput {
    BuiltEnvironment env;
    RunResult result;
    nlohmann::json manifest;
    std::string out_dir;  ///< empty when nothing was written
};

/// Runs one configuration in memory (deterministic or stochastic by schedule).
RunOutput execute_run(const RunConfig& cfg, int threads);

/// Manifest: config echo, environment fingerprint, optimality summary, theory
/// constants, flags, seed and kappa.
nlohmann::json build_manifest(const RunConfig& cfg, const BuiltEnvironment& env, const RunResult& result);

/// Writes trace.csv, snapshots.csv, timing.csv and manifest.json into dir.
void write_run_outputs(const RunOutput& out, const std::string& dir);

/// Output directory: explicit option, then config, then $HPMD_OUTPUT_ROOT/<leaf>, then ./hpmd_out/<leaf>.
std::string resolve_output_dir(const CommandOptions& opts, const RunConfig& cfg, const std::string& leaf);

RunOutput cmd_run(const nlohmann::json& config, const CommandOptions& opts);

struct SweepOutput {
    std::vector<RunOutput> runs;
    std::string aggregate_csv;
    std::string out_dir;
};

/// One run per seed (seed_<n>/ subdirectories) plus aggregate.csv with the
/// mean and 10/50/90% quantiles per iteration.
SweepOutput cmd_sweep(const nlohmann::json& config, const CommandOptions& opts);

/// Writes the environment of a config (or a bare environment spec) as MDP JSON.
void cmd_export_env(const nlohmann::json& config, const std::string& path);

}  // namespace hpmd
