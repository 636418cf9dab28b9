#pragma once

#include "hpmd/bregman.hpp"
#include "hpmd/errors.hpp"
#include "hpmd/hpmd.hpp"
#include "hpmd/schedule.hpp"
#include "hpmd/shpmd.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hpmd {

/// Raised for missing or malformed configuration fields (CLI exit code 2).
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

struct BuiltEnvironment {
    Mdp mdp;
    nlohmann::json description;  ///< kind and parameters, echoed into manifests
};

/// Environment spec, one of:
///   {"kind": "random", "states", "actions", "branching", "gamma", "mixing"?, "cost_scale"?, "seed"}
///   {"kind": "gridworld", "n", "slip", "gamma", "seed"}
///   {"kind": "gap_counterexample", "epsilon", "gamma"}
///   {"kind": "tied", "base": <spec>, "ties", "seed"}
///   {"kind": "file", "path"}
///   {"kind": "inline", "mdp": <MDP JSON>}
BuiltEnvironment build_environment(const nlohmann::json& spec);

/// Parsed run configuration. Required: environment, geometry, schedule, iterations.
struct RunConfig {
    nlohmann::json environment;
    std::string geometry = "entropy";
    ScheduleSpec schedule;
    int iterations = 300;
    nlohmann::json initial_policy = "uniform";
    nlohmann::json rho = "uniform";
    int snapshot_every = 10;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> seeds;  ///< sweep only; defaults to {seed}
    bool sweep_environment_seed = false;
    int threads = 1;
    double solve_tol = 1e-12;
    double classify_tol = 1e-8;
    SamplingPlan sampling;
    bool compare_exact = false;
    std::string output_dir;

    /// Normalised JSON with every default filled in; parse(to_json()) round-trips.
    nlohmann::json to_json() const;
};

/// Accepts a run config or a manifest (whose "config" member is used).
RunConfig parse_run_config(const nlohmann::json& j);

}  // namespace hpmd
