#include "hpmd/commands.hpp"

#include "hpmd/environments.hpp"
#include "hpmd/io.hpp"
#include "hpmd/parallel.hpp"
#include "hpmd/theory.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

namespace hpmd {

using nlohmann::json;

namespace {

json num(double x) {
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

json gap_json(const Gap& g) { return g.is_infinite() ? json("inf") : json(g.value()); }

StateDistribution parse_rho(const json& j, int S) {
    if (j.is_string()) {
        if (j.get<std::string>() == "uniform") return StateDistribution::uniform(S);
        throw ConfigError("config error: rho must be \"uniform\" or an array of |S| weights");
    }
    if (!j.is_array() || static_cast<int>(j.size()) != S)
        throw ConfigError("config error: rho must have |S| entries");
    Eigen::VectorXd w(S);
    for (int s = 0; s < S; ++s) w(s) = j.at(static_cast<std::size_t>(s)).get<double>();
    return StateDistribution(w);
}

json theory_json(const TheoryConstants& tc) {
    json t = {{"applicable", tc.applicable},
              {"phi", num(tc.phi)},
              {"max_abs_initial_dual", num(tc.max_abs_dual0)},
              {"cost_bound", num(tc.cost_bound)}};
    if (!tc.applicable) {
        t["reason"] = tc.reason;
        return t;
    }
    t["delta_star"] = num(tc.delta_star);
    t["varrho"] = num(tc.varrho);
    t["linear"] = {{"K1", num(tc.k1)}, {"C_gamma", num(tc.c_gamma)}, {"Kbar1", num(tc.kbar1)},
                   {"A", num(tc.a_const)}, {"B", num(tc.b_const)}};
    t["sublinear"] = {{"K1", num(tc.k1_sublinear)}, {"C_gamma", num(tc.c_gamma_sublinear)}};
    t["general"] = {{"K1", num(tc.k1_general)}, {"K2_finite", num(tc.k2_finite)}};
    t["stochastic"] = {{"K1", num(tc.k1_stochastic)}, {"C_gamma", num(tc.c_gamma_stochastic)}};
    return t;
}

}  // namespace

RunOutput execute_run(const RunConfig& cfg, int threads) {
    RunOutput out{build_environment(cfg.environment), {}, {}, {}};
    const Mdp& m = out.env.mdp;
    const Geometry g = Geometry::parse(cfg.geometry);
    const Policy pi0 = policy_from_json(cfg.initial_policy, m.num_states(), m.num_actions());
    DiagConfig diag;
    diag.rho = parse_rho(cfg.rho, m.num_states());
    diag.snapshot_every = cfg.snapshot_every;
    diag.threads = std::max(1, threads);
    diag.solve_tol = cfg.solve_tol;
    diag.classify_tol = cfg.classify_tol;
    diag.compare_exact = cfg.compare_exact;
    if (is_stochastic(cfg.schedule.kind)) {
        if (g.kind() != GeometryKind::NegativeEntropy)
            throw ConfigError("config error: stochastic schedules require the entropy geometry");
        out.result = run_shpmd(m, cfg.schedule, cfg.sampling, pi0, cfg.iterations, cfg.seed, diag);
    } else {
        out.result = run_hpmd(m, g, cfg.schedule, pi0, cfg.iterations, diag);
    }
    out.manifest = build_manifest(cfg, out.env, out.result);
    return out;
}

json build_manifest(const RunConfig& cfg, const BuiltEnvironment& env, const RunResult& result) {
    const Mdp& m = env.mdp;
    const OptimalityData& od = *result.optimality;
    const Geometry g = Geometry::parse(cfg.geometry);
    const Policy pi0 = policy_from_json(cfg.initial_policy, m.num_states(), m.num_actions());
    const StateDistribution rho = parse_rho(cfg.rho, m.num_states());
    const MismatchRatios mr = mismatch_ratios(m, od, rho);

    json delta_s = json::array();
    for (const auto& d : od.gaps.delta_s) delta_s.push_back(gap_json(d));
    json env_json = {{"description", env.description},
                     {"fingerprint", mdp_fingerprint(m)},
                     {"num_states", m.num_states()},
                     {"num_actions", m.num_actions()},
                     {"gamma", m.gamma()},
                     {"cost_bound", m.cost_bound()}};
    if (env.description.contains("mixing") && env.description.at("mixing").get<double>() > 0.0)
        env_json["uniform_mixing"] = env.description.at("mixing");

    json flags = result.trace.flags;
    json manifest = {
        {"schema", "hpmd-manifest/1"},
        {"trace_schema", kTraceSchema},
        {"config", cfg.to_json()},
        {"environment", env_json},
        {"optimality",
         {{"optimal_actions", od.optimal_actions()},
          {"delta_star", gap_json(od.gaps.delta_star)},
          {"delta_s", delta_s},
          {"nu_star_available", od.nu_star_full_support()},
          {"varrho", mr.varrho ? num(*mr.varrho) : json("unavailable")},
          {"rho_over_nu", mr.rho_over_nu ? num(*mr.rho_over_nu) : json("unavailable")},
          {"d_over_rho", num(mr.d_over_rho)},
          {"bellman_residual", od.solution.bellman_residual},
          {"warnings", od.classification.warnings}}},
        {"theory", theory_json(theory_constants(m, od, g, pi0))},
        {"flags", flags},
        {"seed", cfg.seed},
        {"kappa", cfg.sampling.kappa},
        {"stochastic", result.trace.stochastic},
        {"truncated", result.trace.truncated},
        {"iterations_recorded", result.trace.records.size()},
        {"elapsed_seconds", result.trace.records.empty() ? 0.0 : result.trace.records.back().wall_seconds}};
    return manifest;
}

void write_run_outputs(const RunOutput& out, const std::string& dir) {
    std::ostringstream trace, snaps, timing;
    write_trace_csv(out.result.trace, trace);
    write_snapshots_csv(out.result.trace, snaps);
    write_timing_csv(out.result.trace, timing);
    const std::filesystem::path p(dir);
    write_text_file((p / "trace.csv").string(), trace.str());
    write_text_file((p / "snapshots.csv").string(), snaps.str());
    write_text_file((p / "timing.csv").string(), timing.str());
    write_text_file((p / "manifest.json").string(), out.manifest.dump(2) + "\n");
}

std::string resolve_output_dir(const CommandOptions& opts, const RunConfig& cfg, const std::string& leaf) {
    if (!opts.out_dir.empty()) return opts.out_dir;
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    if (const char* root = std::getenv(kOutputRootEnv); root && *root)
        return (std::filesystem::path(root) / leaf).string();
    return (std::filesystem::path("hpmd_out") / leaf).string();
}

RunOutput cmd_run(const json& config, const CommandOptions& opts) {
    RunConfig cfg = parse_run_config(config);
    if (opts.seed_override) cfg.seed = *opts.seed_override;
    RunOutput out = execute_run(cfg, opts.threads.value_or(cfg.threads));
    out.out_dir = resolve_output_dir(opts, cfg, "run");
    write_run_outputs(out, out.out_dir);
    return out;
}

namespace {

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

std::string aggregate(const std::vector<RunOutput>& runs) {
    std::size_t longest = 0;
    for (const auto& r : runs) longest = std::max(longest, r.result.trace.records.size());
    std::ostringstream os;
    os << "k,seeds_present,seeds_missing,gap_rho_mean,gap_rho_q10,gap_rho_q50,gap_rho_q90,"
          "gap_nu_mean,dist_l1_mean,dist_l1_q50,dist_inf_mean,dist_weighted_mean\n";
    for (std::size_t k = 0; k < longest; ++k) {
        std::vector<double> gap, gap_nu, l1, inf, weighted;
        for (const auto& r : runs) {
            const auto& recs = r.result.trace.records;
            if (k >= recs.size()) continue;
            gap.push_back(recs[k].gap_rho);
            if (recs[k].gap_nu) gap_nu.push_back(*recs[k].gap_nu);
            l1.push_back(recs[k].dist_l1);
            inf.push_back(recs[k].dist_inf);
            weighted.push_back(recs[k].dist_weighted);
        }
        os << k << ',' << gap.size() << ',' << runs.size() - gap.size() << ',' << format_double(mean(gap)) << ','
           << format_double(quantile(gap, 0.1)) << ',' << format_double(quantile(gap, 0.5)) << ','
           << format_double(quantile(gap, 0.9)) << ',' << (gap_nu.empty() ? std::string() : format_double(mean(gap_nu)))
           << ',' << format_double(mean(l1)) << ',' << format_double(quantile(l1, 0.5)) << ','
           << format_double(mean(inf)) << ',' << format_double(mean(weighted)) << '\n';
    }
    return os.str();
}

}  // namespace

SweepOutput cmd_sweep(const json& config, const CommandOptions& opts) {
    const RunConfig base = parse_run_config(config);
    std::vector<std::uint64_t> seeds = base.seeds;
    if (opts.seed_override) seeds = {*opts.seed_override};
    if (seeds.empty()) throw ConfigError("config error: seeds must not be empty");
    const int threads = std::max(1, opts.threads.value_or(base.threads));

    SweepOutput out;
    out.out_dir = resolve_output_dir(opts, base, "sweep");
    std::vector<std::optional<RunOutput>> slots(seeds.size());
    // Seeds run side by side; each run is single-threaded so results match cmd_run.
    parallel_for(static_cast<int>(seeds.size()), threads, [&](int i) {
        RunConfig cfg = base;
        cfg.seed = seeds[static_cast<std::size_t>(i)];
        cfg.seeds = {cfg.seed};
        if (cfg.sweep_environment_seed) cfg.environment["seed"] = cfg.seed;
        slots[static_cast<std::size_t>(i)] = execute_run(cfg, 1);
    });
    for (auto& s : slots) out.runs.push_back(std::move(*s));
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        auto& r = out.runs[i];
        r.out_dir = (std::filesystem::path(out.out_dir) / ("seed_" + std::to_string(seeds[i]))).string();
        write_run_outputs(r, r.out_dir);
    }
    out.aggregate_csv = aggregate(out.runs);
    write_text_file((std::filesystem::path(out.out_dir) / "aggregate.csv").string(), out.aggregate_csv);
    return out;
}

void cmd_export_env(const json& config, const std::string& path) {
    const json& spec = config.is_object() && config.contains("config") ? config.at("config") : config;
    const json& env = spec.is_object() && spec.contains("environment") ? spec.at("environment") : spec;
    save_mdp(build_environment(env).mdp, path);
}

}  // namespace hpmd
