#include "hpmd/config.hpp"

#include "hpmd/environments.hpp"
#include "hpmd/io.hpp"

namespace hpmd {

using nlohmann::json;

namespace {

const json& require(const json& j, const std::string& name, const std::string& where) {
    if (!j.is_object() || !j.contains(name))
        throw ConfigError("config error: missing field '" + where + name + "'");
    return j.at(name);
}

template <class T>
T get_as(const json& j, const std::string& name, const std::string& where) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config error: field '" + where + name + "' has the wrong type");
    }
}

template <class T>
T required(const json& j, const std::string& name, const std::string& where = "") {
    return get_as<T>(require(j, name, where), name, where);
}

template <class T>
T optional_or(const json& j, const std::string& name, T fallback, const std::string& where = "") {
    if (!j.is_object() || !j.contains(name) || j.at(name).is_null()) return fallback;
    return get_as<T>(j.at(name), name, where);
}

}  // namespace

BuiltEnvironment build_environment(const json& spec) {
    const std::string w = "environment.";
    const std::string kind = required<std::string>(spec, "kind", w);
    try {
        if (kind == "random") {
            RandomMdpParams p;
            p.num_states = required<int>(spec, "states", w);
            p.num_actions = required<int>(spec, "actions", w);
            p.branching = optional_or<int>(spec, "branching", p.num_states, w);
            p.gamma = required<double>(spec, "gamma", w);
            p.mixing = optional_or<double>(spec, "mixing", 0.01, w);
            p.cost_scale = optional_or<double>(spec, "cost_scale", 1.0, w);
            p.seed = optional_or<std::uint64_t>(spec, "seed", 0, w);
            json d = {{"kind", kind}, {"states", p.num_states}, {"actions", p.num_actions},
                      {"branching", p.branching}, {"gamma", p.gamma}, {"mixing", p.mixing},
                      {"cost_scale", p.cost_scale}, {"seed", p.seed}};
            return {make_random_mdp(p), d};
        }
        if (kind == "gridworld") {
            GridworldParams p;
            p.n = required<int>(spec, "n", w);
            p.slip = optional_or<double>(spec, "slip", 0.1, w);
            p.gamma = required<double>(spec, "gamma", w);
            p.seed = optional_or<std::uint64_t>(spec, "seed", 0, w);
            json d = {{"kind", kind}, {"n", p.n}, {"slip", p.slip}, {"gamma", p.gamma}, {"seed", p.seed}};
            return {make_gridworld(p), d};
        }
        if (kind == "gap_counterexample") {
            const double eps = required<double>(spec, "epsilon", w);
            const double gamma = required<double>(spec, "gamma", w);
            return {make_gap_counterexample(eps, gamma), {{"kind", kind}, {"epsilon", eps}, {"gamma", gamma}}};
        }
        if (kind == "tied") {
            BuiltEnvironment base = build_environment(require(spec, "base", w));
            const int ties = optional_or<int>(spec, "ties", 1, w);
            const auto seed = optional_or<std::uint64_t>(spec, "seed", 0, w);
            std::vector<int> states;
            Mdp m = make_tied(base.mdp, ties, seed, &states);
            json d = {{"kind", kind}, {"base", base.description}, {"ties", ties}, {"seed", seed}, {"tied_states", states}};
            return {std::move(m), d};
        }
        if (kind == "file") {
            const std::string path = required<std::string>(spec, "path", w);
            Mdp m = load_mdp(path);
            return {m, {{"kind", kind}, {"path", path}}};
        }
        if (kind == "inline") {
            Mdp m = mdp_from_json(require(spec, "mdp", w));
            return {m, {{"kind", kind}, {"mdp", mdp_to_json(m)}}};
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
    throw ConfigError("config error: unknown environment kind '" + kind + "'");
}

RunConfig parse_run_config(const json& input) {
    const json& j = input.is_object() && input.contains("config") && input.at("config").is_object()
                        ? input.at("config")
                        : input;
    if (!j.is_object()) throw ConfigError("config error: top level must be a JSON object");
    RunConfig c;
    c.environment = require(j, "environment", "");
    c.geometry = required<std::string>(j, "geometry");
    Geometry::parse(c.geometry);  // validates early

    const json& sched = require(j, "schedule", "");
    if (sched.is_string()) {
        c.schedule.kind = parse_schedule_kind(sched.get<std::string>());
    } else {
        c.schedule.kind = parse_schedule_kind(required<std::string>(sched, "kind", "schedule."));
        c.schedule.beta = optional_or<double>(sched, "beta", c.schedule.beta, "schedule.");
        c.schedule.eta_scale = optional_or<double>(sched, "eta_scale", 1.0, "schedule.");
    }
    c.iterations = required<int>(j, "iterations");
    if (c.iterations < 0) throw ConfigError("config error: iterations must be nonnegative");
    if (j.contains("initial_policy")) c.initial_policy = j.at("initial_policy");
    if (j.contains("rho")) c.rho = j.at("rho");
    c.snapshot_every = optional_or<int>(j, "snapshot_every", 10);
    c.seed = optional_or<std::uint64_t>(j, "seed", 0);
    c.seeds = optional_or<std::vector<std::uint64_t>>(j, "seeds", {c.seed});
    c.sweep_environment_seed = optional_or<bool>(j, "sweep_environment_seed", false);
    c.threads = optional_or<int>(j, "threads", 1);
    c.solve_tol = optional_or<double>(j, "solve_tol", 1e-12);
    c.classify_tol = optional_or<double>(j, "classify_tol", 1e-8);
    c.compare_exact = optional_or<bool>(j, "compare_exact", false);
    c.output_dir = optional_or<std::string>(j, "output_dir", "");
    if (j.contains("sampling")) {
        const json& s = j.at("sampling");
        const std::string w = "sampling.";
        c.sampling.kappa = optional_or<double>(s, "kappa", 1.0, w);
        if (s.contains("trajectories") && !s.at("trajectories").is_null())
            c.sampling.fixed_trajectories = required<std::int64_t>(s, "trajectories", w);
        if (s.contains("horizon") && !s.at("horizon").is_null()) c.sampling.fixed_horizon = required<int>(s, "horizon", w);
        if (s.contains("max_trajectories") && !s.at("max_trajectories").is_null())
            c.sampling.max_trajectories = required<std::int64_t>(s, "max_trajectories", w);
        if (s.contains("sample_budget") && !s.at("sample_budget").is_null())
            c.sampling.sample_budget = required<std::int64_t>(s, "sample_budget", w);
    }
    return c;
}

json RunConfig::to_json() const {
    auto opt = [](const auto& o) -> json { return o ? json(*o) : json(nullptr); };
    return json{{"environment", environment},
                {"geometry", geometry},
                {"schedule", {{"kind", schedule_name(schedule.kind)}, {"beta", schedule.beta}, {"eta_scale", schedule.eta_scale}}},
                {"iterations", iterations},
                {"initial_policy", initial_policy},
                {"rho", rho},
                {"snapshot_every", snapshot_every},
                {"seed", seed},
                {"seeds", seeds},
                {"sweep_environment_seed", sweep_environment_seed},
                {"threads", threads},
                {"solve_tol", solve_tol},
                {"classify_tol", classify_tol},
                {"compare_exact", compare_exact},
                {"output_dir", output_dir},
                {"sampling",
                 {{"kappa", sampling.kappa},
                  {"trajectories", opt(sampling.fixed_trajectories)},
                  {"horizon", opt(sampling.fixed_horizon)},
                  {"max_trajectories", opt(sampling.max_trajectories)},
                  {"sample_budget", opt(sampling.sample_budget)}}}};
}

}  // namespace hpmd
