#include "hpmd/commands.hpp"
#include "hpmd/environments.hpp"
#include "hpmd/io.hpp"
#include "hpmd/shpmd.hpp"
#include "hpmd/theory.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace hpmd;

namespace {

py::dict trace_to_dict(const RunResult& r) {
    const auto& recs = r.trace.records;
    std::vector<int> k;
    std::vector<double> eta, tau, gap_nu, gap_rho, dw, dl1, dinf;
    for (const auto& rec : recs) {
        k.push_back(rec.k);
        eta.push_back(rec.eta);
        tau.push_back(rec.tau);
        gap_nu.push_back(rec.gap_nu ? *rec.gap_nu : std::numeric_limits<double>::quiet_NaN());
        gap_rho.push_back(rec.gap_rho);
        dw.push_back(rec.dist_weighted);
        dl1.push_back(rec.dist_l1);
        dinf.push_back(rec.dist_inf);
    }
    py::dict d;
    d["k"] = k;
    d["eta"] = eta;
    d["tau"] = tau;
    d["gap_nu"] = gap_nu;
    d["gap_rho"] = gap_rho;
    d["dist_weighted"] = dw;
    d["dist_l1"] = dl1;
    d["dist_inf"] = dinf;
    d["flags"] = r.trace.flags;
    d["truncated"] = r.trace.truncated;
    d["final_policy"] = r.final_state.policy.probs();
    return d;
}

Policy initial_policy(const Mdp& m, const std::optional<Eigen::MatrixXd>& pi0) {
    return pi0 ? Policy(*pi0) : Policy::uniform(m.num_states(), m.num_actions());
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Homotopic policy mirror descent for tabular MDPs";

    py::class_<Mdp>(mod, "Mdp")
        .def(py::init<int, int, double, Eigen::MatrixXd, Eigen::MatrixXd>(), py::arg("num_states"),
             py::arg("num_actions"), py::arg("gamma"), py::arg("cost"), py::arg("transition"))
        .def_property_readonly("num_states", &Mdp::num_states)
        .def_property_readonly("num_actions", &Mdp::num_actions)
        .def_property_readonly("gamma", &Mdp::gamma)
        .def_property_readonly("cost", py::overload_cast<>(&Mdp::cost, py::const_))
        .def_property_readonly("transition", &Mdp::transition)
        .def("fingerprint", &mdp_fingerprint)
        .def("to_json", [](const Mdp& m) { return mdp_to_json(m).dump(); })
        .def_static("from_json", [](const std::string& s) { return mdp_from_json(nlohmann::json::parse(s)); });

    mod.def(
        "make_random_mdp",
        [](int states, int actions, int branching, double gamma, double mixing, double cost_scale, std::uint64_t seed) {
            return make_random_mdp({states, actions, branching, gamma, mixing, cost_scale, seed});
        },
        py::arg("states"), py::arg("actions"), py::arg("branching"), py::arg("gamma"), py::arg("mixing") = 0.01,
        py::arg("cost_scale") = 1.0, py::arg("seed") = 0);
    mod.def(
        "make_gridworld", [](int n, double slip, double gamma, std::uint64_t seed) { return make_gridworld({n, slip, gamma, seed}); },
        py::arg("n"), py::arg("slip") = 0.1, py::arg("gamma") = 0.9, py::arg("seed") = 0);
    mod.def("make_gap_counterexample", &make_gap_counterexample, py::arg("eps"), py::arg("gamma"));
    mod.def(
        "make_tied", [](const Mdp& base, int ties, std::uint64_t seed) { return make_tied(base, ties, seed); },
        py::arg("base"), py::arg("ties"), py::arg("seed") = 0);

    mod.def(
        "evaluate_policy", [](const Mdp& m, const Eigen::MatrixXd& pi) { return evaluate_policy(m, Policy(pi)); },
        py::arg("mdp"), py::arg("policy"));
    mod.def("q_from_v", &q_from_v, py::arg("mdp"), py::arg("v"));

    mod.def(
        "solve_optimal",
        [](const Mdp& m, double solve_tol, double classify_tol) {
            const OptimalityData od = compute_optimality(m, solve_tol, classify_tol);
            py::dict d;
            d["v_star"] = od.v_star();
            d["q_star"] = od.q_star();
            d["optimal_actions"] = od.optimal_actions();
            d["delta_star"] = od.gaps.delta_star.is_infinite() ? std::numeric_limits<double>::infinity()
                                                               : od.gaps.delta_star.value();
            d["pi_star_u"] = od.pi_star_u.probs();
            d["warnings"] = od.classification.warnings;
            return d;
        },
        py::arg("mdp"), py::arg("solve_tol") = 1e-12, py::arg("classify_tol") = 1e-8);

    mod.def(
        "mirror_step_entropy",
        [](const Eigen::VectorXd& logits, const Eigen::VectorXd& q, double eta, double tau) {
            const EntropyStep st = mirror_step_entropy(logits, q, eta, tau);
            return py::make_tuple(st.logits, st.probs);
        },
        py::arg("logits"), py::arg("q"), py::arg("eta"), py::arg("tau"));
    mod.def(
        "mirror_step",
        [](const std::string& geometry, const Eigen::VectorXd& duals, const Eigen::VectorXd& q, double eta, double tau) {
            const GeneralStep st = mirror_step(Geometry::parse(geometry), duals, q, eta, tau);
            return py::make_tuple(st.duals, st.probs, st.lambda);
        },
        py::arg("geometry"), py::arg("duals"), py::arg("q"), py::arg("eta"), py::arg("tau"));

    mod.def(
        "schedule_params",
        [](const std::string& kind, double gamma, int k, int num_actions, double beta) {
            const StepParams p = schedule_params({parse_schedule_kind(kind), gamma, num_actions, beta}, k);
            return py::make_tuple(p.eta, p.tau);
        },
        py::arg("kind"), py::arg("gamma"), py::arg("k"), py::arg("num_actions") = 2, py::arg("beta") = 0.25);

    mod.def(
        "run_hpmd",
        [](const Mdp& m, const std::string& geometry, const std::string& schedule, int iterations,
           std::optional<Eigen::MatrixXd> pi0, int threads) {
            ScheduleSpec spec;
            spec.kind = parse_schedule_kind(schedule);
            DiagConfig d;
            d.threads = threads;
            d.snapshot_every = 0;
            py::gil_scoped_release release;
            const RunResult r = run_hpmd(m, Geometry::parse(geometry), spec, initial_policy(m, pi0), iterations, d);
            py::gil_scoped_acquire acquire;
            return trace_to_dict(r);
        },
        py::arg("mdp"), py::arg("geometry") = "entropy", py::arg("schedule") = "linear", py::arg("iterations") = 100,
        py::arg("pi0") = py::none(), py::arg("threads") = 1);

    mod.def(
        "run_shpmd",
        [](const Mdp& m, const std::string& schedule, int iterations, std::uint64_t seed, double kappa,
           std::optional<std::int64_t> trajectories, std::optional<int> horizon, std::optional<Eigen::MatrixXd> pi0,
           int threads) {
            ScheduleSpec spec;
            spec.kind = parse_schedule_kind(schedule);
            SamplingPlan plan;
            plan.kappa = kappa;
            plan.fixed_trajectories = trajectories;
            plan.fixed_horizon = horizon;
            DiagConfig d;
            d.threads = threads;
            d.snapshot_every = 0;
            py::gil_scoped_release release;
            const RunResult r = run_shpmd(m, spec, plan, initial_policy(m, pi0), iterations, seed, d);
            py::gil_scoped_acquire acquire;
            return trace_to_dict(r);
        },
        py::arg("mdp"), py::arg("schedule") = "shpmd-linear", py::arg("iterations") = 20, py::arg("seed") = 0,
        py::arg("kappa") = 1.0, py::arg("trajectories") = py::none(), py::arg("horizon") = py::none(),
        py::arg("pi0") = py::none(), py::arg("threads") = 1);

    mod.def(
        "run_config_json",
        [](const std::string& config, const std::string& out_dir, int threads) {
            CommandOptions o;
            o.out_dir = out_dir;
            if (threads > 0) o.threads = threads;
            return cmd_run(nlohmann::json::parse(config), o).manifest.dump();
        },
        py::arg("config"), py::arg("out_dir"), py::arg("threads") = 0,
        "Runs a JSON config, writes the CSV and manifest files, and returns the manifest as JSON text.");

    py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
}
