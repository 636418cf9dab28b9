#include "hpmd/hpmd.hpp"

#include "hpmd/errors.hpp"
#include "hpmd/parallel.hpp"
#include "hpmd/theory.hpp"

#include <chrono>

namespace hpmd {

std::shared_ptr<const OptimalityData> optimality_for(const Mdp& m, const DiagConfig& diag) {
    return std::make_shared<const OptimalityData>(compute_optimality(m, diag.solve_tol, diag.classify_tol));
}

StepFlags hpmd_update(const Geometry& g, DualPolicyState& state, const QFn& q, double eta, double tau,
                      int threads) {
    const int S = static_cast<int>(state.duals.rows());
    Eigen::MatrixXd probs(S, state.duals.cols());
    std::vector<char> saturated(static_cast<std::size_t>(S), 0);
    std::vector<char> floored(static_cast<std::size_t>(S), 0);
    const bool entropic = g.kind() == GeometryKind::NegativeEntropy;
    parallel_for(S, threads, [&](int s) {
        const Eigen::VectorXd d = state.duals.row(s).transpose();
        const Eigen::VectorXd qs = q.row(s).transpose();
        if (entropic) {
            EntropyStep st = mirror_step_entropy(d, qs, eta, tau);
            state.duals.row(s) = st.logits.transpose();
            probs.row(s) = st.probs.transpose();
            saturated[static_cast<std::size_t>(s)] = st.saturated;
        } else {
            GeneralStep st = mirror_step(g, d, qs, eta, tau);
            state.duals.row(s) = st.duals.transpose();
            probs.row(s) = st.probs.transpose();
            floored[static_cast<std::size_t>(s)] = st.floored;
        }
    });
    state.policy = Policy::from_trusted(std::move(probs));
    StepFlags f;
    for (int s = 0; s < S; ++s) {
        f.saturated = f.saturated || saturated[static_cast<std::size_t>(s)];
        f.floored = f.floored || floored[static_cast<std::size_t>(s)];
    }
    return f;
}

void fill_diagnostics(IterationRecord& rec, const Policy& pi, const ValueFn& v, const OptimalityData& od,
                      const StateDistribution& rho) {
    const Eigen::VectorXd excess = v - od.v_star();
    rec.gap_rho = rho.weights().dot(excess);
    if (od.nu_star) rec.gap_nu = od.nu_star->weights().dot(excess);
    rec.dist_weighted = dist_weighted(pi, od, rho);
    rec.off_support = off_support_mass(pi, od);
    rec.min_optimal = min_optimal_prob(pi, od);
    rec.dist_l1 = 2.0 * rec.off_support.maxCoeff();
    rec.dist_inf = dist_inf_to_pistar_u(pi, od);
}

RunResult run_hpmd(const Mdp& m, const Geometry& g, const ScheduleSpec& schedule, const Policy& pi0,
                   int iterations, const DiagConfig& diag, std::shared_ptr<const OptimalityData> od) {
    if (iterations < 0) throw ValidationError("iterations must be nonnegative");
    // Stochastic schedules run here with exact Q, which is the noiseless baseline for run_shpmd.
    if (pi0.num_states() != m.num_states() || pi0.num_actions() != m.num_actions())
        throw ValidationError("initial policy shape does not match MDP");
    ScheduleSpec spec = schedule;
    spec.gamma = m.gamma();
    spec.num_actions = m.num_actions();
    validate_schedule(spec);
    if (!od) od = optimality_for(m, diag);
    const StateDistribution rho = diag.rho ? *diag.rho : StateDistribution::uniform(m.num_states());
    if (rho.size() != m.num_states()) throw ValidationError("rho length does not match MDP");

    RunResult out;
    out.optimality = od;
    out.final_state = init_dual_state(g, pi0);
    Trace& trace = out.trace;
    if (auto why = unguaranteed_reason(g, spec.kind)) trace.add_flag("unguaranteed: " + *why);
    for (const auto& w : od->classification.warnings) trace.add_flag("warning: " + w);

    const auto start = std::chrono::steady_clock::now();
    DualPolicyState& state = out.final_state;
    for (int k = 0; k <= iterations; ++k) {
        IterationRecord rec;
        rec.k = k;
        const ValueFn v = evaluate_policy(m, state.policy);
        fill_diagnostics(rec, state.policy, v, *od, rho);
        if (diag.snapshot_every > 0 && (k % diag.snapshot_every == 0 || k == iterations))
            trace.snapshots.push_back({k, state.policy});
        if (k < iterations) {
            const StepParams sp = schedule_params(spec, k);
            rec.eta = sp.eta;
            rec.tau = sp.tau;
            const StepFlags f = hpmd_update(g, state, q_from_v(m, v), sp.eta, sp.tau, diag.threads);
            rec.saturated = sp.saturated || f.saturated;
            rec.floored = f.floored;
            if (sp.saturated) trace.add_flag("saturated: eta capped");
            if (f.saturated) trace.add_flag("numerically converged: logits at floor");
            if (f.floored) trace.add_flag("positivity floor applied");
        }
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        trace.records.push_back(std::move(rec));
    }
    return out;
}

}  // namespace hpmd
