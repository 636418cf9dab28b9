#include "hpmd/shpmd.hpp"

#include "hpmd/errors.hpp"
#include "hpmd/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace hpmd {

namespace {

int inverse_cdf(const Eigen::MatrixXd& cum, Eigen::Index row, double u) {
    const Eigen::Index n = cum.cols();
    Eigen::Index lo = 0, hi = n;  // first index with cum > u
    while (lo < hi) {
        const Eigen::Index mid = (lo + hi) / 2;
        if (cum(row, mid) > u) hi = mid; else lo = mid + 1;
    }
    if (lo < n) return static_cast<int>(lo);
    // Round-off left the final cumulative value below u: take the last positive entry.
    for (Eigen::Index j = n - 1; j > 0; --j)
        if (cum(row, j) > cum(row, j - 1)) return static_cast<int>(j);
    return 0;
}

Eigen::MatrixXd cumulative_rows(const Eigen::MatrixXd& p) {
    Eigen::MatrixXd c(p.rows(), p.cols());
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            acc += p(r, j);
            c(r, j) = acc;
        }
    }
    return c;
}

}  // namespace

SamplingTables::SamplingTables(const Mdp& m, const Policy& pi)
    : S_(m.num_states()), A_(m.num_actions()), cum_p_(cumulative_rows(m.transition())),
      cum_pi_(cumulative_rows(pi.probs())) {
    if (pi.num_states() != S_ || pi.num_actions() != A_) throw ValidationError("policy shape does not match MDP");
}

int SamplingTables::next_state(int s, int a, double u) const { return inverse_cdf(cum_p_, s * A_ + a, u); }
int SamplingTables::action(int s, double u) const { return inverse_cdf(cum_pi_, s, u); }

double sample_trajectory(const Mdp& m, const SamplingTables& tables, int s0, int a0, int horizon,
                         CounterRng& rng) {
    double ret = 0.0;
    double disc = 1.0;
    int s = s0;
    int a = a0;
    for (int t = 0; t < horizon; ++t) {
        ret += disc * m.cost(s, a);
        disc *= m.gamma();
        if (t + 1 == horizon) break;
        s = tables.next_state(s, a, rng.uniform());
        a = tables.action(s, rng.uniform());
    }
    return ret;
}

double sample_trajectory(const Mdp& m, const Policy& pi, int s0, int a0, int horizon, CounterRng& rng) {
    if (s0 < 0 || s0 >= m.num_states() || a0 < 0 || a0 >= m.num_actions())
        throw ValidationError("start pair out of range");
    if (horizon < 1) throw ValidationError("horizon must be >= 1");
    return sample_trajectory(m, SamplingTables(m, pi), s0, a0, horizon, rng);
}

QFn estimate_q(const Mdp& m, const Policy& pi, std::int64_t trajectories, int horizon, std::uint64_t seed,
               int k, int threads) {
    if (trajectories < 1) throw ValidationError("need at least one trajectory");
    if (horizon < 1) throw ValidationError("horizon must be >= 1");
    const SamplingTables tables(m, pi);
    const int S = m.num_states();
    const int A = m.num_actions();
    QFn q(S, A);
    parallel_for(S * A, threads, [&](int idx) {
        const int s = idx / A;
        const int a = idx % A;
        double acc = 0.0;
        for (std::int64_t i = 0; i < trajectories; ++i) {
            CounterRng rng(seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(s),
                           static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(i));
            acc += sample_trajectory(m, tables, s, a, horizon, rng);
        }
        q(s, a) = acc / static_cast<double>(trajectories);
    });
    return q;
}

double NoiseSpec::sigma(int k) const { return std::pow(gamma, 0.5 * (k + 1)); }
double NoiseSpec::epsilon(int k) const { return std::pow(gamma, 0.75 * (k + 1)); }

int SamplingPlan::horizon(const Mdp& m, int k) const {
    if (fixed_horizon) return std::max(1, *fixed_horizon);
    const double g = m.gamma();
    double t = 0.75 * (k + 1);
    if (m.cost_bound() > 0.0 && g > 0.0) t += std::log((1.0 - g) / (2.0 * m.cost_bound())) / std::log(g);
    return std::max(1, static_cast<int>(std::ceil(t - 1e-12)));
}

std::int64_t SamplingPlan::trajectories(const Mdp& m, int k, bool* capped) const {
    if (capped) *capped = false;
    if (fixed_trajectories) return std::max<std::int64_t>(1, *fixed_trajectories);
    const double g = m.gamma();
    const double C = m.cost_bound();
    const double sa = static_cast<double>(m.num_states()) * m.num_actions();
    const double raw = 4.0 * C * C * kappa / ((1.0 - g) * (1.0 - g)) * std::exp(-(k + 1) * std::log(g)) *
                       (std::log(sa) + 1.0);
    constexpr double kHuge = 4e18;
    std::int64_t mk = raw >= kHuge || !std::isfinite(raw) ? static_cast<std::int64_t>(kHuge)
                                                           : std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(raw)));
    if (max_trajectories && mk > *max_trajectories) {
        mk = *max_trajectories;
        if (capped) *capped = true;
    }
    return mk;
}

RunResult run_shpmd(const Mdp& m, const ScheduleSpec& schedule, const SamplingPlan& plan, const Policy& pi0,
                    int iterations, std::uint64_t seed, const DiagConfig& diag,
                    std::shared_ptr<const OptimalityData> od) {
    if (iterations < 0) throw ValidationError("iterations must be nonnegative");
    if (!is_stochastic(schedule.kind)) throw ValidationError("run_shpmd needs a stochastic schedule");
    if (!(plan.kappa > 0.0)) throw ValidationError("kappa must be positive");
    if (pi0.num_states() != m.num_states() || pi0.num_actions() != m.num_actions())
        throw ValidationError("initial policy shape does not match MDP");
    ScheduleSpec spec = schedule;
    spec.gamma = m.gamma();
    spec.num_actions = m.num_actions();
    validate_schedule(spec);
    if (!od) od = optimality_for(m, diag);
    const StateDistribution rho = diag.rho ? *diag.rho : StateDistribution::uniform(m.num_states());
    const Geometry g = Geometry::entropy();

    RunResult out;
    out.optimality = od;
    out.final_state = init_dual_state(g, pi0);
    Trace& trace = out.trace;
    trace.stochastic = true;
    for (const auto& w : od->classification.warnings) trace.add_flag("warning: " + w);
    DualPolicyState& state = out.final_state;
    std::int64_t cumulative = 0;
    const std::int64_t pairs = static_cast<std::int64_t>(m.num_states()) * m.num_actions();
    const auto start = std::chrono::steady_clock::now();

    for (int k = 0; k <= iterations; ++k) {
        IterationRecord rec;
        rec.k = k;
        const ValueFn v = evaluate_policy(m, state.policy);
        fill_diagnostics(rec, state.policy, v, *od, rho);
        if (diag.snapshot_every > 0 && (k % diag.snapshot_every == 0 || k == iterations))
            trace.snapshots.push_back({k, state.policy});
        rec.samples_cumulative = cumulative;
        if (k < iterations) {
            bool capped = false;
            const std::int64_t mk = plan.trajectories(m, k, &capped);
            const int tk = plan.horizon(m, k);
            const double cost_this = static_cast<double>(pairs) * static_cast<double>(mk) * tk;
            if (plan.sample_budget && static_cast<double>(cumulative) + cost_this > static_cast<double>(*plan.sample_budget)) {
                trace.truncated = true;
                trace.add_flag("truncated: sample budget exhausted");
                if (diag.snapshot_every > 0 && trace.snapshots.back().k != k) trace.snapshots.push_back({k, state.policy});
                rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                trace.records.push_back(std::move(rec));
                break;
            }
            if (capped) trace.add_flag("capped: trajectories per pair limited by max_trajectories");
            const QFn qhat = estimate_q(m, state.policy, mk, tk, seed, k, diag.threads);
            if (diag.compare_exact) rec.empirical_delta_inf = (qhat - q_from_v(m, v)).cwiseAbs().maxCoeff();
            rec.samples_this_iter = pairs * mk * tk;
            cumulative += rec.samples_this_iter;
            rec.samples_cumulative = cumulative;
            const StepParams sp = schedule_params(spec, k);
            rec.eta = sp.eta;
            rec.tau = sp.tau;
            const StepFlags f = hpmd_update(g, state, qhat, sp.eta, sp.tau, diag.threads);
            rec.saturated = sp.saturated || f.saturated;
            if (sp.saturated) trace.add_flag("saturated: eta capped");
            if (f.saturated) trace.add_flag("numerically converged: logits at floor");
        }
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        trace.records.push_back(std::move(rec));
    }
    return out;
}

}  // namespace hpmd
