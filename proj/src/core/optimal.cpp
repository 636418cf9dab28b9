#include "hpmd/optimal.hpp"

#include "hpmd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hpmd {

namespace {

double tie_eps(const QFn& q) {
    return 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + q.cwiseAbs().maxCoeff());
}

int lowest_argmin(const QFn& q, int s, double eps) {
    const double best = q.row(s).minCoeff();
    for (int a = 0; a < q.cols(); ++a)
        if (q(s, a) <= best + eps) return a;
    return 0;
}

}  // namespace

OptimalSolution solve_optimal(const Mdp& m, double tol, int max_iters) {
    const int S = m.num_states();
    const int A = m.num_actions();
    std::vector<int> actions(S);
    for (int s = 0; s < S; ++s) {
        int best = 0;
        for (int a = 1; a < A; ++a)
            if (m.cost(s, a) < m.cost(s, best)) best = a;
        actions[s] = best;
    }

    OptimalSolution out;
    for (int it = 1; it <= max_iters; ++it) {
        out.iterations = it;
        const ValueFn v = evaluate_policy(m, Policy::deterministic(A, actions));
        const QFn q = q_from_v(m, v);
        const double eps = tie_eps(q);
        bool changed = false;
        for (int s = 0; s < S; ++s) {
            // Only switch on a strict improvement, which rules out cycling on near-ties.
            if (q(s, actions[s]) <= q.row(s).minCoeff() + eps) continue;
            actions[s] = lowest_argmin(q, s, eps);
            changed = true;
        }
        if (!changed) break;
        if (it == max_iters) throw NumericalError("policy iteration did not converge");
    }

    // Normalise the tie-break so the reported policy is the lowest-index optimal one.
    {
        const QFn q = q_from_v(m, evaluate_policy(m, Policy::deterministic(A, actions)));
        const double eps = tie_eps(q);
        for (int s = 0; s < S; ++s) actions[s] = lowest_argmin(q, s, eps);
    }
    out.greedy = actions;
    out.v_star = evaluate_policy(m, Policy::deterministic(A, actions));
    out.q_star = q_from_v(m, out.v_star);
    out.bellman_residual = (out.v_star - out.q_star.rowwise().minCoeff()).cwiseAbs().maxCoeff();
    const double scale = 1.0 + m.cost_bound() / (1.0 - m.gamma());
    if (out.bellman_residual > tol * scale) {
        std::ostringstream os;
        os << "optimal value Bellman residual " << out.bellman_residual << " exceeds tolerance " << tol;
        throw NumericalError(os.str());
    }
    return out;
}

ActionClassification classify_optimal_actions(const QFn& q_star, double tol) {
    ActionClassification out;
    out.optimal.resize(static_cast<std::size_t>(q_star.rows()));
    for (Eigen::Index s = 0; s < q_star.rows(); ++s) {
        const double best = q_star.row(s).minCoeff();
        for (Eigen::Index a = 0; a < q_star.cols(); ++a) {
            const double gap = q_star(s, a) - best;
            if (gap <= tol) out.optimal[static_cast<std::size_t>(s)].push_back(static_cast<int>(a));
            if (gap >= tol / 10.0 && gap <= 10.0 * tol) {
                std::ostringstream os;
                os << "ambiguous optimality at s=" << s << ", a=" << a << ": gap " << gap
                   << " is within a factor 10 of classify_tol " << tol;
                out.warnings.push_back(os.str());
            }
        }
    }
    return out;
}

GapValues gap_values(const QFn& q_star, const std::vector<std::vector<int>>& optimal_actions) {
    const Eigen::Index S = q_star.rows();
    const Eigen::Index A = q_star.cols();
    if (static_cast<Eigen::Index>(optimal_actions.size()) != S)
        throw ValidationError("optimal action sets do not match Q*");
    GapValues out;
    out.delta_z = q_star.colwise() - q_star.rowwise().minCoeff();
    out.delta_star = Gap::infinite();
    for (Eigen::Index s = 0; s < S; ++s) {
        const auto& opt = optimal_actions[static_cast<std::size_t>(s)];
        Gap g = Gap::infinite();
        for (Eigen::Index a = 0; a < A; ++a) {
            if (std::find(opt.begin(), opt.end(), static_cast<int>(a)) != opt.end()) continue;
            const double d = out.delta_z(s, a);
            if (g.is_infinite() || d < g.value()) g = Gap::finite(d);
        }
        out.delta_s.push_back(g);
        if (!g.is_infinite() && (out.delta_star.is_infinite() || g.value() < out.delta_star.value()))
            out.delta_star = g;
    }
    return out;
}

Policy maximal_entropy_policy(int num_actions, const std::vector<std::vector<int>>& optimal_actions) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(optimal_actions.size()), num_actions);
    for (std::size_t s = 0; s < optimal_actions.size(); ++s) {
        const auto& opt = optimal_actions[s];
        if (opt.empty()) throw ValidationError("empty optimal action set");
        for (int a : opt) p(static_cast<Eigen::Index>(s), a) = 1.0 / static_cast<double>(opt.size());
    }
    return Policy::from_trusted(std::move(p));
}

bool OptimalityData::nu_star_full_support() const {
    return nu_star.has_value() && nu_star->weights().minCoeff() > 0.0;
}

OptimalityData compute_optimality(const Mdp& m, double solve_tol, double classify_tol) {
    OptimalityData od{solve_optimal(m, solve_tol), {}, {}, {}, std::nullopt, classify_tol};
    od.classification = classify_optimal_actions(od.solution.q_star, classify_tol);
    od.gaps = gap_values(od.solution.q_star, od.classification.optimal);
    od.pi_star_u = maximal_entropy_policy(m.num_actions(), od.classification.optimal);
    try {
        od.nu_star = stationary_distribution(m, od.pi_star_u);
    } catch (const NumericalError&) {
        od.nu_star.reset();
    }
    return od;
}

namespace {

bool is_optimal(const OptimalityData& od, int s, int a) {
    const auto& opt = od.optimal_actions()[static_cast<std::size_t>(s)];
    return std::binary_search(opt.begin(), opt.end(), a);
}

}  // namespace

double dist_weighted(const Policy& pi, const OptimalityData& od, const StateDistribution& rho) {
    return rho.weights().dot(od.gaps.delta_z.cwiseProduct(pi.probs()).rowwise().sum());
}

Eigen::VectorXd off_support_mass(const Policy& pi, const OptimalityData& od) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(pi.num_states());
    for (int s = 0; s < pi.num_states(); ++s)
        for (int a = 0; a < pi.num_actions(); ++a)
            if (!is_optimal(od, s, a)) out(s) += pi(s, a);
    return out;
}

Eigen::VectorXd min_optimal_prob(const Policy& pi, const OptimalityData& od) {
    Eigen::VectorXd out(pi.num_states());
    for (int s = 0; s < pi.num_states(); ++s) {
        double lo = 1.0;
        for (int a : od.optimal_actions()[static_cast<std::size_t>(s)]) lo = std::min(lo, pi(s, a));
        out(s) = lo;
    }
    return out;
}

double dist_l1_to_optimal_set(const Policy& pi, const OptimalityData& od) {
    return 2.0 * off_support_mass(pi, od).maxCoeff();
}

double dist_inf_to_pistar_u(const Policy& pi, const OptimalityData& od) {
    return (pi.probs() - od.pi_star_u.probs()).cwiseAbs().maxCoeff();
}

MismatchRatios mismatch_ratios(const Mdp& m, const OptimalityData& od, const StateDistribution& rho) {
    MismatchRatios out;
    const int S = m.num_states();
    if (od.nu_star_full_support()) {
        const Eigen::VectorXd& nu = od.nu_star->weights();
        double vr = 0.0;
        for (Eigen::Index r = 0; r < m.transition().rows(); ++r)
            for (int t = 0; t < S; ++t) vr = std::max(vr, m.transition()(r, t) / nu(t));
        out.varrho = m.gamma() * vr;
        out.rho_over_nu = rho.weights().cwiseQuotient(nu).maxCoeff();
    }
    const StateDistribution d = discounted_visitation(m, od.pi_star_u, rho);
    double ratio = 0.0;
    for (int s = 0; s < S; ++s) {
        if (rho(s) > 0.0) {
            ratio = std::max(ratio, d(s) / rho(s));
        } else if (d(s) > 0.0) {
            ratio = std::numeric_limits<double>::infinity();
        }
    }
    out.d_over_rho = ratio;
    return out;
}

}  // namespace hpmd
