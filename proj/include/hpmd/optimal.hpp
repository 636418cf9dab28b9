#pragma once

#include "hpmd/mdp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hpmd {

/// A gap value that may be +infinity (the max-of-empty-set convention).
class Gap {
public:
    Gap() = default;  ///< infinite
    static Gap infinite() { return Gap(); }
    static Gap finite(double v) {
        Gap g;
        g.infinite_ = false;
        g.value_ = v;
        return g;
    }
    bool is_infinite() const { return infinite_; }
    /// Only meaningful when finite.
    double value() const { return value_; }

private:
    bool infinite_ = true;
    double value_ = 0.0;
};

struct OptimalSolution {
    ValueFn v_star;
    QFn q_star;
    std::vector<int> greedy;  ///< deterministic optimal action per state
    int iterations = 0;
    double bellman_residual = 0.0;
};

/// Howard policy iteration, ties broken by lowest action index.
/// Throws NumericalError if the Bellman residual stays above tol.
OptimalSolution solve_optimal(const Mdp& m, double tol = 1e-12, int max_iters = 10000);

struct ActionClassification {
    std::vector<std::vector<int>> optimal;  ///< A*(s), sorted
    std::vector<std::string> warnings;      ///< ambiguity notices
};

/// A*(s) = {a : Q*(s,a) - min_a' Q*(s,a') <= tol}. Gaps inside the band
/// [tol/10, 10 tol] are reported as ambiguous.
ActionClassification classify_optimal_actions(const QFn& q_star, double tol = 1e-8);

struct GapValues {
    Eigen::MatrixXd delta_z;    ///< Q*(s,a) - min_a' Q*(s,a')
    std::vector<Gap> delta_s;   ///< smallest gap to a non-optimal action
    Gap delta_star;             ///< min_s delta_s
};

GapValues gap_values(const QFn& q_star, const std::vector<std::vector<int>>& optimal_actions);

/// Uniform policy over A*(s).
Policy maximal_entropy_policy(int num_actions, const std::vector<std::vector<int>>& optimal_actions);

/// Everything downstream diagnostics need about the optimum.
struct OptimalityData {
    OptimalSolution solution;
    ActionClassification classification;
    GapValues gaps;
    Policy pi_star_u;
    /// Stationary distribution of pi_star_u, absent when not unique.
    std::optional<StateDistribution> nu_star;
    double classify_tol = 1e-8;

    const ValueFn& v_star() const { return solution.v_star; }
    const QFn& q_star() const { return solution.q_star; }
    const std::vector<std::vector<int>>& optimal_actions() const { return classification.optimal; }
    bool nu_star_full_support() const;
};

OptimalityData compute_optimality(const Mdp& m, double solve_tol = 1e-12, double classify_tol = 1e-8);

/// sum_s rho(s) sum_a delta_z(s,a) pi(a|s).
double dist_weighted(const Policy& pi, const OptimalityData& od, const StateDistribution& rho);
/// Exact l1 distance to the optimal policy set: max_s 2 * (mass off A*(s)).
double dist_l1_to_optimal_set(const Policy& pi, const OptimalityData& od);
/// max_{s,a} |pi(a|s) - pi*_U(a|s)|.
double dist_inf_to_pistar_u(const Policy& pi, const OptimalityData& od);
/// Per-state probability mass placed outside A*(s).
Eigen::VectorXd off_support_mass(const Policy& pi, const OptimalityData& od);
/// Per-state min over A*(s) of pi(a|s).
Eigen::VectorXd min_optimal_prob(const Policy& pi, const OptimalityData& od);

struct MismatchRatios {
    std::optional<double> varrho;       ///< gamma max P(s'|s,a)/nu*(s')
    std::optional<double> rho_over_nu;  ///< ||rho/nu*||_inf
    double d_over_rho = 0.0;            ///< ||d_rho^{pi*}/rho||_inf (inf if rho has zeros)
};

MismatchRatios mismatch_ratios(const Mdp& m, const OptimalityData& od, const StateDistribution& rho);

}  // namespace hpmd
