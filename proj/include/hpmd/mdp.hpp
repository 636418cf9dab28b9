#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace hpmd {

using ValueFn = Eigen::VectorXd;  ///< V(s), length |S|
using QFn = Eigen::MatrixXd;      ///< Q(s,a), |S| x |A|

/// Finite discounted MDP with cost minimisation.
///
/// Transitions are stored as an (|S|*|A|) x |S| matrix whose row s*|A|+a is
/// P(.|s,a). Construction validates and renormalises rows within 1e-12.
class Mdp {
public:
    Mdp(int num_states, int num_actions, double gamma, Eigen::MatrixXd cost,
        Eigen::MatrixXd transition);

    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }
    double gamma() const { return gamma_; }
    const Eigen::MatrixXd& cost() const { return cost_; }
    const Eigen::MatrixXd& transition() const { return transition_; }
    double cost(int s, int a) const { return cost_(s, a); }
    double prob(int s, int a, int next) const { return transition_(row(s, a), next); }
    int row(int s, int a) const { return s * num_actions_ + a; }
    /// C = max |c(s,a)|.
    double cost_bound() const { return cost_bound_; }

private:
    int num_states_;
    int num_actions_;
    double gamma_;
    Eigen::MatrixXd cost_;
    Eigen::MatrixXd transition_;
    double cost_bound_;
};

/// Throws ValidationError describing the first violated precondition.
/// Rows within 1e-12 of stochastic are accepted (and renormalised by Mdp).
void validate_mdp(int num_states, int num_actions, double gamma, const Eigen::MatrixXd& cost,
                  const Eigen::MatrixXd& transition);

/// Stochastic policy pi(a|s) as an |S| x |A| row-stochastic matrix.
class Policy {
public:
    Policy() = default;
    /// Validates nonnegativity and row sums (within 1e-9), then renormalises.
    explicit Policy(Eigen::MatrixXd probs);

    static Policy uniform(int num_states, int num_actions);
    static Policy deterministic(int num_actions, const std::vector<int>& actions);

    int num_states() const { return static_cast<int>(probs_.rows()); }
    int num_actions() const { return static_cast<int>(probs_.cols()); }
    double operator()(int s, int a) const { return probs_(s, a); }
    const Eigen::MatrixXd& probs() const { return probs_; }

    /// Unchecked construction for rows already known to be on the simplex.
    static Policy from_trusted(Eigen::MatrixXd probs);

private:
    Eigen::MatrixXd probs_;
};

/// Probability vector over states.
class StateDistribution {
public:
    StateDistribution() = default;
    explicit StateDistribution(Eigen::VectorXd weights);
    static StateDistribution uniform(int num_states);

    int size() const { return static_cast<int>(weights_.size()); }
    double operator()(int s) const { return weights_(s); }
    const Eigen::VectorXd& weights() const { return weights_; }
    bool full_support(double floor = 0.0) const { return weights_.minCoeff() > floor; }

private:
    Eigen::VectorXd weights_;
};

/// P^pi as an |S| x |S| matrix.
Eigen::MatrixXd policy_transition(const Mdp& m, const Policy& pi);
/// c^pi(s) = sum_a pi(a|s) c(s,a).
Eigen::VectorXd policy_cost(const Mdp& m, const Policy& pi);

/// Solves (I - gamma P^pi) V = c^pi by dense LU.
ValueFn evaluate_policy(const Mdp& m, const Policy& pi);

/// Q(s,a) = c(s,a) + gamma * sum_s' P(s'|s,a) V(s'). The inner sum runs in a
/// fixed order, so actions with identical (cost, transition row) get bitwise
/// identical Q values.
QFn q_from_v(const Mdp& m, const ValueFn& v);

/// Unique nu with nu P^pi = nu. Throws NumericalError if the chain has more
/// than one recurrent class.
StateDistribution stationary_distribution(const Mdp& m, const Policy& pi);

/// d_rho^pi = (1-gamma) rho^T (I - gamma P^pi)^{-1}.
StateDistribution discounted_visitation(const Mdp& m, const Policy& pi,
                                        const StateDistribution& rho);

/// f_rho(pi) = sum_s rho(s) V^pi(s).
double weighted_objective(const Mdp& m, const Policy& pi, const StateDistribution& rho);

/// Right-hand side of the performance-difference identity for start state s:
/// (1/(1-gamma)) E_{s'~d_s^{pi'}} <Q^pi(s',.), pi'(.|s') - pi(.|s')>,
/// which equals V^{pi'}(s) - V^pi(s).
double perf_diff_rhs(const Mdp& m, const Policy& pi, const Policy& pi_prime, int s);

}  // namespace hpmd
