#include "hpmd/mdp.hpp"

#include "hpmd/errors.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace hpmd {

namespace {

constexpr double kRowTol = 1e-12;
constexpr double kPolicyTol = 1e-9;

std::string at(int s, int a) {
    std::ostringstream os;
    os << "(s=" << s << ", a=" << a << ")";
    return os.str();
}

}  // namespace

void validate_mdp(int num_states, int num_actions, double gamma, const Eigen::MatrixXd& cost,
                  const Eigen::MatrixXd& transition) {
    if (num_states < 1) throw ValidationError("num_states must be >= 1");
    if (num_actions < 1) throw ValidationError("num_actions must be >= 1");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ValidationError("discount out of range [0, 1)");
    if (cost.rows() != num_states || cost.cols() != num_actions)
        throw ValidationError("cost must be |S| x |A|");
    if (transition.rows() != static_cast<Eigen::Index>(num_states) * num_actions ||
        transition.cols() != num_states)
        throw ValidationError("transition must be (|S|*|A|) x |S|");
    for (int s = 0; s < num_states; ++s) {
        for (int a = 0; a < num_actions; ++a) {
            if (!std::isfinite(cost(s, a))) throw ValidationError("non-finite cost at " + at(s, a));
            const auto row = transition.row(s * num_actions + a);
            double sum = 0.0;
            for (int t = 0; t < num_states; ++t) {
                const double p = row(t);
                if (!std::isfinite(p) || p < 0.0)
                    throw ValidationError("negative or non-finite transition probability at " +
                                          at(s, a));
                sum += p;
            }
            if (std::abs(sum - 1.0) > kRowTol) {
                std::ostringstream os;
                os << "transition row " << at(s, a) << " sums to " << sum << ", not 1";
                throw ValidationError(os.str());
            }
        }
    }
}

Mdp::Mdp(int num_states, int num_actions, double gamma, Eigen::MatrixXd cost,
         Eigen::MatrixXd transition)
    : num_states_(num_states),
      num_actions_(num_actions),
      gamma_(gamma),
      cost_(std::move(cost)),
      transition_(std::move(transition)) {
    validate_mdp(num_states_, num_actions_, gamma_, cost_, transition_);
    for (Eigen::Index r = 0; r < transition_.rows(); ++r) transition_.row(r) /= transition_.row(r).sum();
    cost_bound_ = cost_.cwiseAbs().maxCoeff();
}

Policy::Policy(Eigen::MatrixXd probs) : probs_(std::move(probs)) {
    if (probs_.rows() < 1 || probs_.cols() < 1) throw ValidationError("empty policy");
    for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
        double sum = 0.0;
        for (Eigen::Index a = 0; a < probs_.cols(); ++a) {
            const double p = probs_(s, a);
            if (!std::isfinite(p) || p < 0.0)
                throw ValidationError("policy has a negative or non-finite entry at " +
                                      at(static_cast<int>(s), static_cast<int>(a)));
            sum += p;
        }
        if (std::abs(sum - 1.0) > kPolicyTol)
            throw ValidationError("policy row " + std::to_string(s) + " does not sum to 1");
        probs_.row(s) /= sum;
    }
}

Policy Policy::uniform(int num_states, int num_actions) {
    return from_trusted(Eigen::MatrixXd::Constant(num_states, num_actions, 1.0 / num_actions));
}

Policy Policy::deterministic(int num_actions, const std::vector<int>& actions) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(actions.size()), num_actions);
    for (std::size_t s = 0; s < actions.size(); ++s) {
        if (actions[s] < 0 || actions[s] >= num_actions) throw ValidationError("action out of range");
        p(static_cast<Eigen::Index>(s), actions[s]) = 1.0;
    }
    return from_trusted(std::move(p));
}

Policy Policy::from_trusted(Eigen::MatrixXd probs) {
    Policy p;
    p.probs_ = std::move(probs);
    return p;
}

StateDistribution::StateDistribution(Eigen::VectorXd weights) : weights_(std::move(weights)) {
    if (weights_.size() < 1) throw ValidationError("empty state distribution");
    for (Eigen::Index s = 0; s < weights_.size(); ++s)
        if (!std::isfinite(weights_(s)) || weights_(s) < 0.0)
            throw ValidationError("state distribution has a negative entry");
    const double sum = weights_.sum();
    if (std::abs(sum - 1.0) > kPolicyTol) throw ValidationError("state distribution does not sum to 1");
    weights_ /= sum;
}

StateDistribution StateDistribution::uniform(int num_states) {
    return StateDistribution(Eigen::VectorXd::Constant(num_states, 1.0 / num_states));
}

namespace {

void check_shapes(const Mdp& m, const Policy& pi) {
    if (pi.num_states() != m.num_states() || pi.num_actions() != m.num_actions())
        throw ValidationError("policy shape does not match MDP");
}

}  // namespace

Eigen::MatrixXd policy_transition(const Mdp& m, const Policy& pi) {
    check_shapes(m, pi);
    const int S = m.num_states();
    const int A = m.num_actions();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(S, S);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            if (pi(s, a) != 0.0) p.row(s) += pi(s, a) * m.transition().row(m.row(s, a));
    return p;
}

Eigen::VectorXd policy_cost(const Mdp& m, const Policy& pi) {
    check_shapes(m, pi);
    return m.cost().cwiseProduct(pi.probs()).rowwise().sum();
}

ValueFn evaluate_policy(const Mdp& m, const Policy& pi) {
    const int S = m.num_states();
    const Eigen::MatrixXd lhs =
        Eigen::MatrixXd::Identity(S, S) - m.gamma() * policy_transition(m, pi);
    const Eigen::VectorXd rhs = policy_cost(m, pi);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
    ValueFn v = lu.solve(rhs);
    // One refinement pass keeps the residual at the round-off floor.
    v += lu.solve(rhs - lhs * v);
    const double scale = 1.0 + m.cost_bound() / (1.0 - m.gamma());
    if (!v.allFinite() || (lhs * v - rhs).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NumericalError("policy evaluation residual above tolerance");
    return v;
}

QFn q_from_v(const Mdp& m, const ValueFn& v) {
    const int S = m.num_states();
    const int A = m.num_actions();
    if (v.size() != S) throw ValidationError("value function length does not match MDP");
    QFn q(S, A);
    const Eigen::MatrixXd& P = m.transition();
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            const int r = m.row(s, a);
            double acc = 0.0;
            for (int t = 0; t < S; ++t) acc += P(r, t) * v(t);
            q(s, a) = m.cost(s, a) + m.gamma() * acc;
        }
    }
    return q;
}

StateDistribution stationary_distribution(const Mdp& m, const Policy& pi) {
    const int S = m.num_states();
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(S, S) - policy_transition(m, pi).transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> rank_check(M);
    rank_check.setThreshold(1e-10);
    if (rank_check.rank() < S - 1)
        throw NumericalError("stationary distribution is not unique (chain has several recurrent classes)");
    Eigen::MatrixXd aug(S + 1, S);
    aug.topRows(S) = M;
    aug.row(S).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S + 1);
    rhs(S) = 1.0;
    Eigen::VectorXd nu = aug.colPivHouseholderQr().solve(rhs);
    if (!nu.allFinite() || (M * nu).cwiseAbs().maxCoeff() > 1e-9)
        throw NumericalError("stationary distribution solve failed");
    nu = nu.cwiseMax(0.0);
    nu /= nu.sum();
    return StateDistribution(nu);
}

StateDistribution discounted_visitation(const Mdp& m, const Policy& pi,
                                        const StateDistribution& rho) {
    const int S = m.num_states();
    if (rho.size() != S) throw ValidationError("distribution length does not match MDP");
    const Eigen::MatrixXd lhs =
        (Eigen::MatrixXd::Identity(S, S) - m.gamma() * policy_transition(m, pi)).transpose();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
    Eigen::VectorXd x = lu.solve(rho.weights());
    x += lu.solve(rho.weights() - lhs * x);
    Eigen::VectorXd d = ((1.0 - m.gamma()) * x).cwiseMax(0.0);
    d /= d.sum();
    return StateDistribution(d);
}

double weighted_objective(const Mdp& m, const Policy& pi, const StateDistribution& rho) {
    if (rho.size() != m.num_states()) throw ValidationError("distribution length does not match MDP");
    return rho.weights().dot(evaluate_policy(m, pi));
}

double perf_diff_rhs(const Mdp& m, const Policy& pi, const Policy& pi_prime, int s) {
    if (s < 0 || s >= m.num_states()) throw ValidationError("state out of range");
    const QFn q = q_from_v(m, evaluate_policy(m, pi));
    Eigen::VectorXd start = Eigen::VectorXd::Zero(m.num_states());
    start(s) = 1.0;
    const StateDistribution d = discounted_visitation(m, pi_prime, StateDistribution(start));
    const Eigen::MatrixXd diff = pi_prime.probs() - pi.probs();
    const Eigen::VectorXd inner = q.cwiseProduct(diff).rowwise().sum();
    return d.weights().dot(inner) / (1.0 - m.gamma());
}

}  // namespace hpmd
