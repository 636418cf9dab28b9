#pragma once

// Reference computations that share no code path with the solvers they check.

#include "hpmd/mdp.hpp"

#include <string>
#include <vector>

namespace hpmd::oracle {

/// Kernel families, spelled out independently of Geometry.
enum class Kernel { Entropy, Power, TsallisLow };

/// v(x) for the oracle's own kernel table. Power covers pnorm:p and tsallis:q>1.
double kernel_value(Kernel k, double param, double x);

/// Brute-force minimiser of
///   F(p) = sum_i (eta Q_i - theta_i) p_i + (1 + eta tau) v(p_i)
/// over the simplex, by a 0.01 grid followed by pairwise pattern search.
/// Meant for |A| <= 3.
Eigen::VectorXd brute_force_step(Kernel k, double param, const Eigen::VectorXd& theta, const Eigen::VectorXd& q,
                                 double eta, double tau);

/// Policy evaluation by fixed-point iteration to tolerance tol.
ValueFn iterative_value(const Mdp& m, const Policy& pi, double tol = 1e-14);

/// Optimal value by value iteration.
ValueFn value_iteration(const Mdp& m, double tol = 1e-14);

/// Best deterministic policy by exhaustive enumeration (|A|^|S| policies).
std::vector<int> enumerate_optimal(const Mdp& m);

/// Exact finite-horizon Q: E[sum_{t<T} gamma^t c(s_t,a_t) | s_0=s, a_0=a] by backward recursion.
QFn truncated_q(const Mdp& m, const Policy& pi, int horizon);

}  // namespace hpmd::oracle
