#pragma once

#include "hpmd/bregman.hpp"
#include "hpmd/optimal.hpp"
#include "hpmd/schedule.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hpmd {

/// Closed-form convergence bounds. All take the MDP-level scalars directly so
/// they can be evaluated without running anything.
namespace bounds {

/// Linear schedule, entropy: gap_k <= gamma^k (gap0 + 4 log|A|/(1-gamma)).
double linear_gap(double gap0, int k, double gamma, int num_actions);
/// Linear schedule, general kernel: gap_k <= gamma^k (gap0 + 4 Phi/(1-gamma)).
double linear_gap_general(double gap0, int k, double gamma, double phi);
/// Sublinear schedule: bound on gap at iterate k+1.
double sublinear_gap(double gap0, int k, double gamma, int num_actions);
/// rho-weighted gap, linear schedule. prefactor = ||rho/nu*||^2 ||d/rho||.
double weighted_linear(double prefactor, double dist0, int k, double gamma, int num_actions);
/// rho-weighted gap, sublinear schedule, at iterate k+1.
double weighted_sublinear(double prefactor, double dist0, int k, double gamma, int num_actions);
/// Stochastic linear schedule: E[gap_k] <= gamma^{k/2}(32 sqrt(log|A|) + C)/((1-gamma)^{3/2} gamma).
double stochastic_gap(int k, double gamma, int num_actions, double cost_bound);
/// Escape horizon of the gap counterexample, unclamped (may be negative or -inf).
double counterexample_kbar_raw(double gamma, double delta);
inline double counterexample_kbar(double gamma, double delta) {
    const double r = counterexample_kbar_raw(gamma, delta);
    return r > 0.0 ? r : 0.0;
}

}  // namespace bounds

/// Local superlinear constants for one (MDP, geometry, schedule, pi0).
struct TheoryConstants {
    bool applicable = false;       ///< Delta* finite and varrho available
    std::string reason;            ///< why not, when not applicable
    int num_actions = 0;
    double gamma = 0.0;
    double cost_bound = 0.0;
    double delta_star = 0.0;
    double varrho = 0.0;
    double phi = 0.0;              ///< range bound of the kernel
    double max_abs_dual0 = 0.0;    ///< max |grad v(pi0)| over finite entries

    // Deterministic linear schedule, entropy.
    double k1 = 0.0;               ///< onset of the superlinear envelope
    double c_gamma = 0.0;
    double kbar1 = 0.0;            ///< first k > k1 with Delta* gamma^{-2k-1} >= 5k log(1/gamma)
    double a_const = 0.0;
    double b_const = 0.0;
    // Deterministic sublinear schedule.
    double k1_sublinear = 0.0;
    double c_gamma_sublinear = 0.0;
    // General kernels.
    double k1_general = 0.0;
    double k2_finite = 0.0;        ///< finite-time exact-optimality horizon (pnorm/tsallis q>1)
    // Stochastic linear schedule.
    double k1_stochastic = 0.0;
    double c_gamma_stochastic = 0.0;

    /// l1 distance envelope at iterate k+1 (deterministic linear, entropy).
    double linear_envelope(int k) const;
    /// Objective-gap envelope derived from it.
    double linear_gap_envelope(int k) const;
    /// Iterations needed for an eps-accurate policy under the linear schedule.
    double linear_iterations_for(double eps) const;
    /// l1 envelope at iterate k+1 (deterministic sublinear).
    double sublinear_envelope(int k) const;
    /// l1 envelope at iterate k (stochastic linear) and its probability level.
    double stochastic_envelope(int k) const;
    double stochastic_probability(int k) const;
};

TheoryConstants theory_constants(const Mdp& m, const OptimalityData& od, const Geometry& g,
                                 const Policy& pi0);

/// Horizon of the finite-time exact-optimality bound, eps-accurate version.
double finite_time_horizon(const TheoryConstants& tc, double p, double eps);

/// Combinations of (geometry, schedule) without a convergence guarantee.
std::optional<std::string> unguaranteed_reason(const Geometry& g, ScheduleKind kind);

}  // namespace hpmd
