#pragma once

#include "hpmd/mdp.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace hpmd {

enum class GeometryKind { NegativeEntropy, PNorm, Tsallis };

/// Separable distance-generating function w(p) = sum_i v(p_i) on the simplex.
///
/// Supported kernels:
///   entropy      v(x) = x log x
///   pnorm:p      v(x) = x^p,  1 < p <= 16
///   tsallis:q    v(x) = x^q for q > 1, -x^q for q < 1 (0 < q <= 16, q != 1)
class Geometry {
public:
    static Geometry entropy();
    static Geometry pnorm(double p);
    static Geometry tsallis(double q);
    /// Parses "entropy", "pnorm:<p>" or "tsallis:<q>".
    static Geometry parse(std::string_view text);

    GeometryKind kind() const { return kind_; }
    double param() const { return param_; }
    std::string name() const;

    double v(double x) const;
    /// v'(x) for x > 0.
    double grad_v(double x) const;
    /// Derivative of the conjugate of v restricted to [0, inf). May be +inf.
    double conj_grad(double y) const;
    /// Finite element of the subdifferential of v at 0, if one exists.
    std::optional<double> subgrad_at_zero() const;
    /// Range bound Phi with |w(p) - w(p')| <= Phi/2 over the simplex.
    double range_bound(int num_actions) const;
    /// True when iterates may approach 0 without reaching it (tsallis q < 1).
    bool needs_positivity_floor() const { return kind_ == GeometryKind::Tsallis && param_ < 1.0; }

private:
    Geometry(GeometryKind k, double p) : kind_(k), param_(p) {}
    GeometryKind kind_;
    double param_;
};

/// w(p) = sum_i v(p_i).
double dgf_value(const Geometry& g, const Eigen::VectorXd& p);

/// Per-state dual variables together with the policy they induce.
///
/// For the entropy kernel the duals are log-probabilities, normalised after
/// every step (max logit is finite, probabilities are exp(logit)). For other
/// kernels they are the subgradients theta with pi = conj_grad(theta).
struct DualPolicyState {
    Eigen::MatrixXd duals;
    Policy policy;
};

DualPolicyState init_dual_state(const Geometry& g, const Policy& pi0);

struct EntropyStep {
    Eigen::VectorXd logits;  ///< log-probabilities after the step
    Eigen::VectorXd probs;
    bool saturated = false;  ///< some logit hit the finite floor
};

/// Closed-form entropic step: z' = (z - eta Q)/(1 + eta tau), shifted by log-sum-exp.
/// Logits must be finite; Q is shifted by its row minimum first.
EntropyStep mirror_step_entropy(const Eigen::VectorXd& logits, const Eigen::VectorXd& q, double eta,
                                double tau);

struct GeneralStep {
    Eigen::VectorXd duals;  ///< theta' = (theta - eta Q - lambda)/(1 + eta tau)
    Eigen::VectorXd probs;
    double lambda = 0.0;    ///< multiplier of the simplex constraint (unshifted Q)
    int iterations = 0;
    bool floored = false;   ///< positivity floor applied (tsallis q < 1)
};

/// Generic step: solves sum_i conj_grad((theta_i - eta Q_i - lambda)/(1+eta tau)) = 1 by
/// bracketed bisection on lambda.
GeneralStep mirror_step(const Geometry& g, const Eigen::VectorXd& duals, const Eigen::VectorXd& q,
                        double eta, double tau);

}  // namespace hpmd
