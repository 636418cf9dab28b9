#include "hpmd/bregman.hpp"

#include "hpmd/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace hpmd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLowest = std::numeric_limits<double>::lowest();
constexpr double kPositivityFloor = 1e-300;
constexpr double kResidualTol = 1e-13;
constexpr int kMaxBisection = 200;

double parse_param(std::string_view text, std::string_view what) {
    const std::string s(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno != 0 || !std::isfinite(v))
        throw ValidationError("malformed " + std::string(what) + " parameter '" + s + "'");
    return v;
}

}  // namespace

Geometry Geometry::entropy() { return Geometry(GeometryKind::NegativeEntropy, 0.0); }

Geometry Geometry::pnorm(double p) {
    if (!(p > 1.0 && p <= 16.0)) throw ValidationError("pnorm exponent must lie in (1, 16]");
    return Geometry(GeometryKind::PNorm, p);
}

Geometry Geometry::tsallis(double q) {
    if (!(q > 0.0 && q <= 16.0) || q == 1.0)
        throw ValidationError("tsallis index must lie in (0, 1) or (1, 16]");
    return Geometry(GeometryKind::Tsallis, q);
}

Geometry Geometry::parse(std::string_view text) {
    if (text == "entropy") return entropy();
    const auto colon = text.find(':');
    if (colon != std::string_view::npos) {
        const auto head = text.substr(0, colon);
        const auto tail = text.substr(colon + 1);
        if (head == "pnorm") return pnorm(parse_param(tail, "pnorm"));
        if (head == "tsallis") return tsallis(parse_param(tail, "tsallis"));
    }
    throw ValidationError("unknown geometry '" + std::string(text) +
                          "' (expected entropy, pnorm:<p> or tsallis:<q>)");
}

std::string Geometry::name() const {
    switch (kind_) {
        case GeometryKind::NegativeEntropy: return "entropy";
        case GeometryKind::PNorm: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "pnorm:%g", param_);
            return buf;
        }
        case GeometryKind::Tsallis: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "tsallis:%g", param_);
            return buf;
        }
    }
    return "unknown";
}

double Geometry::v(double x) const {
    switch (kind_) {
        case GeometryKind::NegativeEntropy: return x > 0.0 ? x * std::log(x) : 0.0;
        case GeometryKind::PNorm: return std::pow(x, param_);
        case GeometryKind::Tsallis: return param_ > 1.0 ? std::pow(x, param_) : -std::pow(x, param_);
    }
    return 0.0;
}

double Geometry::grad_v(double x) const {
    switch (kind_) {
        case GeometryKind::NegativeEntropy: return std::log(x) + 1.0;
        case GeometryKind::PNorm: return param_ * std::pow(x, param_ - 1.0);
        case GeometryKind::Tsallis:
            return param_ > 1.0 ? param_ * std::pow(x, param_ - 1.0)
                                : -param_ * std::pow(x, param_ - 1.0);
    }
    return 0.0;
}

double Geometry::conj_grad(double y) const {
    switch (kind_) {
        case GeometryKind::NegativeEntropy: return std::exp(y - 1.0);
        case GeometryKind::PNorm: return y > 0.0 ? std::pow(y / param_, 1.0 / (param_ - 1.0)) : 0.0;
        case GeometryKind::Tsallis:
            if (param_ > 1.0) return y > 0.0 ? std::pow(y / param_, 1.0 / (param_ - 1.0)) : 0.0;
            return y < 0.0 ? std::pow(-y / param_, 1.0 / (param_ - 1.0)) : kInf;
    }
    return 0.0;
}

std::optional<double> Geometry::subgrad_at_zero() const {
    if (kind_ == GeometryKind::PNorm || (kind_ == GeometryKind::Tsallis && param_ > 1.0)) return 0.0;
    return std::nullopt;
}

double Geometry::range_bound(int num_actions) const {
    switch (kind_) {
        case GeometryKind::NegativeEntropy: return 2.0 * std::log(static_cast<double>(num_actions));
        case GeometryKind::PNorm: return 2.0;
        case GeometryKind::Tsallis: return param_ > 1.0 ? 2.0 : 2.0 * num_actions;
    }
    return 0.0;
}

double dgf_value(const Geometry& g, const Eigen::VectorXd& p) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) < 0.0) throw ValidationError("dgf_value expects a nonnegative vector");
        acc += g.v(p(i));
    }
    return acc;
}

DualPolicyState init_dual_state(const Geometry& g, const Policy& pi0) {
    const int S = pi0.num_states();
    const int A = pi0.num_actions();
    Eigen::MatrixXd duals(S, A);
    const auto sub0 = g.subgrad_at_zero();
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            const double p = pi0(s, a);
            if (p > 0.0) {
                duals(s, a) = g.kind() == GeometryKind::NegativeEntropy ? std::log(p) : g.grad_v(p);
            } else if (sub0) {
                duals(s, a) = *sub0;
            } else {
                throw ValidationError("initial policy has a zero entry at s=" + std::to_string(s) +
                                      " but " + g.name() + " has no finite subgradient at 0");
            }
        }
    }
    return {duals, pi0};
}

EntropyStep mirror_step_entropy(const Eigen::VectorXd& logits, const Eigen::VectorXd& q, double eta,
                                double tau) {
    if (logits.size() != q.size() || logits.size() == 0) throw ValidationError("logit/Q size mismatch");
    if (!logits.allFinite()) throw ValidationError("logits must be finite");
    if (!(eta >= 0.0) || !(tau >= 0.0)) throw ValidationError("eta and tau must be nonnegative");
    const double denom = 1.0 + eta * tau;
    const double qmin = q.minCoeff();
    EntropyStep out;
    Eigen::VectorXd z(logits.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double shifted = q(i) - qmin;
        z(i) = (logits(i) - (shifted == 0.0 ? 0.0 : eta * shifted)) / denom;
    }
    const double zmax = z.maxCoeff();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) sum += std::exp(z(i) - zmax);
    const double lse = zmax + std::log(sum);
    out.logits = z.array() - lse;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (!(out.logits(i) > kLowest)) {
            out.logits(i) = kLowest;
            out.saturated = true;
        }
    }
    // Scalar exp: Eigen's packet exp clamps its argument and returns denormals instead of 0.
    out.probs.resize(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) out.probs(i) = std::exp(out.logits(i));
    out.probs /= out.probs.sum();
    return out;
}

GeneralStep mirror_step(const Geometry& g, const Eigen::VectorXd& duals, const Eigen::VectorXd& q,
                        double eta, double tau) {
    const Eigen::Index n = duals.size();
    if (q.size() != n || n == 0) throw ValidationError("dual/Q size mismatch");
    if (!duals.allFinite()) throw ValidationError("duals must be finite");
    if (!(eta >= 0.0) || !(tau >= 0.0)) throw ValidationError("eta and tau must be nonnegative");
    const double denom = 1.0 + eta * tau;
    const double qmin = q.minCoeff();
    Eigen::VectorXd a(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double shifted = q(i) - qmin;
        a(i) = duals(i) - (shifted == 0.0 ? 0.0 : eta * shifted);
    }
    const double amax = a.maxCoeff();

    auto residual = [&](double lambda) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) acc += g.conj_grad((a(i) - lambda) / denom);
        return acc - 1.0;
    };

    // At lo the best action alone carries mass > 1; at hi every action carries <= 1/n.
    double lo = amax - denom * g.grad_v(1.0) - 1.0;
    double hi = amax - denom * g.grad_v(1.0 / static_cast<double>(n)) + 1e-12 * (1.0 + std::abs(amax));
    double width = std::max(1.0, hi - lo);
    for (int e = 0; residual(lo) < 0.0; ++e) {
        if (e > kMaxBisection) throw NumericalError("mirror step: cannot bracket the multiplier");
        lo -= width;
        width *= 2.0;
    }
    width = std::max(1.0, hi - lo);
    for (int e = 0; residual(hi) > 0.0; ++e) {
        if (e > kMaxBisection) throw NumericalError("mirror step: cannot bracket the multiplier");
        hi += width;
        width *= 2.0;
    }

    GeneralStep out;
    double lambda = 0.5 * (lo + hi);
    for (int it = 0; it < kMaxBisection; ++it) {
        out.iterations = it + 1;
        lambda = 0.5 * (lo + hi);
        const double r = residual(lambda);
        if (std::abs(r) <= kResidualTol || lambda <= lo || lambda >= hi) break;
        if (r > 0.0) lo = lambda; else hi = lambda;
    }
    if (std::abs(residual(lambda)) > 1e-9)
        throw NumericalError("mirror step: multiplier search did not converge");

    out.duals.resize(n);
    out.probs.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double theta = (a(i) - lambda) / denom;
        if (!(theta > kLowest)) theta = kLowest;
        out.duals(i) = theta;
        double p = g.conj_grad(theta);
        if (g.needs_positivity_floor() && p < kPositivityFloor) {
            p = kPositivityFloor;
            out.floored = true;
        }
        out.probs(i) = p;
    }
    out.probs /= out.probs.sum();
    out.lambda = lambda - eta * qmin;
    return out;
}

}  // namespace hpmd
