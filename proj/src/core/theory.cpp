#include "hpmd/theory.hpp"

#include "hpmd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hpmd {

namespace {

double log_base(double base, double x) { return std::log(x) / std::log(base); }
double clamp0(double x) { return std::isfinite(x) ? std::max(0.0, x) : (x > 0 ? x : 0.0); }

}  // namespace

namespace bounds {

double linear_gap(double gap0, int k, double gamma, int num_actions) {
    return std::pow(gamma, k) * (gap0 + 4.0 * std::log(static_cast<double>(num_actions)) / (1.0 - gamma));
}

double linear_gap_general(double gap0, int k, double gamma, double phi) {
    return std::pow(gamma, k) * (gap0 + 4.0 * phi / (1.0 - gamma));
}

double sublinear_gap(double gap0, int k, double gamma, int num_actions) {
    const double kk = static_cast<double>(k + sublinear_offset(gamma));
    const double k0 = sublinear_offset(gamma);
    return (k0 * gap0 + 4.0 * std::log(3.0 * kk) * std::log(static_cast<double>(num_actions)) / (1.0 - gamma)) / kk;
}

double weighted_linear(double prefactor, double dist0, int k, double gamma, int num_actions) {
    return prefactor * std::pow(gamma, k) / (1.0 - gamma) *
           (dist0 + 4.0 * std::log(static_cast<double>(num_actions)));
}

double weighted_sublinear(double prefactor, double dist0, int k, double gamma, int num_actions) {
    const double k0 = sublinear_offset(gamma);
    const double kk = k + k0;
    return prefactor * std::pow(gamma, k) *
           (k0 * dist0 + 4.0 * std::log(3.0 * kk) * std::log(static_cast<double>(num_actions))) /
           ((1.0 - gamma) * kk);
}

double stochastic_gap(int k, double gamma, int num_actions, double cost_bound) {
    return std::pow(gamma, 0.5 * k) * (32.0 * std::sqrt(std::log(static_cast<double>(num_actions))) + cost_bound) /
           (std::pow(1.0 - gamma, 1.5) * gamma);
}

double counterexample_kbar_raw(double gamma, double delta) {
    const double inner = std::log(3.0 * gamma * gamma / (4.0 * delta)) * (1.0 - gamma * gamma * gamma);
    if (!(inner > 0.0)) return -std::numeric_limits<double>::infinity();
    return log_base(1.0 / gamma, inner) / 2.0;
}

}  // namespace bounds

TheoryConstants theory_constants(const Mdp& m, const OptimalityData& od, const Geometry& g,
                                 const Policy& pi0) {
    TheoryConstants tc;
    const double gam = m.gamma();
    const int A = m.num_actions();
    const double C = m.cost_bound();
    const double logA = std::log(static_cast<double>(A));
    tc.num_actions = A;
    tc.gamma = gam;
    tc.cost_bound = C;
    tc.phi = g.range_bound(A);
    for (int s = 0; s < pi0.num_states(); ++s)
        for (int a = 0; a < A; ++a)
            if (pi0(s, a) > 0.0) tc.max_abs_dual0 = std::max(tc.max_abs_dual0, std::abs(g.grad_v(pi0(s, a))));

    if (od.gaps.delta_star.is_infinite()) {
        tc.reason = "every action is optimal in every state (Delta* infinite)";
        return tc;
    }
    const StateDistribution rho = StateDistribution::uniform(m.num_states());
    const MismatchRatios mr = mismatch_ratios(m, od, rho);
    if (!mr.varrho) {
        tc.reason = "stationary distribution of pi*_U lacks full support";
        return tc;
    }
    if (!(gam > 0.0)) {
        tc.reason = "gamma = 0";
        return tc;
    }
    tc.applicable = true;
    const double D = od.gaps.delta_star.value();
    const double vr = *mr.varrho;
    tc.delta_star = D;
    tc.varrho = vr;

    // Deterministic linear schedule.
    tc.k1 = clamp0(std::ceil(3.0 * log_base(gam, D * (1.0 - gam) / (2.0 * vr * (4.0 * logA + C)))));
    tc.c_gamma = std::exp(2.0 * C / ((1.0 - gam * gam * gam) * (1.0 - gam) * gam));
    {
        int k = static_cast<int>(tc.k1) + 1;
        while (D * std::pow(gam, -2.0 * k - 1.0) < 5.0 * k * std::log(1.0 / gam)) ++k;
        tc.kbar1 = k;
    }
    tc.a_const = 2.0 * vr * (4.0 * logA + C) / ((1.0 - gam) * (1.0 - gam * gam) * gam);
    tc.b_const = 4.0 * gam * C * A * tc.c_gamma / ((1.0 - std::sqrt(gam)) * (1.0 - gam) * gam);

    // Deterministic sublinear schedule.
    {
        const double r = 32.0 * vr * logA / (D * (1.0 - gam));
        const double kl = r > 1.0 ? r * std::log(r) : 0.0;
        tc.k1_sublinear = std::pow(kl + 2.0 * sublinear_offset(gam), 3.0);
        tc.c_gamma_sublinear = std::exp(C / (3.0 * (1.0 - gam)));
    }

    // General kernels.
    {
        const double t1 = 3.0 * log_base(gam, D * (1.0 - gam) / (2.0 * vr * (4.0 * tc.phi + C)));
        const double t2 = 0.5 * log_base(gam, D * (1.0 - gam * gam * gam) * (1.0 - gam) * gam /
                                                   (4.0 * (tc.max_abs_dual0 + C)));
        tc.k1_general = clamp0(std::ceil(std::max(t1, t2)));
        if (g.subgrad_at_zero()) {
            const double vbar = std::abs(g.grad_v(1.0));
            const double u1 = log_base(gam, D * (1.0 - gam * gam * gam) * (1.0 - gam) * gam /
                                                (4.0 * (tc.max_abs_dual0 + C + vbar)));
            const double u2 = 3.0 * log_base(gam, D * (1.0 - gam) / (2.0 * vr * (8.0 + C)));
            tc.k2_finite = clamp0(std::ceil(clamp0(u1) + clamp0(u2)));
        }
    }

    // Stochastic linear schedule. Both terms are clamped at zero and summed.
    {
        const double sq = std::sqrt(logA);
        const double kl = 4.0 * log_base(gam, D * std::pow(1.0 - gam, 1.5) * gam / (4.0 * vr * (32.0 * sq + C)));
        const double k2 = 4.0 * log_base(gam, D * (1.0 - gam) * std::sqrt(gam) / 8.0);
        tc.k1_stochastic = std::ceil(clamp0(1.5 * kl) + clamp0(k2));
        tc.c_gamma_stochastic = std::exp(2.0 * C * sq / std::pow(1.0 - gam, 1.5));
    }
    return tc;
}

double TheoryConstants::linear_envelope(int k) const {
    return 2.0 * c_gamma * num_actions * std::exp(-delta_star * std::pow(gamma, -2.0 * k - 1.0) / 2.0);
}

double TheoryConstants::linear_gap_envelope(int k) const {
    return 2.0 * cost_bound * num_actions * c_gamma / ((1.0 - gamma) * (1.0 - gamma)) *
           std::exp(-delta_star * std::pow(gamma, -2.0 * k - 1.0) / 2.0);
}

double TheoryConstants::linear_iterations_for(double eps) const {
    const double Dc = 1.0 + eps / 2.0;
    const double t1 = 0.5 * log_base(gamma, delta_star / (2.0 * gamma * std::log(c_gamma * num_actions / eps)));
    return t1 + 2.0 * kbar1 + log_base(gamma, Dc / (2.0 * a_const)) + 2.0 * log_base(gamma, Dc / (2.0 * b_const));
}

double TheoryConstants::sublinear_envelope(int k) const {
    return 2.0 * c_gamma_sublinear * num_actions * std::exp(-delta_star * k * static_cast<double>(k) / 16.0);
}

double TheoryConstants::stochastic_envelope(int k) const {
    const double rate = std::sqrt(std::log(static_cast<double>(num_actions)) * (1.0 - gamma));
    return 2.0 * c_gamma_stochastic * num_actions *
           std::exp(-rate * delta_star * std::pow(gamma, -0.5 * k + 0.5) / 4.0);
}

double TheoryConstants::stochastic_probability(int k) const {
    return 1.0 - 8.0 * std::pow(gamma, k / 6.0) / (1.0 - gamma);
}

double finite_time_horizon(const TheoryConstants& tc, double p, double eps) {
    if (!tc.applicable) throw ValidationError("theory constants not applicable: " + tc.reason);
    const double A = tc.num_actions;
    const double e1 = std::min({eps / A, p * (p - 1.0) * eps, std::pow(A, 1.0 - p) * p / 2.0});
    const double g = tc.gamma;
    const double t2 = log_base(g, (1.0 - g * g) * (1.0 - g) * g * e1 / (8.0 * tc.varrho * (8.0 + tc.cost_bound)));
    const double t3 = tc.max_abs_dual0 > 0.0 ? log_base(g, e1 / (8.0 * tc.max_abs_dual0)) : 0.0;
    return 2.0 * tc.k2_finite + clamp0(t2) + clamp0(t3);
}

std::optional<std::string> unguaranteed_reason(const Geometry& g, ScheduleKind kind) {
    if (kind == ScheduleKind::Sublinear && g.kind() != GeometryKind::NegativeEntropy)
        return "sublinear schedule is only analysed for the entropy kernel";
    if (is_stochastic(kind) && g.kind() != GeometryKind::NegativeEntropy)
        return "stochastic schedules are only analysed for the entropy kernel";
    return std::nullopt;
}

}  // namespace hpmd
