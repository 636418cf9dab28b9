#include "hpmd/schedule.hpp"

#include "hpmd/errors.hpp"

#include <cmath>

namespace hpmd {

ScheduleKind parse_schedule_kind(const std::string& name) {
    if (name == "linear") return ScheduleKind::Linear;
    if (name == "sublinear") return ScheduleKind::Sublinear;
    if (name == "shpmd-linear") return ScheduleKind::ShpmdLinear;
    if (name == "shpmd-last-iterate") return ScheduleKind::ShpmdLastIterate;
    throw ValidationError("unknown schedule '" + name + "'");
}

std::string schedule_name(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::Linear: return "linear";
        case ScheduleKind::Sublinear: return "sublinear";
        case ScheduleKind::ShpmdLinear: return "shpmd-linear";
        case ScheduleKind::ShpmdLastIterate: return "shpmd-last-iterate";
    }
    return "unknown";
}

bool is_stochastic(ScheduleKind kind) {
    return kind == ScheduleKind::ShpmdLinear || kind == ScheduleKind::ShpmdLastIterate;
}

void validate_schedule(const ScheduleSpec& spec) {
    if (!(spec.gamma > 0.0 && spec.gamma < 1.0)) throw ValidationError("schedule gamma must lie in (0, 1)");
    if (spec.kind == ScheduleKind::ShpmdLastIterate && !(spec.beta > 0.0 && spec.beta < 0.5))
        throw ValidationError("last-iterate beta must lie in (0, 1/2)");
    if (is_stochastic(spec.kind) && spec.num_actions < 1) throw ValidationError("num_actions must be >= 1");
    if (!(spec.eta_scale > 0.0) || !std::isfinite(spec.eta_scale))
        throw ValidationError("eta_scale must be positive");
}

int sublinear_offset(double gamma) {
    return static_cast<int>(std::ceil(gamma / (1.0 - gamma) - 1e-9));
}

namespace {

// gamma^{-e} evaluated in log space, with a saturation flag.
double inverse_power(double gamma, double e, bool& saturated) {
    const double v = std::exp(-e * std::log(gamma));
    if (!std::isfinite(v) || v > kEtaCap) {
        saturated = true;
        return kEtaCap;
    }
    return v;
}

}  // namespace

StepParams schedule_params(const ScheduleSpec& spec, int k) {
    validate_schedule(spec);
    if (k < 0) throw ValidationError("iteration index must be nonnegative");
    const double g = spec.gamma;
    StepParams out;
    switch (spec.kind) {
        case ScheduleKind::Linear:
            out.eta = inverse_power(g, 2.0 * (k + 1), out.saturated);
            break;
        case ScheduleKind::Sublinear: {
            const double kk = static_cast<double>(k + sublinear_offset(g));
            out.eta = kk * spec.eta_scale;
            out.tau = 1.0 / (kk * kk);
            return out;
        }
        case ScheduleKind::ShpmdLinear:
        case ScheduleKind::ShpmdLastIterate: {
            const double base = std::sqrt(std::log(static_cast<double>(spec.num_actions)) * (1.0 - g));
            if (base == 0.0) return out;  // single action: nothing to learn
            const double e = spec.kind == ScheduleKind::ShpmdLinear ? 0.5 * (k + 1)
                                                                    : (0.5 - spec.beta) * (k + 1);
            out.eta = base * inverse_power(g, e, out.saturated);
            break;
        }
    }
    out.eta *= spec.eta_scale;
    out.tau = (1.0 / g - 1.0) / out.eta;
    return out;
}

}  // namespace hpmd
