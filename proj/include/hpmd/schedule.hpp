#pragma once

#include <string>

namespace hpmd {

enum class ScheduleKind { Linear, Sublinear, ShpmdLinear, ShpmdLastIterate };

struct ScheduleSpec {
    ScheduleKind kind = ScheduleKind::Linear;
    double gamma = 0.9;
    int num_actions = 2;   ///< only used by the stochastic schedules
    double beta = 0.25;    ///< last-iterate exponent, in (0, 1/2)
    double eta_scale = 1.0;  ///< multiplies eta; anything but 1 breaks the guarantees
};

struct StepParams {
    double eta = 0.0;
    double tau = 0.0;
    bool saturated = false;  ///< eta overflowed and was capped
};

/// Parses "linear", "sublinear", "shpmd-linear" or "shpmd-last-iterate".
ScheduleKind parse_schedule_kind(const std::string& name);
std::string schedule_name(ScheduleKind kind);
bool is_stochastic(ScheduleKind kind);

/// Throws ValidationError on out-of-range gamma / beta.
void validate_schedule(const ScheduleSpec& spec);

/// (eta_k, tau_k) for iteration k >= 0.
///   linear            eta = gamma^{-2(k+1)}, tau = (1/gamma - 1)/eta
///   sublinear         eta = k + k0, tau = 1/(k + k0)^2, k0 = ceil(gamma/(1-gamma))
///   shpmd-linear      eta = gamma^{-(k+1)/2} sqrt(log|A| (1-gamma)), tau as linear
///   shpmd-last-iter.  eta = gamma^{-(1/2-beta)(k+1)} sqrt(log|A| (1-gamma)), tau as linear
StepParams schedule_params(const ScheduleSpec& spec, int k);

/// k0 = ceil(gamma/(1-gamma)), robust to round-off in the quotient.
int sublinear_offset(double gamma);

/// Largest eta the drivers will use before flagging saturation.
inline constexpr double kEtaCap = 1e300;

}  // namespace hpmd
