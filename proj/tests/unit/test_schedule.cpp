#include "hpmd/errors.hpp"
#include "hpmd/schedule.hpp"

#include <doctest.h>

#include <cmath>

using namespace hpmd;

TEST_CASE("linear schedule") {
    const StepParams p = schedule_params({ScheduleKind::Linear, 0.9}, 0);
    CHECK(p.eta == doctest::Approx(1.0 / 0.81).epsilon(1e-14));
    CHECK(p.tau == doctest::Approx((1.0 / 0.9 - 1.0) * 0.81).epsilon(1e-14));
}

TEST_CASE("sublinear offsets") {
    CHECK(sublinear_offset(0.9) == 9);
    CHECK(sublinear_offset(0.5) == 1);
    CHECK(sublinear_offset(0.75) == 3);
    CHECK(sublinear_offset(0.8) == 4);
    const StepParams p = schedule_params({ScheduleKind::Sublinear, 0.9}, 0);
    CHECK(p.eta == 9.0);
    CHECK(p.tau == doctest::Approx(1.0 / 81.0));
}

TEST_CASE("stochastic schedules") {
    ScheduleSpec s{ScheduleKind::ShpmdLinear, 0.9, 4};
    CHECK(schedule_params(s, 0).eta == doctest::Approx(std::pow(0.9, -0.5) * std::sqrt(std::log(4.0) * 0.1)));
    ScheduleSpec li{ScheduleKind::ShpmdLastIterate, 0.9, 4, 0.25};
    for (int k = 0; k < 5; ++k)
        CHECK(schedule_params(li, k).eta ==
              doctest::Approx(std::pow(0.9, -0.25 * (k + 1)) * std::sqrt(std::log(4.0) * 0.1)));
    // Small beta approaches the linear exponent.
    li.beta = 1e-9;
    CHECK(schedule_params(li, 3).eta == doctest::Approx(schedule_params(s, 3).eta).epsilon(1e-8));
    li.beta = 0.5;
    CHECK_THROWS_AS(validate_schedule(li), ValidationError);
}

TEST_CASE("property: schedule invariants over k") {
    for (double g : {0.3, 0.5, 0.8, 0.9, 0.99}) {
        const int k0 = sublinear_offset(g);
        CHECK(k0 == static_cast<int>(std::ceil(g / (1.0 - g) - 1e-9)));
        for (int k = 0; k < 100; ++k) {
            for (ScheduleKind kind :
                 {ScheduleKind::Linear, ScheduleKind::Sublinear, ScheduleKind::ShpmdLinear, ScheduleKind::ShpmdLastIterate}) {
                const StepParams p = schedule_params({kind, g, 3}, k);
                CHECK(p.eta > 0.0);
                CHECK(p.tau >= 0.0);
                if (kind != ScheduleKind::Sublinear && !p.saturated)
                    CHECK((1.0 + p.eta * p.tau) * g == doctest::Approx(1.0).epsilon(1e-12));
            }
            const StepParams s = schedule_params({ScheduleKind::Sublinear, g}, k);
            CHECK(s.eta == k + k0);
            CHECK(s.tau * s.eta * s.eta == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("eta overflow is capped and flagged") {
    const StepParams p = schedule_params({ScheduleKind::Linear, 0.5}, 2000);
    CHECK(p.saturated);
    CHECK(p.eta == kEtaCap);
}

TEST_CASE("schedule names round-trip and bad inputs are rejected") {
    for (ScheduleKind k :
         {ScheduleKind::Linear, ScheduleKind::Sublinear, ScheduleKind::ShpmdLinear, ScheduleKind::ShpmdLastIterate})
        CHECK(parse_schedule_kind(schedule_name(k)) == k);
    CHECK(is_stochastic(ScheduleKind::ShpmdLinear));
    CHECK(!is_stochastic(ScheduleKind::Linear));
    CHECK_THROWS_AS(parse_schedule_kind("fast"), ValidationError);
    CHECK_THROWS_AS(validate_schedule({ScheduleKind::Linear, 1.0}), ValidationError);
}
