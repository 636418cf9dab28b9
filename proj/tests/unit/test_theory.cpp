#include "helpers.hpp"

#include "hpmd/environments.hpp"
#include "hpmd/theory.hpp"

#include <doctest.h>

#include <cmath>

using namespace hpmd;

TEST_CASE("constants are not applicable when every action is optimal") {
    const Mdp m = testutil::make(1, 2, 0.5, {0.3, 0.3}, {1.0, 1.0});
    const OptimalityData od = compute_optimality(m);
    const TheoryConstants tc = theory_constants(m, od, Geometry::entropy(), Policy::uniform(1, 2));
    CHECK(!tc.applicable);
    CHECK(!tc.reason.empty());
    CHECK_THROWS(finite_time_horizon(tc, 2.0, 0.1));
}

TEST_CASE("C_gamma at gamma = 0.5, C = 1") {
    const Mdp m = testutil::make(1, 2, 0.5, {0.0, 1.0}, {1.0, 1.0});
    const OptimalityData od = compute_optimality(m);
    const TheoryConstants tc = theory_constants(m, od, Geometry::entropy(), Policy::uniform(1, 2));
    REQUIRE(tc.applicable);
    CHECK(tc.c_gamma == doctest::Approx(std::exp(2.0 / ((1.0 - 0.125) * 0.5 * 0.5))).epsilon(1e-12));
    CHECK(tc.delta_star == doctest::Approx(1.0));
    CHECK(tc.phi == doctest::Approx(2.0 * std::log(2.0)));
}

TEST_CASE("counterexample escape horizon") {
    for (double eps : {0.5, 0.1, 0.02}) {
        const double d = eps * 0.81 / 2.0;
        const double want = std::log(std::log(3.0 * 0.81 / (4.0 * d)) * (1.0 - 0.729)) / std::log(1.0 / 0.9) / 2.0;
        CHECK(bounds::counterexample_kbar_raw(0.9, d) == doctest::Approx(want).epsilon(1e-12));
        CHECK(bounds::counterexample_kbar(0.9, d) == doctest::Approx(std::max(0.0, want)).epsilon(1e-12));
    }
    // Raw value rises as the gap shrinks.
    CHECK(bounds::counterexample_kbar_raw(0.9, 0.0405) < bounds::counterexample_kbar_raw(0.9, 0.0081));
    // No positive escape horizon when the log argument is at most 1.
    CHECK(bounds::counterexample_kbar(0.9, 10.0) == 0.0);
}

TEST_CASE("closed-form bounds at k = 0") {
    CHECK(bounds::linear_gap(1.0, 0, 0.5, 2) == doctest::Approx(1.0 + 8.0 * std::log(2.0)));
    CHECK(bounds::linear_gap_general(1.0, 0, 0.5, 2.0) == doctest::Approx(17.0));
    CHECK(bounds::stochastic_gap(0, 0.8, 2, 1.0) ==
          doctest::Approx((32.0 * std::sqrt(std::log(2.0)) + 1.0) / (std::pow(0.2, 1.5) * 0.8)));
    CHECK(bounds::linear_gap(1.0, 3, 0.5, 2) == doctest::Approx(0.125 * (1.0 + 8.0 * std::log(2.0))));
}

TEST_CASE("property: envelopes and bounds decrease in k") {
    RandomMdpParams p;
    p.num_states = 5;
    p.gamma = 0.7;
    p.seed = 3;
    const Mdp m = make_random_mdp(p);
    const OptimalityData od = compute_optimality(m);
    const TheoryConstants tc = theory_constants(m, od, Geometry::entropy(), Policy::uniform(5, 3));
    REQUIRE(tc.applicable);
    CHECK(tc.k1 >= 0.0);
    CHECK(tc.kbar1 > tc.k1);
    for (int k = 1; k < 60; ++k) {
        CHECK(tc.linear_envelope(k) <= tc.linear_envelope(k - 1));
        CHECK(tc.stochastic_envelope(k) <= tc.stochastic_envelope(k - 1));
        CHECK(tc.stochastic_probability(k) >= tc.stochastic_probability(k - 1));
        CHECK(bounds::linear_gap(1.0, k, 0.7, 3) < bounds::linear_gap(1.0, k - 1, 0.7, 3));
    }
    CHECK(tc.linear_iterations_for(1e-6) >= tc.k1);
}

TEST_CASE("unguaranteed combinations") {
    CHECK(!unguaranteed_reason(Geometry::entropy(), ScheduleKind::Linear));
    CHECK(!unguaranteed_reason(Geometry::pnorm(2), ScheduleKind::Linear));
    CHECK(unguaranteed_reason(Geometry::pnorm(2), ScheduleKind::Sublinear));
    CHECK(unguaranteed_reason(Geometry::tsallis(2), ScheduleKind::ShpmdLinear));
}

TEST_CASE("finite-time horizon is available for pnorm:2") {
    const Mdp m = testutil::bandit();
    const OptimalityData od = compute_optimality(m);
    const TheoryConstants tc = theory_constants(m, od, Geometry::pnorm(2.0), Policy::uniform(1, 2));
    REQUIRE(tc.applicable);
    CHECK(tc.k2_finite >= 0.0);
    CHECK(finite_time_horizon(tc, 2.0, 0.01) >= 2.0 * tc.k2_finite);
}
