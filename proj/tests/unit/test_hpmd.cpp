#include "helpers.hpp"

#include "hpmd/environments.hpp"
#include "hpmd/hpmd.hpp"
#include "hpmd/theory.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace hpmd;

namespace {

ScheduleSpec linear(double g) { return ScheduleSpec{ScheduleKind::Linear, g}; }

}  // namespace

TEST_CASE("zero-cost MDP has zero gap throughout") {
    RandomMdpParams p;
    p.cost_scale = 0.0;
    p.num_states = 4;
    const Mdp m = make_random_mdp(p);
    const RunResult r = run_hpmd(m, Geometry::entropy(), linear(m.gamma()), Policy::uniform(4, 3), 20);
    REQUIRE(r.trace.records.size() == 21u);
    for (const auto& rec : r.trace.records) CHECK(rec.gap_rho == 0.0);
}

TEST_CASE("bandit obeys the linear bound") {
    const Mdp m = testutil::bandit();
    const RunResult r = run_hpmd(m, Geometry::entropy(), linear(0.5), Policy::uniform(1, 2), 60);
    const double gap0 = *r.trace.records[0].gap_nu;
    for (const auto& rec : r.trace.records) CHECK(*rec.gap_nu <= bounds::linear_gap(gap0, rec.k, 0.5, 2) + 1e-12);
}

TEST_CASE("pnorm:2 reaches the deterministic optimum in finitely many steps") {
    const Mdp m = testutil::bandit();
    const Policy pi0 = Policy::uniform(1, 2);
    const RunResult r = run_hpmd(m, Geometry::pnorm(2.0), linear(0.5), pi0, 30);
    const auto tc = theory_constants(m, *r.optimality, Geometry::pnorm(2.0), pi0);
    int first = -1;
    for (const auto& rec : r.trace.records)
        if (rec.dist_l1 == 0.0 && first < 0) first = rec.k;
    REQUIRE(first >= 0);
    CHECK(first <= tc.k2_finite + 1.0);
    for (const auto& rec : r.trace.records)
        if (rec.k >= first) CHECK(rec.dist_l1 == 0.0);
}

TEST_CASE("trace indices are contiguous and snapshots follow snapshot_every") {
    RandomMdpParams p;
    p.num_states = 6;
    p.seed = 9;
    const Mdp m = make_random_mdp(p);
    DiagConfig d;
    d.snapshot_every = 4;
    const RunResult r = run_hpmd(m, Geometry::entropy(), linear(m.gamma()), Policy::uniform(6, 3), 10, d);
    for (std::size_t i = 0; i < r.trace.records.size(); ++i) CHECK(r.trace.records[i].k == static_cast<int>(i));
    std::vector<int> ks;
    for (const auto& s : r.trace.snapshots) ks.push_back(s.k);
    CHECK(ks == std::vector<int>{0, 4, 8, 10});
    for (const auto& rec : r.trace.records) CHECK(*rec.gap_nu >= -1e-9);
}

TEST_CASE("unguaranteed combinations still run but are flagged") {
    const Mdp m = testutil::bandit();
    const RunResult r =
        run_hpmd(m, Geometry::pnorm(2.0), ScheduleSpec{ScheduleKind::Sublinear, 0.5}, Policy::uniform(1, 2), 5);
    bool flagged = false;
    for (const auto& f : r.trace.flags) flagged = flagged || f.rfind("unguaranteed", 0) == 0;
    CHECK(flagged);
}

TEST_CASE("long linear runs saturate without producing NaN") {
    const Mdp m = testutil::bandit();
    const RunResult r = run_hpmd(m, Geometry::entropy(), linear(0.5), Policy::uniform(1, 2), 600);
    CHECK(r.trace.has_flag("saturated: eta capped"));
    CHECK(r.final_state.policy(0, 0) == 1.0);
    CHECK(std::isfinite(r.final_state.duals(0, 0)));
}

TEST_CASE("property: threads do not change the trace") {
    RandomMdpParams p;
    p.num_states = 15;
    p.seed = 21;
    const Mdp m = make_random_mdp(p);
    for (const char* g : {"entropy", "pnorm:2", "tsallis:0.5"}) {
        DiagConfig d1, d4;
        d4.threads = 4;
        const Geometry geo = Geometry::parse(g);
        const RunResult a = run_hpmd(m, geo, linear(m.gamma()), Policy::uniform(15, 3), 25, d1);
        const RunResult b = run_hpmd(m, geo, linear(m.gamma()), Policy::uniform(15, 3), 25, d4);
        std::ostringstream sa, sb;
        write_trace_csv(a.trace, sa);
        write_trace_csv(b.trace, sb);
        CHECK(sa.str() == sb.str());
    }
}

TEST_CASE("property: every iterate is a valid policy for each geometry") {
    RandomMdpParams p;
    p.num_states = 5;
    p.num_actions = 4;
    p.seed = 5;
    const Mdp m = make_random_mdp(p);
    for (const char* g : {"entropy", "pnorm:1.5", "pnorm:3", "tsallis:0.5", "tsallis:2"}) {
        DiagConfig d;
        d.snapshot_every = 1;
        const RunResult r = run_hpmd(m, Geometry::parse(g), linear(m.gamma()), Policy::uniform(5, 4), 40, d);
        for (const auto& s : r.trace.snapshots) {
            CHECK(s.policy.probs().minCoeff() >= 0.0);
            CHECK((s.policy.probs().rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
        }
        CHECK(*r.trace.records.back().gap_nu < 1e-6);
    }
}
