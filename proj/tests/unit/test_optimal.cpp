#include "helpers.hpp"

#include "hpmd/environments.hpp"
#include "hpmd/optimal.hpp"
#include "hpmd/verify/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace hpmd;

namespace {

QFn row(std::initializer_list<double> xs) {
    QFn q(1, static_cast<Eigen::Index>(xs.size()));
    int i = 0;
    for (double x : xs) q(0, i++) = x;
    return q;
}

}  // namespace

TEST_CASE("solve_optimal on the bandit and a zero-cost MDP") {
    const auto sol = solve_optimal(testutil::bandit());
    CHECK(sol.v_star(0) == doctest::Approx(0.0));
    CHECK(sol.q_star(0, 0) == doctest::Approx(0.0));
    CHECK(sol.q_star(0, 1) == doctest::Approx(1.0));
    CHECK(sol.greedy[0] == 0);

    RandomMdpParams p;
    p.cost_scale = 0.0;
    const auto zero = solve_optimal(make_random_mdp(p));
    CHECK(zero.v_star.cwiseAbs().maxCoeff() == 0.0);
    CHECK(zero.q_star.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("counterexample gap equals eps gamma^2 / 2") {
    const Mdp m = make_gap_counterexample(0.1, 0.9);
    const OptimalityData od = compute_optimality(m);
    CHECK(od.q_star()(kCounterexampleStart, kActionU) - od.q_star()(kCounterexampleStart, kActionD) ==
          doctest::Approx(0.0405).epsilon(1e-12));
    CHECK(od.gaps.delta_star.value() == doctest::Approx(0.0405).epsilon(1e-12));
}

TEST_CASE("classify_optimal_actions") {
    CHECK(classify_optimal_actions(row({0.0, 1.0})).optimal[0] == std::vector<int>{0});
    CHECK(classify_optimal_actions(row({0.3, 0.3})).optimal[0] == std::vector<int>{0, 1});
    // 5e-9 is inside the tolerance; the 1.0 action is far outside.
    const auto near = classify_optimal_actions(row({0.0, 5e-9, 1.0}));
    CHECK(near.optimal[0] == std::vector<int>{0, 1});
    CHECK(!near.warnings.empty());
    CHECK(classify_optimal_actions(row({0.0, 1.0})).warnings.empty());
    // An excluded action just past the threshold is ambiguous too.
    const auto past = classify_optimal_actions(row({0.0, 5e-8}));
    CHECK(past.optimal[0] == std::vector<int>{0});
    CHECK(!past.warnings.empty());
}

TEST_CASE("gap_values") {
    const QFn q = row({0.0, 1.0});
    const auto g = gap_values(q, classify_optimal_actions(q).optimal);
    CHECK(g.delta_z(0, 0) == 0.0);
    CHECK(g.delta_z(0, 1) == doctest::Approx(1.0));
    CHECK(g.delta_s[0].value() == doctest::Approx(1.0));
    CHECK(g.delta_star.value() == doctest::Approx(1.0));

    QFn two(2, 2);
    two << 0.3, 0.3, 0.0, 2.0;
    const auto g2 = gap_values(two, classify_optimal_actions(two).optimal);
    CHECK(g2.delta_s[0].is_infinite());
    CHECK(g2.delta_star.value() == doctest::Approx(2.0));
    const QFn all = row({0.1, 0.1});
    CHECK(gap_values(all, classify_optimal_actions(all).optimal).delta_star.is_infinite());
}

TEST_CASE("maximal_entropy_policy") {
    const Policy a = maximal_entropy_policy(3, {{1}});
    CHECK(a(0, 1) == 1.0);
    CHECK(a(0, 0) == 0.0);
    const Policy b = maximal_entropy_policy(3, {{0, 2}});
    CHECK(b(0, 0) == 0.5);
    CHECK(b(0, 1) == 0.0);
    CHECK(b(0, 2) == 0.5);
    const Policy c = maximal_entropy_policy(4, {{0, 1, 2, 3}});
    for (int k = 0; k < 4; ++k) CHECK(c(0, k) == 0.25);
}

TEST_CASE("policy distances") {
    const OptimalityData od = compute_optimality(testutil::bandit());
    const StateDistribution rho = StateDistribution::uniform(1);
    CHECK(dist_weighted(od.pi_star_u, od, rho) == 0.0);
    CHECK(dist_weighted(testutil::row_policy({{0.8, 0.2}}), od, rho) == doctest::Approx(0.2));
    CHECK(dist_inf_to_pistar_u(od.pi_star_u, od) == 0.0);
    CHECK(dist_inf_to_pistar_u(Policy::uniform(1, 2), od) == doctest::Approx(0.5));
    CHECK(dist_inf_to_pistar_u(testutil::row_policy({{0.7, 0.3}}), od) == doctest::Approx(0.3));
    CHECK(dist_l1_to_optimal_set(testutil::row_policy({{0.8, 0.2}}), od) == doctest::Approx(0.4));

    // Singleton A*(s) with |A| = 4: uniform sits at l1 distance 2 * 3/4.
    const Mdp m4 = testutil::make(1, 4, 0.5, {0.0, 1.0, 1.0, 1.0}, {1, 1, 1, 1});
    const OptimalityData od4 = compute_optimality(m4);
    CHECK(dist_l1_to_optimal_set(Policy::uniform(1, 4), od4) == doctest::Approx(1.5));
}

TEST_CASE("property: exact l1 distance matches a grid search over the optimal set") {
    // |A| = 3 with A*(s) = {0, 1}; the closest member keeps the optimal mass ratio free.
    const Mdp m = testutil::make(1, 3, 0.5, {0.0, 0.0, 1.0}, {1, 1, 1});
    const OptimalityData od = compute_optimality(m);
    const Policy pi = testutil::row_policy({{0.3, 0.5, 0.2}});
    double best = 1e9;
    for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        best = std::min(best, std::abs(0.3 - x) + std::abs(0.5 - (1.0 - x)) + 0.2);
    }
    CHECK(dist_l1_to_optimal_set(pi, od) == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("mismatch ratios") {
    // Uniform kernel: nu* uniform, all ratios 1, varrho = gamma.
    const Mdp m = testutil::make(2, 2, 0.7, {0.0, 1.0, 0.0, 1.0}, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
    const OptimalityData od = compute_optimality(m);
    const auto mr = mismatch_ratios(m, od, StateDistribution::uniform(2));
    CHECK(*mr.varrho == doctest::Approx(0.7));
    CHECK(*mr.rho_over_nu == doctest::Approx(1.0));
    CHECK(mismatch_ratios(m, od, *od.nu_star).rho_over_nu.value() == doctest::Approx(1.0));

    const Mdp m2 = testutil::make(2, 1, 0.5, {0.0, 0.0}, {0.9, 0.1, 0.5, 0.5});
    const OptimalityData od2 = compute_optimality(m2);
    CHECK(mismatch_ratios(m2, od2, StateDistribution::uniform(2)).rho_over_nu.value() == doctest::Approx(3.0));
}

TEST_CASE("property: policy iteration agrees with value iteration and exhaustive enumeration") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        RandomMdpParams p;
        p.num_states = 2 + static_cast<int>(seed % 4);
        p.num_actions = 2 + static_cast<int>(seed % 2);
        p.branching = 2;
        p.gamma = 0.85;
        p.seed = 300 + seed;
        const Mdp m = make_random_mdp(p);
        const OptimalityData od = compute_optimality(m);
        CHECK((od.v_star() - oracle::value_iteration(m)).cwiseAbs().maxCoeff() < 1e-10);
        const auto best = oracle::enumerate_optimal(m);
        const ValueFn vb = evaluate_policy(m, Policy::deterministic(m.num_actions(), best));
        CHECK((vb - od.v_star()).cwiseAbs().maxCoeff() < 1e-10);
        for (int s = 0; s < m.num_states(); ++s) {
            const auto& set = od.optimal_actions()[static_cast<std::size_t>(s)];
            CHECK(!set.empty());
            CHECK(std::find(set.begin(), set.end(), od.solution.greedy[static_cast<std::size_t>(s)]) != set.end());
        }
        CHECK(dist_l1_to_optimal_set(od.pi_star_u, od) == 0.0);
        CHECK(od.solution.bellman_residual <= 1e-12);
    }
}
