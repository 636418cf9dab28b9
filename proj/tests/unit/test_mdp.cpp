#include "helpers.hpp"

#include "hpmd/environments.hpp"
#include "hpmd/errors.hpp"
#include "hpmd/verify/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace hpmd;
using testutil::make;

TEST_CASE("validate_mdp accepts the identity case and names violations") {
    CHECK_NOTHROW(make(1, 1, 0.5, {0.0}, {1.0}));
    try {
        make(2, 1, 0.5, {0.0, 0.0}, {0.5, 0.4, 0.0, 1.0});
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("s=0") != std::string::npos);
    }
    try {
        make(1, 1, 1.0, {0.0}, {1.0});
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("discount out of range") != std::string::npos);
    }
    CHECK_THROWS_AS(make(1, 1, -0.1, {0.0}, {1.0}), ValidationError);
    CHECK_THROWS_AS(make(1, 2, 0.5, {0.0, 1.0}, {1.0, -0.5}), ValidationError);
}

TEST_CASE("rows within 1e-12 of stochastic are renormalised") {
    const Mdp m = make(2, 1, 0.5, {0.0, 0.0}, {0.5, 0.5 + 5e-13, 0.0, 1.0});
    CHECK(m.transition().row(0).sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("evaluate_policy on hand-solvable chains") {
    const Mdp one = make(1, 1, 0.5, {1.0}, {1.0});
    const Policy u = Policy::uniform(1, 1);
    CHECK(evaluate_policy(one, u)(0) == doctest::Approx(2.0));
    CHECK(q_from_v(one, evaluate_policy(one, u))(0, 0) == doctest::Approx(2.0));

    // s1 -> s2 -> s2 with c = (1, 0).
    const Mdp chain = make(2, 1, 0.5, {1.0, 0.0}, {0.0, 1.0, 0.0, 1.0});
    const Policy pc = Policy::uniform(2, 1);
    const ValueFn v = evaluate_policy(chain, pc);
    CHECK(v(0) == doctest::Approx(1.0));
    CHECK(v(1) == doctest::Approx(0.0));
    const QFn q = q_from_v(chain, v);
    CHECK(q(0, 0) == doctest::Approx(1.0));
    CHECK(q(1, 0) == doctest::Approx(0.0));
    CHECK(weighted_objective(chain, pc, StateDistribution::uniform(2)) == doctest::Approx(0.5));
    CHECK(weighted_objective(chain, pc, StateDistribution(Eigen::Vector2d(1.0, 0.0))) == doctest::Approx(1.0));
}

TEST_CASE("zero cost gives zero value and Q equals cost at zero continuation") {
    RandomMdpParams p;
    p.num_states = 5;
    p.cost_scale = 0.0;
    const Mdp m = make_random_mdp(p);
    const Policy u = Policy::uniform(5, 3);
    CHECK(evaluate_policy(m, u).cwiseAbs().maxCoeff() == 0.0);
    const Mdp m2 = make_random_mdp(RandomMdpParams{});
    CHECK((q_from_v(m2, ValueFn::Zero(m2.num_states())) - m2.cost()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stationary distributions") {
    const Mdp sym = make(2, 1, 0.5, {0.0, 0.0}, {0.3, 0.7, 0.7, 0.3});
    const auto nu_sym = stationary_distribution(sym, Policy::uniform(2, 1));
    CHECK(nu_sym(0) == doctest::Approx(0.5));

    const Mdp absorb = make(2, 1, 0.5, {0.0, 0.0}, {0.5, 0.5, 0.0, 1.0});
    const auto nu_abs = stationary_distribution(absorb, Policy::uniform(2, 1));
    CHECK(nu_abs(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(nu_abs(1) == doctest::Approx(1.0));

    const Mdp m = make(2, 1, 0.5, {0.0, 0.0}, {0.9, 0.1, 0.5, 0.5});
    const auto nu = stationary_distribution(m, Policy::uniform(2, 1));
    CHECK(nu(0) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(nu(1) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

    const Mdp two_classes = make(2, 1, 0.5, {0.0, 0.0}, {1.0, 0.0, 0.0, 1.0});
    CHECK_THROWS_AS(stationary_distribution(two_classes, Policy::uniform(2, 1)), NumericalError);
}

TEST_CASE("discounted visitation") {
    const Mdp one = make(1, 1, 0.5, {0.0}, {1.0});
    CHECK(discounted_visitation(one, Policy::uniform(1, 1), StateDistribution::uniform(1))(0) == doctest::Approx(1.0));

    const Mdp ident = make(2, 1, 0.5, {0.0, 0.0}, {1.0, 0.0, 0.0, 1.0});
    const auto d_id = discounted_visitation(ident, Policy::uniform(2, 1), StateDistribution(Eigen::Vector2d(0, 1)));
    CHECK(d_id(1) == doctest::Approx(1.0));

    const Mdp cycle = make(2, 1, 0.5, {0.0, 0.0}, {0.0, 1.0, 1.0, 0.0});
    const auto d = discounted_visitation(cycle, Policy::uniform(2, 1), StateDistribution(Eigen::Vector2d(1, 0)));
    CHECK(d(0) == doctest::Approx(2.0 / 3.0));
    CHECK(d(1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("performance difference right-hand side") {
    const Mdp b = testutil::bandit();
    const Policy pi = testutil::row_policy({{1.0, 0.0}});
    const Policy pi2 = testutil::row_policy({{0.0, 1.0}});
    CHECK(perf_diff_rhs(b, pi, pi, 0) == doctest::Approx(0.0));
    CHECK(perf_diff_rhs(b, pi, pi2, 0) == doctest::Approx(2.0));
}

TEST_CASE("property: perf_diff_rhs equals the direct value difference") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        RandomMdpParams p;
        p.num_states = 4;
        p.num_actions = 3;
        p.branching = 2;
        p.gamma = 0.9;
        p.seed = static_cast<std::uint64_t>(t);
        const Mdp m = make_random_mdp(p);
        Eigen::MatrixXd a(4, 3), b(4, 3);
        for (int s = 0; s < 4; ++s)
            for (int k = 0; k < 3; ++k) {
                a(s, k) = U(rng);
                b(s, k) = U(rng);
            }
        for (int s = 0; s < 4; ++s) {
            a.row(s) /= a.row(s).sum();
            b.row(s) /= b.row(s).sum();
        }
        const Policy pi(a), pi2(b);
        const ValueFn diff = oracle::iterative_value(m, pi2) - oracle::iterative_value(m, pi);
        for (int s = 0; s < 4; ++s) CHECK(perf_diff_rhs(m, pi, pi2, s) == doctest::Approx(diff(s)).epsilon(1e-9));
    }
}

TEST_CASE("property: LU evaluation agrees with fixed-point iteration and Bellman consistency") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RandomMdpParams p;
        p.num_states = 3 + static_cast<int>(seed % 5);
        p.gamma = 0.95;
        p.seed = seed;
        const Mdp m = make_random_mdp(p);
        const Policy u = Policy::uniform(m.num_states(), m.num_actions());
        const ValueFn v = evaluate_policy(m, u);
        CHECK((v - oracle::iterative_value(m, u)).cwiseAbs().maxCoeff() < 1e-10);
        const QFn q = q_from_v(m, v);
        const Eigen::VectorXd vq = (q.array() * u.probs().array()).rowwise().sum();
        CHECK((vq - v).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(v.cwiseAbs().maxCoeff() <= m.cost_bound() / (1.0 - m.gamma()) + 1e-12);
    }
}

TEST_CASE("policy validation") {
    CHECK_THROWS_AS(Policy(Eigen::MatrixXd::Constant(1, 2, 0.6)), ValidationError);
    CHECK_THROWS_AS(testutil::row_policy({{1.2, -0.2}}), ValidationError);
    CHECK_NOTHROW(testutil::row_policy({{0.5, 0.5 + 1e-10}}));
    CHECK_THROWS_AS(StateDistribution(Eigen::Vector2d(0.2, 0.2)), ValidationError);
}
