#include "hpmd/bregman.hpp"
#include "hpmd/errors.hpp"
#include "hpmd/verify/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hpmd;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

}  // namespace

TEST_CASE("geometry parsing and names") {
    CHECK(Geometry::parse("entropy").kind() == GeometryKind::NegativeEntropy);
    CHECK(Geometry::parse("pnorm:2").param() == 2.0);
    CHECK(Geometry::parse("tsallis:0.5").kind() == GeometryKind::Tsallis);
    CHECK(Geometry::parse("pnorm:3").name() == "pnorm:3");
    CHECK_THROWS_AS(Geometry::parse("pnorm:1"), ValidationError);
    CHECK_THROWS_AS(Geometry::parse("tsallis:1"), ValidationError);
    CHECK_THROWS_AS(Geometry::parse("banana"), ValidationError);
}

TEST_CASE("range bounds") {
    CHECK(Geometry::entropy().range_bound(2) == doctest::Approx(2.0 * std::log(2.0)));
    CHECK(Geometry::pnorm(3.0).range_bound(5) == 2.0);
    CHECK(Geometry::tsallis(0.5).range_bound(3) == 6.0);
}

TEST_CASE("entropy step examples") {
    const Eigen::VectorXd z = vec({std::log(0.5), std::log(0.5)});
    const EntropyStep st = mirror_step_entropy(z, vec({0.0, 1.0}), 1.0, 0.0);
    CHECK(st.probs(0) == doctest::Approx(0.7310585786300049).epsilon(1e-14));
    CHECK(st.probs(1) == doctest::Approx(0.2689414213699951).epsilon(1e-14));

    const Eigen::VectorXd z3 = Eigen::VectorXd::Constant(3, std::log(1.0 / 3.0));
    const EntropyStep flat = mirror_step_entropy(z3, vec({2.0, 2.0, 2.0}), 7.0, 0.3);
    for (int i = 0; i < 3; ++i) CHECK(flat.probs(i) == doctest::Approx(1.0 / 3.0));

    const Eigen::VectorXd zp = vec({std::log(0.2), std::log(0.8)});
    const EntropyStep still = mirror_step_entropy(zp, vec({0.0, 5.0}), 0.0, 0.0);
    CHECK(still.probs(0) == doctest::Approx(0.2));
}

TEST_CASE("entropy step at huge eta drives the losing action to exactly zero") {
    const Eigen::VectorXd z = vec({std::log(0.5), std::log(0.5)});
    const EntropyStep st = mirror_step_entropy(z, vec({0.0, 1.0}), 1e200, 1e-201);
    CHECK(st.probs(0) == 1.0);
    CHECK(st.probs(1) == 0.0);
}

TEST_CASE("pnorm:2 step examples") {
    const Geometry g = Geometry::pnorm(2.0);
    const GeneralStep a = mirror_step(g, vec({1.0, 1.0}), vec({0.0, 1.0}), 1.0, 0.0);
    CHECK(a.probs(0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(a.probs(1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(a.lambda == doctest::Approx(-0.5).epsilon(1e-12));

    const GeneralStep b = mirror_step(g, vec({1.0, 1.0}), vec({0.0, 10.0}), 1.0, 0.0);
    CHECK(b.probs(0) == 1.0);
    CHECK(b.probs(1) == 0.0);
    CHECK(b.lambda == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("init_dual_state") {
    const DualPolicyState e = init_dual_state(Geometry::entropy(), Policy::uniform(2, 4));
    for (int a = 0; a < 4; ++a) CHECK(e.duals(0, a) == doctest::Approx(std::log(0.25)));
    Eigen::MatrixXd det(1, 2);
    det << 1.0, 0.0;
    const DualPolicyState p = init_dual_state(Geometry::pnorm(2.0), Policy(det));
    CHECK(p.duals(0, 0) == doctest::Approx(2.0));
    CHECK(p.duals(0, 1) == 0.0);
    CHECK_THROWS_AS(init_dual_state(Geometry::tsallis(0.5), Policy(det)), ValidationError);
    CHECK_THROWS_AS(init_dual_state(Geometry::entropy(), Policy(det)), ValidationError);
}

TEST_CASE("property: kernel conditions hold for every supported family") {
    for (const char* name : {"entropy", "pnorm:1.5", "pnorm:2", "pnorm:4", "tsallis:0.3", "tsallis:0.5", "tsallis:2"}) {
        const Geometry g = Geometry::parse(name);
        CAPTURE(name);
        // Strict convexity through increasing derivatives.
        double prev = -INFINITY;
        for (double x = 0.01; x <= 1.0; x += 0.01) {
            const double d = g.grad_v(x);
            CHECK(d > prev);
            prev = d;
            CHECK(g.conj_grad(d) == doctest::Approx(x).epsilon(1e-9));
        }
        // conj_grad nondecreasing with a light left tail.
        double last = -1.0;
        for (double y = -50.0; y <= 5.0; y += 0.5) {
            const double c = g.conj_grad(y);
            CHECK(c >= last);
            last = c;
        }
        CHECK(g.conj_grad(-1e6) * 1e6 < 1.0);
    }
}

TEST_CASE("property: generic step agrees with the closed form for entropy") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + t % 4;
        Eigen::VectorXd p(n), q(n);
        for (int i = 0; i < n; ++i) {
            p(i) = 0.05 + U(rng);
            q(i) = 3.0 * U(rng);
        }
        p /= p.sum();
        const double eta = 0.01 + 20.0 * U(rng), tau = U(rng);
        const EntropyStep cf = mirror_step_entropy(p.array().log().matrix(), q, eta, tau);
        const GeneralStep gen = mirror_step(Geometry::entropy(), (p.array().log() + 1.0).matrix(), q, eta, tau);
        CHECK((cf.probs - gen.probs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("property: generic step output is on the simplex and matches the brute-force minimiser") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    struct Case {
        const char* name;
        oracle::Kernel k;
        double param;
    };
    for (const Case c : {Case{"pnorm:2", oracle::Kernel::Power, 2.0}, Case{"pnorm:3", oracle::Kernel::Power, 3.0},
                         Case{"tsallis:0.5", oracle::Kernel::TsallisLow, 0.5}}) {
        const Geometry g = Geometry::parse(c.name);
        for (int t = 0; t < 10; ++t) {
            const int n = 2 + t % 2;
            Eigen::VectorXd p(n), q(n);
            for (int i = 0; i < n; ++i) {
                p(i) = 0.1 + U(rng);
                q(i) = U(rng);
            }
            p /= p.sum();
            Eigen::VectorXd theta(n);
            for (int i = 0; i < n; ++i) theta(i) = g.grad_v(p(i));
            const double eta = 0.2 + 3.0 * U(rng), tau = 0.5 * U(rng);
            const GeneralStep st = mirror_step(g, theta, q, eta, tau);
            CHECK(st.probs.minCoeff() >= 0.0);
            CHECK(std::abs(st.probs.sum() - 1.0) < 1e-12);
            const Eigen::VectorXd ref = oracle::brute_force_step(c.k, c.param, theta, q, eta, tau);
            CHECK((st.probs - ref).cwiseAbs().maxCoeff() < 1e-6);
            // Duals reproduce the policy row.
            for (int i = 0; i < n; ++i) CHECK(g.conj_grad(st.duals(i)) == doctest::Approx(st.probs(i)).epsilon(1e-10));
        }
    }
}

TEST_CASE("dgf_value") {
    CHECK(dgf_value(Geometry::entropy(), vec({0.5, 0.5})) == doctest::Approx(-std::log(2.0)));
    CHECK(dgf_value(Geometry::pnorm(2.0), vec({0.5, 0.5})) == doctest::Approx(0.5));
}
