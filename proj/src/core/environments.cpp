#include "hpmd/environments.hpp"

#include "hpmd/errors.hpp"
#include "hpmd/optimal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <random>

namespace hpmd {

namespace {

// Raw 53-bit uniforms keep generated instances identical across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int uniform_index(std::mt19937_64& rng, int n) {
    return static_cast<int>(uniform01(rng) * n) % n;
}

}  // namespace

Mdp make_random_mdp(const RandomMdpParams& p) {
    if (p.num_states < 1 || p.num_actions < 1) throw ValidationError("random MDP needs |S|, |A| >= 1");
    if (p.branching < 1 || p.branching > p.num_states)
        throw ValidationError("branching must lie in [1, |S|]");
    if (!(p.mixing >= 0.0 && p.mixing <= 1.0)) throw ValidationError("mixing must lie in [0, 1]");
    const int S = p.num_states;
    const int A = p.num_actions;
    std::mt19937_64 rng(p.seed);
    Eigen::MatrixXd cost(S, A);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(S) * A, S);
    std::vector<int> perm(static_cast<std::size_t>(S));
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            cost(s, a) = p.cost_scale * uniform01(rng);
            std::iota(perm.begin(), perm.end(), 0);
            for (int j = 0; j < p.branching; ++j) {
                const int pick = j + uniform_index(rng, S - j);
                std::swap(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(pick)]);
            }
            double total = 0.0;
            std::vector<double> w(static_cast<std::size_t>(p.branching));
            for (auto& x : w) {
                x = -std::log(1.0 - uniform01(rng));
                total += x;
            }
            const Eigen::Index r = static_cast<Eigen::Index>(s) * A + a;
            for (int j = 0; j < p.branching; ++j)
                P(r, perm[static_cast<std::size_t>(j)]) += (1.0 - p.mixing) * w[static_cast<std::size_t>(j)] / total;
            for (int t = 0; t < S; ++t) P(r, t) += p.mixing / S;
        }
    }
    return Mdp(S, A, p.gamma, std::move(cost), std::move(P));
}

Mdp make_gridworld(const GridworldParams& p) {
    if (p.n < 1) throw ValidationError("gridworld side must be >= 1");
    if (!(p.slip >= 0.0 && p.slip <= 1.0)) throw ValidationError("slip must lie in [0, 1]");
    const int n = p.n;
    const int S = n * n;
    constexpr int A = 4;
    std::mt19937_64 rng(p.seed);
    std::vector<double> cell(static_cast<std::size_t>(S));
    for (auto& c : cell) c = uniform01(rng);
    auto move = [n](int s, int a) {
        int r = s / n, c = s % n;
        switch (a) {
            case 0: r = (r + n - 1) % n; break;
            case 1: r = (r + 1) % n; break;
            case 2: c = (c + n - 1) % n; break;
            default: c = (c + 1) % n; break;
        }
        return r * n + c;
    };
    Eigen::MatrixXd cost(S, A);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(S) * A, S);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            const Eigen::Index r = static_cast<Eigen::Index>(s) * A + a;
            const int lateral1 = a < 2 ? 2 : 0;
            const int lateral2 = a < 2 ? 3 : 1;
            P(r, move(s, a)) += 1.0 - p.slip;
            P(r, move(s, lateral1)) += p.slip / 2.0;
            P(r, move(s, lateral2)) += p.slip / 2.0;
            cost(s, a) = cell[static_cast<std::size_t>(move(s, a))];
        }
    }
    return Mdp(S, A, p.gamma, std::move(cost), std::move(P));
}

Mdp make_gap_counterexample(double eps, double gamma) {
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("counterexample eps must lie in (0, 1)");
    constexpr int S = 6;
    constexpr int A = 2;
    Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(S, A);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(S * A, S);
    auto arc = [&](int s, int a, int next, double c) {
        P(s * A + a, next) = 1.0;
        cost(s, a) = c;
    };
    arc(0, kActionU, 3, eps * gamma * gamma / 2.0);
    arc(0, kActionD, 1, 0.0);
    arc(1, kActionU, 2, 2.0 * eps);
    arc(1, kActionD, 2, 0.0);
    for (int a = 0; a < A; ++a) {
        arc(3, a, 2, 0.0);
        arc(2, a, 4, 0.0);
        arc(4, a, 5, 0.0);
        arc(5, a, 5, 0.0);
    }
    return Mdp(S, A, gamma, std::move(cost), std::move(P));
}

Mdp make_tied(const Mdp& base, int ties, std::uint64_t seed, std::vector<int>* tied_states) {
    const int S = base.num_states();
    const int A = base.num_actions();
    if (A < 2) throw ValidationError("tying actions needs |A| >= 2");
    if (ties < 0 || ties > S) throw ValidationError("ties must lie in [0, |S|]");
    const OptimalSolution opt = solve_optimal(base);
    std::mt19937_64 rng(seed);
    std::vector<int> states(static_cast<std::size_t>(S));
    std::iota(states.begin(), states.end(), 0);
    for (int j = 0; j < ties; ++j) {
        const int pick = j + uniform_index(rng, S - j);
        std::swap(states[static_cast<std::size_t>(j)], states[static_cast<std::size_t>(pick)]);
    }
    states.resize(static_cast<std::size_t>(ties));
    std::sort(states.begin(), states.end());

    Eigen::MatrixXd cost = base.cost();
    Eigen::MatrixXd P = base.transition();
    for (int s : states) {
        const int best = opt.greedy[static_cast<std::size_t>(s)];
        int other = uniform_index(rng, A - 1);
        if (other >= best) ++other;
        cost(s, other) = cost(s, best);
        P.row(static_cast<Eigen::Index>(s) * A + other) = P.row(static_cast<Eigen::Index>(s) * A + best);
    }
    if (tied_states) *tied_states = states;
    return Mdp(S, A, base.gamma(), std::move(cost), std::move(P));
}

std::string mdp_fingerprint(const Mdp& m) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const void* data, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    const int S = m.num_states(), A = m.num_actions();
    const double g = m.gamma();
    feed(&S, sizeof S);
    feed(&A, sizeof A);
    feed(&g, sizeof g);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const double c = m.cost(s, a);
            feed(&c, sizeof c);
            for (int t = 0; t < S; ++t) {
                const double x = m.prob(s, a, t);
                feed(&x, sizeof x);
            }
        }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace hpmd
