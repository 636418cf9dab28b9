#pragma once

#include "hpmd/mdp.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hpmd {

/// Random MDP: each (s,a) picks `branching` distinct successors with
/// Dirichlet(1) weights, costs are uniform on [0, cost_scale]. A `mixing`
/// fraction of uniform transition mass is blended in so every stationary
/// distribution has full support (mixing = 0 disables it).
struct RandomMdpParams {
    int num_states = 10;
    int num_actions = 3;
    int branching = 3;
    double gamma = 0.9;
    double mixing = 0.01;
    double cost_scale = 1.0;
    std::uint64_t seed = 0;
};
Mdp make_random_mdp(const RandomMdpParams& p);

/// n x n torus with moves up/down/left/right. The intended move succeeds with
/// probability 1 - slip; otherwise the agent slides to one of the two lateral
/// neighbours. c(s,a) is the random cost of the intended destination cell.
struct GridworldParams {
    int n = 10;
    double slip = 0.1;
    double gamma = 0.9;
    std::uint64_t seed = 0;
};
Mdp make_gridworld(const GridworldParams& p);

/// Six-state deterministic chain whose optimal action at the start state has
/// gap eps*gamma^2/2 while HPMD from uniform first drifts toward the
/// suboptimal action. Actions: 0 = U, 1 = D.
Mdp make_gap_counterexample(double eps, double gamma);
inline constexpr int kCounterexampleStart = 0;
inline constexpr int kActionU = 0;
inline constexpr int kActionD = 1;

/// Copies the optimal action's (cost, transition row) onto another action at
/// `ties` randomly chosen states, giving exact ties in Q* while leaving V*
/// unchanged. Returns the chosen states through `tied_states` if non-null.
Mdp make_tied(const Mdp& base, int ties, std::uint64_t seed, std::vector<int>* tied_states = nullptr);

/// 64-bit FNV-1a over the MDP's shape and raw doubles.
std::string mdp_fingerprint(const Mdp& m);

}  // namespace hpmd
