#pragma once

#include "hpmd/mdp.hpp"

#include <initializer_list>
#include <vector>

namespace testutil {

/// Builds an MDP from nested cost rows and (s,a)-ordered transition rows.
inline hpmd::Mdp make(int S, int A, double gamma, std::initializer_list<double> cost,
                      std::initializer_list<double> trans) {
    Eigen::MatrixXd c(S, A), p(S * A, S);
    auto it = cost.begin();
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) c(s, a) = *it++;
    auto jt = trans.begin();
    for (int r = 0; r < S * A; ++r)
        for (int t = 0; t < S; ++t) p(r, t) = *jt++;
    return hpmd::Mdp(S, A, gamma, c, p);
}

inline hpmd::Policy row_policy(std::initializer_list<std::initializer_list<double>> rows) {
    const int S = static_cast<int>(rows.size());
    const int A = static_cast<int>(rows.begin()->size());
    Eigen::MatrixXd p(S, A);
    int s = 0;
    for (const auto& r : rows) {
        int a = 0;
        for (double x : r) p(s, a++) = x;
        ++s;
    }
    return hpmd::Policy(p);
}

/// 1-state, 2-action bandit with costs (0, 1).
inline hpmd::Mdp bandit(double gamma = 0.5) { return make(1, 2, gamma, {0.0, 1.0}, {1.0, 1.0}); }

}  // namespace testutil
