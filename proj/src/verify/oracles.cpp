#include "hpmd/verify/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hpmd::oracle {

double kernel_value(Kernel k, double param, double x) {
    switch (k) {
        case Kernel::Entropy: return x > 0.0 ? x * std::log(x) : 0.0;
        case Kernel::Power: return std::pow(x, param);
        case Kernel::TsallisLow: return -std::pow(x, param);
    }
    return 0.0;
}

namespace {

double objective(Kernel k, double param, const Eigen::VectorXd& lin, double curv, const Eigen::VectorXd& p) {
    double f = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) f += lin(i) * p(i) + curv * kernel_value(k, param, p(i));
    return f;
}

}  // namespace

Eigen::VectorXd brute_force_step(Kernel k, double param, const Eigen::VectorXd& theta, const Eigen::VectorXd& q,
                                 double eta, double tau) {
    const Eigen::Index n = q.size();
    if (n < 1 || n > 3) throw std::invalid_argument("brute_force_step supports 1 to 3 actions");
    if (n == 1) return Eigen::VectorXd::Ones(1);
    const Eigen::VectorXd lin = eta * q - theta;
    const double curv = 1.0 + eta * tau;
    auto F = [&](const Eigen::VectorXd& p) { return objective(k, param, lin, curv, p); };

    // Coarse grid over the simplex.
    constexpr int kGrid = 100;
    Eigen::VectorXd best(n), p(n);
    double fbest = std::numeric_limits<double>::infinity();
    if (n == 2) {
        for (int i = 0; i <= kGrid; ++i) {
            p << i / double(kGrid), 1.0 - i / double(kGrid);
            if (double f = F(p); f < fbest) { fbest = f; best = p; }
        }
    } else {
        for (int i = 0; i <= kGrid; ++i)
            for (int j = 0; i + j <= kGrid; ++j) {
                p << i / double(kGrid), j / double(kGrid), (kGrid - i - j) / double(kGrid);
                if (double f = F(p); f < fbest) { fbest = f; best = p; }
            }
    }

    // Pattern search along e_i - e_j, clipping at the boundary.
    double step = 1.0 / kGrid;
    while (step > 1e-14) {
        bool improved = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i == j) continue;
                const double t = std::min(step, best(j));
                if (t <= 0.0) continue;
                p = best;
                p(i) += t;
                p(j) -= t;
                if (double f = F(p); f < fbest) {
                    fbest = f;
                    best = p;
                    improved = true;
                }
            }
        }
        if (!improved) step /= 2.0;
    }
    return best;
}

ValueFn iterative_value(const Mdp& m, const Policy& pi, double tol) {
    const int S = m.num_states(), A = m.num_actions();
    ValueFn v = ValueFn::Zero(S);
    for (int it = 0; it < 1000000; ++it) {
        ValueFn next(S);
        for (int s = 0; s < S; ++s) {
            double acc = 0.0;
            for (int a = 0; a < A; ++a) {
                double cont = 0.0;
                for (int t = 0; t < S; ++t) cont += m.prob(s, a, t) * v(t);
                acc += pi(s, a) * (m.cost(s, a) + m.gamma() * cont);
            }
            next(s) = acc;
        }
        const double diff = (next - v).cwiseAbs().maxCoeff();
        v = next;
        if (diff <= tol * (1.0 - m.gamma())) break;
    }
    return v;
}

ValueFn value_iteration(const Mdp& m, double tol) {
    const int S = m.num_states(), A = m.num_actions();
    ValueFn v = ValueFn::Zero(S);
    for (int it = 0; it < 1000000; ++it) {
        ValueFn next(S);
        for (int s = 0; s < S; ++s) {
            double best = std::numeric_limits<double>::infinity();
            for (int a = 0; a < A; ++a) {
                double cont = 0.0;
                for (int t = 0; t < S; ++t) cont += m.prob(s, a, t) * v(t);
                best = std::min(best, m.cost(s, a) + m.gamma() * cont);
            }
            next(s) = best;
        }
        const double diff = (next - v).cwiseAbs().maxCoeff();
        v = next;
        if (diff <= tol * (1.0 - m.gamma())) break;
    }
    return v;
}

std::vector<int> enumerate_optimal(const Mdp& m) {
    const int S = m.num_states(), A = m.num_actions();
    const double total = std::pow(static_cast<double>(A), S);
    if (total > 1e6) throw std::invalid_argument("too many deterministic policies to enumerate");
    std::vector<int> cur(static_cast<std::size_t>(S), 0), best;
    double best_sum = std::numeric_limits<double>::infinity();
    for (long long code = 0; code < static_cast<long long>(total); ++code) {
        long long c = code;
        for (int s = S - 1; s >= 0; --s) {
            cur[static_cast<std::size_t>(s)] = static_cast<int>(c % A);
            c /= A;
        }
        Eigen::MatrixXd p = Eigen::MatrixXd::Zero(S, A);
        for (int s = 0; s < S; ++s) p(s, cur[static_cast<std::size_t>(s)]) = 1.0;
        const double sum = iterative_value(m, Policy::from_trusted(p)).sum();
        if (sum < best_sum - 1e-11) {
            best_sum = sum;
            best = cur;
        }
    }
    return best;
}

QFn truncated_q(const Mdp& m, const Policy& pi, int horizon) {
    const int S = m.num_states(), A = m.num_actions();
    QFn q = QFn::Zero(S, A);
    for (int h = 0; h < horizon; ++h) {
        Eigen::VectorXd vnext(S);
        for (int s = 0; s < S; ++s) {
            double acc = 0.0;
            for (int a = 0; a < A; ++a) acc += pi(s, a) * q(s, a);
            vnext(s) = acc;
        }
        QFn next(S, A);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                double cont = 0.0;
                for (int t = 0; t < S; ++t) cont += m.prob(s, a, t) * vnext(t);
                next(s, a) = m.cost(s, a) + m.gamma() * cont;
            }
        q = next;
    }
    return q;
}

}  // namespace hpmd::oracle
