#pragma once

#include "hpmd/hpmd.hpp"
#include "hpmd/rng.hpp"

#include <cstdint>
#include <optional>

namespace hpmd {

/// Cumulative transition and policy rows for inverse-CDF sampling.
class SamplingTables {
public:
    SamplingTables(const Mdp& m, const Policy& pi);
    int next_state(int s, int a, double u) const;
    int action(int s, double u) const;

private:
    int S_, A_;
    Eigen::MatrixXd cum_p_;   // (S*A) x S, row-major semantics
    Eigen::MatrixXd cum_pi_;  // S x A
};

/// Discounted truncated return sum_{t<T} gamma^t c(s_t, a_t) from (s0, a0).
double sample_trajectory(const Mdp& m, const SamplingTables& tables, int s0, int a0, int horizon,
                         CounterRng& rng);
double sample_trajectory(const Mdp& m, const Policy& pi, int s0, int a0, int horizon, CounterRng& rng);

/// Monte-Carlo Q estimate with M independent trajectories of length T per
/// (s,a). Trajectory i of pair (s,a) at iteration k uses CounterRng(seed,k,s,a,i).
QFn estimate_q(const Mdp& m, const Policy& pi, std::int64_t trajectories, int horizon, std::uint64_t seed,
               int k, int threads = 1);

/// Target noise levels for the stochastic linear schedule:
/// sigma_k = gamma^{(k+1)/2}, eps_k = gamma^{3(k+1)/4}.
struct NoiseSpec {
    double gamma = 0.9;
    double sigma(int k) const;
    double epsilon(int k) const;
};

/// Per-iteration (M_k, T_k):
///   T_k = ceil(3(k+1)/4 + log_gamma((1-gamma)/(2C)))
///   M_k = ceil(4 C^2 kappa/(1-gamma)^2 gamma^{-(k+1)} (log(|S||A|) + 1))
/// with optional fixed overrides and a hard cap on M_k.
struct SamplingPlan {
    double kappa = 1.0;
    std::optional<std::int64_t> fixed_trajectories;
    std::optional<int> fixed_horizon;
    std::optional<std::int64_t> max_trajectories;  ///< cap on M_k (flagged when hit)
    std::optional<std::int64_t> sample_budget;     ///< total transitions; run truncates when exceeded

    int horizon(const Mdp& m, int k) const;
    std::int64_t trajectories(const Mdp& m, int k, bool* capped = nullptr) const;
};

/// Stochastic HPMD with the entropy kernel. iterations/diag mirror run_hpmd;
/// `seed` drives every sample. If the sample budget runs out the trace stops
/// early and is marked truncated.
RunResult run_shpmd(const Mdp& m, const ScheduleSpec& schedule, const SamplingPlan& plan, const Policy& pi0,
                    int iterations, std::uint64_t seed, const DiagConfig& diag = {},
                    std::shared_ptr<const OptimalityData> od = nullptr);

}  // namespace hpmd
