#pragma once

#include "hpmd/bregman.hpp"
#include "hpmd/optimal.hpp"
#include "hpmd/schedule.hpp"
#include "hpmd/trace.hpp"

#include <memory>
#include <optional>

namespace hpmd {

struct DiagConfig {
    std::optional<StateDistribution> rho;  ///< defaults to uniform
    int snapshot_every = 10;               ///< 0 disables snapshots
    int threads = 1;
    double solve_tol = 1e-12;
    double classify_tol = 1e-8;
    /// Stochastic runs: also compute the exact Q and record ||Qhat - Q||_inf.
    bool compare_exact = false;
};

struct RunResult {
    Trace trace;
    DualPolicyState final_state;
    std::shared_ptr<const OptimalityData> optimality;
};

/// Precomputes the optimality data with the tolerances in diag.
std::shared_ptr<const OptimalityData> optimality_for(const Mdp& m, const DiagConfig& diag);

/// Deterministic HPMD for `iterations` steps. The trace holds iterates
/// pi_0..pi_iterations. Pass `od` to reuse a solved optimum.
RunResult run_hpmd(const Mdp& m, const Geometry& g, const ScheduleSpec& schedule, const Policy& pi0,
                   int iterations, const DiagConfig& diag = {},
                   std::shared_ptr<const OptimalityData> od = nullptr);

/// Applies one HPMD update to every state. Exposed so the stochastic driver
/// shares the exact same update path.
struct StepFlags {
    bool saturated = false;
    bool floored = false;
};
StepFlags hpmd_update(const Geometry& g, DualPolicyState& state, const QFn& q, double eta, double tau,
                      int threads);

/// Fills the optimality-related fields of a record for policy pi with value v.
void fill_diagnostics(IterationRecord& rec, const Policy& pi, const ValueFn& v, const OptimalityData& od,
                      const StateDistribution& rho);

}  // namespace hpmd
