#pragma once

#include "hpmd/mdp.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hpmd {

inline constexpr const char* kTraceSchema = "hpmd-trace/1";

/// Diagnostics of one iterate pi_k.
struct IterationRecord {
    int k = 0;
    double eta = 0.0;  ///< stepsize used to produce pi_{k+1} (0 on the final row)
    double tau = 0.0;
    std::optional<double> gap_nu;  ///< f(pi_k) - f(pi*), absent without nu*
    double gap_rho = 0.0;          ///< f_rho(pi_k) - f_rho(pi*)
    double dist_weighted = 0.0;
    double dist_l1 = 0.0;
    double dist_inf = 0.0;
    Eigen::VectorXd off_support;   ///< per-state mass outside A*(s)
    Eigen::VectorXd min_optimal;   ///< per-state min over A*(s)
    double wall_seconds = 0.0;     ///< time since the run started; not written to trace.csv
    bool saturated = false;
    bool floored = false;
    // Stochastic runs only.
    std::int64_t samples_this_iter = 0;
    std::int64_t samples_cumulative = 0;
    std::optional<double> empirical_delta_inf;
};

struct PolicySnapshot {
    int k = 0;
    Policy policy;
};

struct Trace {
    std::vector<IterationRecord> records;
    std::vector<PolicySnapshot> snapshots;
    std::vector<std::string> flags;  ///< run-level notices, deduplicated
    bool stochastic = false;
    bool truncated = false;          ///< sample budget exhausted before the last iteration

    void add_flag(const std::string& f);
    bool has_flag(const std::string& f) const;
};

/// Deterministic CSV (17 significant digits). Absent optionals are empty fields.
void write_trace_csv(const Trace& t, std::ostream& os);
void write_snapshots_csv(const Trace& t, std::ostream& os);
void write_timing_csv(const Trace& t, std::ostream& os);

/// "%.17g", with "inf"/"-inf"/"nan" spelled out.
std::string format_double(double v);

}  // namespace hpmd
