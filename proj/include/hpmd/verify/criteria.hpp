#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hpmd::verify {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double observed = 0.0;  ///< worst observed quantity
    double bound = 0.0;     ///< the limit it is compared against
    double margin = 0.0;    ///< signed slack, >= 0 means satisfied
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    int threads = 1;
    /// Multiplies the linear-schedule stepsize in the formula self-check (1 = untouched).
    double eta_scale = 1.0;
    /// Scratch directory for the reproducibility check's CSV files.
    std::string scratch_dir = "hpmd_verify_scratch";
    /// Criterion ids to run; empty runs all.
    std::vector<int> only;
};

CriterionResult check_schedule_formulas(const VerifyOptions& o);    // id 0
CriterionResult check_linear_rate(const VerifyOptions& o);          // 1
CriterionResult check_sublinear_rate(const VerifyOptions& o);       // 2
CriterionResult check_weighted_distance(const VerifyOptions& o);    // 3
CriterionResult check_superlinear_envelope(const VerifyOptions& o); // 4
CriterionResult check_last_iterate(const VerifyOptions& o);         // 5
CriterionResult check_finite_time_exact(const VerifyOptions& o);    // 6
CriterionResult check_gap_counterexample(const VerifyOptions& o);   // 7
CriterionResult check_mirror_step_oracles(const VerifyOptions& o);  // 8
CriterionResult check_perf_difference(const VerifyOptions& o);      // 9
CriterionResult check_stochastic_expectation(const VerifyOptions& o); // 10
CriterionResult check_stochastic_superlinear(const VerifyOptions& o); // 11
CriterionResult check_reproducibility(const VerifyOptions& o);      // 12

std::vector<CriterionResult> run_suite(const VerifyOptions& o);

/// One line per criterion: id, PASS/FAIL, observed, bound, margin, seconds, name, detail.
void print_result_line(const CriterionResult& r, std::ostream& os);
void print_table(const std::vector<CriterionResult>& results, std::ostream& os);

}  // namespace hpmd::verify
