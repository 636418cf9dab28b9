// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "hpmd/verify/criteria.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    hpmd::verify::VerifyOptions o;
    app.add_option("--only", o.only, "Criterion ids")->delimiter(',');
    app.add_option("--threads", o.threads, "Worker threads");
    app.add_option("--scratch", o.scratch_dir, "Scratch directory");
    CLI11_PARSE(app, argc, argv);
    const auto results = hpmd::verify::run_suite(o);
    hpmd::verify::print_table(results, std::cout);
    for (const auto& r : results)
        if (!r.passed) return 1;
    return results.empty() ? 1 : 0;
}
