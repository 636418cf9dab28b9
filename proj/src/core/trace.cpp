#include "hpmd/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace hpmd {

void Trace::add_flag(const std::string& f) {
    if (!has_flag(f)) flags.push_back(f);
}

bool Trace::has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

void write_trace_csv(const Trace& t, std::ostream& os) {
    const int S = t.records.empty() ? 0 : static_cast<int>(t.records.front().off_support.size());
    os << "k,eta,tau,gap_nu,gap_rho,dist_weighted,dist_l1,dist_inf,saturated,floored";
    if (t.stochastic) os << ",samples_this_iter,samples_cumulative,empirical_delta_inf";
    for (int s = 0; s < S; ++s) os << ",offsupp_" << s;
    for (int s = 0; s < S; ++s) os << ",minopt_" << s;
    os << '\n';
    for (const auto& r : t.records) {
        os << r.k << ',' << format_double(r.eta) << ',' << format_double(r.tau) << ',' << opt(r.gap_nu)
           << ',' << format_double(r.gap_rho) << ',' << format_double(r.dist_weighted) << ','
           << format_double(r.dist_l1) << ',' << format_double(r.dist_inf) << ',' << (r.saturated ? 1 : 0)
           << ',' << (r.floored ? 1 : 0);
        if (t.stochastic)
            os << ',' << r.samples_this_iter << ',' << r.samples_cumulative << ',' << opt(r.empirical_delta_inf);
        for (int s = 0; s < S; ++s) os << ',' << format_double(r.off_support(s));
        for (int s = 0; s < S; ++s) os << ',' << format_double(r.min_optimal(s));
        os << '\n';
    }
}

void write_snapshots_csv(const Trace& t, std::ostream& os) {
    os << "k,state,action,prob\n";
    for (const auto& snap : t.snapshots)
        for (int s = 0; s < snap.policy.num_states(); ++s)
            for (int a = 0; a < snap.policy.num_actions(); ++a)
                os << snap.k << ',' << s << ',' << a << ',' << format_double(snap.policy(s, a)) << '\n';
}

void write_timing_csv(const Trace& t, std::ostream& os) {
    os << "k,wall_seconds\n";
    for (const auto& r : t.records) os << r.k << ',' << format_double(r.wall_seconds) << '\n';
}

}  // namespace hpmd
