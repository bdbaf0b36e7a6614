#include "repomech/bayesian.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "repomech/format.hpp"
#include "repomech/parallel.hpp"

namespace repomech {

void TypeDist::validate() const {
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi))
        throw DomainError("type range must satisfy 0 < lo <= hi");
    double total = 0.0;
    for (const auto& [v, w] : atoms) {
        if (v < lo || v > hi) throw DomainError("type atom outside [lo, hi]");
        if (!(w > 0.0)) throw DomainError("type atom weight must be positive");
        total += w;
    }
    if (!atoms.empty() && !(total > 0.0)) throw DomainError("type atoms carry no weight");
}

double TypeDist::sample(SplitRng& rng) const {
    if (atoms.empty()) return rng.uniform(lo, hi);
    double total = 0.0;
    for (const auto& [v, w] : atoms) total += w;
    double u = rng.canonical() * total;
    for (const auto& [v, w] : atoms) {
        u -= w;
        if (u <= 0.0) return v;
    }
    return atoms.back().first;
}

double target_rate(const ScheduleModel& baseline, double volume, double theta) {
    if (!(theta > 0.0)) throw DomainError("target rate: shock must be positive");
    if (volume < 0.0) throw DomainError("target rate: volume must be non-negative");
    return baseline.inverse(volume / theta);
}

TargetVerdict check_target_equilibrium(const Market& baseline, double volume,
                                       const TypeDist& mm_types,
                                       const TypeDist& rm_types) {
    mm_types.validate();
    rm_types.validate();
    double r_b = baseline.demand.rate_bound();
    // Highest cash-side rate any type quotes, lowest securities-side rate.
    double r_mm_worst = target_rate(baseline.demand, volume, mm_types.lo);
    double r_rm_worst = target_rate(baseline.supply, volume, rm_types.lo);
    double pk_mm = (r_rm_worst > 0.0) ? peak_rate_mm(baseline, r_rm_worst) : 0.0;
    double pk_rm = (r_mm_worst < r_b) ? peak_rate_rm(baseline, r_mm_worst) : r_b;
    TargetVerdict v;
    v.margin_mm = pk_mm - r_mm_worst;
    v.margin_rm = r_rm_worst - pk_rm;
    v.feasible = v.margin_mm >= -kNashTol && v.margin_rm >= -kNashTol;
    return v;
}

double max_target_volume(const Market& baseline, const TypeDist& mm_types,
                         const TypeDist& rm_types) {
    mm_types.validate();
    rm_types.validate();
    return std::min(mm_types.lo * baseline.demand.max_volume(),
                    rm_types.lo * baseline.supply.max_volume());
}

std::vector<TargetScanRow> enumerate_target_volumes(const Market& baseline, int n,
                                                    const TypeDist& mm_types,
                                                    const TypeDist& rm_types) {
    if (n < 2) throw DomainError("target scan: need at least two volumes");
    double top = max_target_volume(baseline, mm_types, rm_types);
    std::vector<TargetScanRow> rows;
    rows.reserve(n);
    for (int i = 0; i < n; ++i) {
        double t = top * static_cast<double>(i) / static_cast<double>(n - 1);
        rows.push_back({t, check_target_equilibrium(baseline, t, mm_types, rm_types)});
    }
    return rows;
}

DeviationReport monte_carlo_deviation(const Market& baseline, double volume,
                                      const TypeDist& mm_types, const TypeDist& rm_types,
                                      int draws, int rate_grid, uint64_t seed, int jobs) {
    mm_types.validate();
    rm_types.validate();
    if (draws < 1) throw DomainError("deviation scan: need at least one draw");
    if (rate_grid < 2) throw DomainError("deviation scan: need at least two grid rates");
    double r_b = baseline.demand.rate_bound();
    DeviationReport report;
    report.rows.resize(draws);
    parallel_for(draws, jobs, [&](int64_t i) {
        SplitRng rng(seed ^ splitmix64(static_cast<uint64_t>(i) + 1));
        double th_mm = mm_types.sample(rng);
        double th_rm = rm_types.sample(rng);
        Market shocked{baseline.demand.with_shock(th_mm),
                       baseline.supply.with_shock(th_rm)};
        double r_mm_t = target_rate(baseline.demand, volume, th_mm);
        double r_rm_t = target_rate(baseline.supply, volume, th_rm);
        DealerPayoffs base = dealer_payoffs(shocked, r_mm_t, r_rm_t);
        double gain = 0.0;
        for (int g = 0; g < rate_grid; ++g) {
            double r = r_b * static_cast<double>(g) / static_cast<double>(rate_grid - 1);
            gain = std::max(gain, dealer_payoffs(shocked, r, r_rm_t).mm - base.mm);
            gain = std::max(gain, dealer_payoffs(shocked, r_mm_t, r).rm - base.rm);
        }
        report.rows[i] = {static_cast<uint64_t>(i), th_mm, th_rm, gain};
    });
    for (const auto& row : report.rows) report.max_gain = std::max(report.max_gain, row.gain);
    return report;
}

void write_deviation_csv(std::ostream& out, const DeviationReport& report) {
    out << "draw,theta_mm,theta_rm,gain\n";
    for (const auto& r : report.rows) {
        out << r.draw << ',' << fmt9(r.theta_mm) << ',' << fmt9(r.theta_rm) << ','
            << fmt9(r.gain) << '\n';
    }
}

void write_target_scan_csv(std::ostream& out, const std::vector<TargetScanRow>& rows) {
    out << "volume,feasible,margin_mm,margin_rm\n";
    for (const auto& r : rows) {
        out << fmt9(r.volume) << ',' << (r.verdict.feasible ? 1 : 0) << ','
            << fmt9(r.verdict.margin_mm) << ',' << fmt9(r.verdict.margin_rm) << '\n';
    }
}

}  // namespace repomech
