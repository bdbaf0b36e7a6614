#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "repomech/equilibrium.hpp"
#include "repomech/random.hpp"

namespace repomech {

// Private multiplicative shock on a dealer's client volume: type theta
// scales volumes, rates stay put. Uniform on [lo, hi] unless discrete
// atoms (value, weight) are listed.
struct TypeDist {
    double lo = 1.0;
    double hi = 1.0;
    std::vector<std::pair<double, double>> atoms;

    void validate() const;
    double sample(SplitRng& rng) const;
};

// Rate a dealer of type theta quotes so its shocked schedule clears exactly
// `volume`; the baseline schedule is the theta = 1 curve.
double target_rate(const ScheduleModel& baseline, double volume, double theta);

struct TargetVerdict {
    bool feasible = false;
    double margin_mm = 0.0;  // worst-case slack in the cash-side peak condition
    double margin_rm = 0.0;  // worst-case slack in the securities-side peak condition
};

// Worst-case peak conditions for the constant-volume strategy profile.
// Rate maps are monotone in type and the peak maps are type-invariant, so
// the binding cases sit at the low ends of both type ranges.
TargetVerdict check_target_equilibrium(const Market& baseline, double volume,
                                       const TypeDist& mm_types, const TypeDist& rm_types);

// Largest volume every type of both dealers can quote:
// min(theta_mm_lo * D_max, theta_rm_lo * S_max).
double max_target_volume(const Market& baseline, const TypeDist& mm_types,
                         const TypeDist& rm_types);

struct TargetScanRow {
    double volume = 0.0;
    TargetVerdict verdict;
};
// Verdicts for n evenly spaced volumes over [0, max_target_volume].
std::vector<TargetScanRow> enumerate_target_volumes(const Market& baseline, int n,
                                                    const TypeDist& mm_types,
                                                    const TypeDist& rm_types);

struct DeviationRow {
    uint64_t draw = 0;
    double theta_mm = 1.0;
    double theta_rm = 1.0;
    double gain = 0.0;  // best ex-post improvement either dealer found
};
struct DeviationReport {
    std::vector<DeviationRow> rows;
    double max_gain = 0.0;
};

// Per-draw deviation scan: sample both types, pin the opponent to the
// target strategy, sweep `rate_grid` own rates (inventory carry included),
// record the best improvement over the target payoff.
DeviationReport monte_carlo_deviation(const Market& baseline, double volume,
                                      const TypeDist& mm_types, const TypeDist& rm_types,
                                      int draws, int rate_grid, uint64_t seed,
                                      int jobs = 1);

void write_deviation_csv(std::ostream& out, const DeviationReport& report);
void write_target_scan_csv(std::ostream& out, const std::vector<TargetScanRow>& rows);

}  // namespace repomech
