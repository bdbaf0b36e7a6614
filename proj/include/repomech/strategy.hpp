#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "repomech/contract.hpp"
#include "repomech/schedule.hpp"

namespace repomech::strategy {

using wire::Fp;
using wire::ScheduleEntry;

// What a dealer earns when reports (possibly shaded) go through the real
// hurdle filter and trade selection. Each dealer keeps half the reported
// spread on the selected row, so the payoff is half the selection objective.
//
// Shading direction is fixed by client sign-off: the funding client will
// countersign a higher rate than it asked (it gets paid more), the lending
// client a lower one (it pays less). So the funding dealer can only shift
// its leg up and the lending dealer only down.

struct ReportCell {
    double offset_mm = 0;  // uniform upward shift of the funding leg
    double offset_rm = 0;  // uniform downward shift of the lending leg
    bool traded = false;
    double payoff_mm = 0;
    double payoff_rm = 0;
};

struct ReportSweep {
    std::vector<double> offsets_mm;  // first entry must be 0 (truthful)
    std::vector<double> offsets_rm;
    std::vector<ReportCell> cells;  // row-major: mm offset index major
    // Strictly-better-than-truthful deviations, holding the opponent cell
    // fixed: payoff(d, o) > payoff(0, o) + tol.
    int violations_mm = 0;
    int violations_rm = 0;
    double max_gain_mm = 0;  // most any shaded report beat truthful by
    double max_gain_rm = 0;

    const ReportCell& at(size_t i_mm, size_t i_rm) const {
        return cells[i_mm * offsets_rm.size() + i_rm];
    }
};

// Exhaustive sweep over uniform-shift misreports for both dealers.
ReportSweep sweep_schedule_misreports(const DiscretizedBook& book, double kappa_hat,
                                      const std::vector<double>& offsets_mm,
                                      const std::vector<double>& offsets_rm, double tol = 1e-12);

struct ReportFuzz {
    int draws = 0;
    int violations = 0;
    double max_gain = 0;
};

// Random per-row shading (rectified to keep each report monotone), opponent
// truthful; checks no draw beats the truthful payoff.
ReportFuzz fuzz_schedule_misreports(const DiscretizedBook& book, double kappa_hat, int draws,
                                    uint64_t seed, double tol = 1e-12);

// ---- spread negotiation ----------------------------------------------------

// One evaluated negotiation: the opener's floor, the response (kappa2 ==
// kappa1 encodes acceptance), and what each side nets. A dealer that ends
// up trading below its true floor books the sentinel loss.
struct SpreadCell {
    double kappa1 = 0;
    double kappa2 = 0;
    double kappa_hat = 0;
    bool traded = false;
    double half_spread = 0;
    double volume = 0;
    double payoff_first = 0;
    double payoff_second = 0;
};

inline constexpr double kFloorBreachPenalty = -1e6;

struct SpreadSweep {
    std::vector<double> candidates;
    std::vector<SpreadCell> cells;  // every kappa1 x (kappa2 >= kappa1) pair
    // Tie-kept best responses of the second mover per opener choice,
    // aligned with `candidates`; values are the resulting kappa_hat.
    std::vector<std::vector<double>> best_response;
    // Opener choices maximizing its worst payoff across response ties.
    std::vector<double> argmax_first;
    std::vector<double> path_kappa_hats;  // kappa_hat over argmax x response paths
    double truthful_payoff_first = 0;     // both report their true floors
    double truthful_payoff_second = 0;
    // Best unilaterally reachable payoff minus the truthful-path payoff:
    // opener measured against the response correspondence, responder
    // against a truthful opener.
    double max_gain_first = 0;
    double max_gain_second = 0;
};

SpreadSweep sweep_spread_misreports(const DiscretizedBook& book, double kappa_true_first,
                                    double kappa_true_second,
                                    const std::vector<double>& candidates);

// ---- selection vs pooling --------------------------------------------------

// Why per-state selection beats committing on the average: a hurdle between
// the pooled mean and the best state kills the ex-ante trade while the
// mechanism still executes the good state.
struct SelectionRisk {
    double expected_half_spread = 0;
    bool ex_ante_trade = false;       // pooled mean clears the hurdle
    std::vector<bool> state_trades;   // per state: half-spread clears it
    int selected_state = -1;          // widest trading state, -1 if none
    double selected_half_spread = 0;
};

SelectionRisk selection_risk_demo(const std::vector<double>& half_spreads,
                                  const std::vector<double>& weights, double kappa);

void write_report_sweep_csv(std::ostream& out, const ReportSweep& sweep);
void write_spread_sweep_csv(std::ostream& out, const SpreadSweep& sweep);

}  // namespace repomech::strategy
