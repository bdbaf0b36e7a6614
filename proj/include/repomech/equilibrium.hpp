#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "repomech/schedule.hpp"

namespace repomech {

// A demand/supply pair quoted over the same rate interval.
struct Market {
    ScheduleModel demand;
    ScheduleModel supply;
};
Market make_market(ScheduleModel demand, ScheduleModel supply);

// Tolerance for balance and peak comparisons in equilibrium verdicts.
inline constexpr double kNashTol = 1e-8;

struct EquilibriumPoint {
    double r_mm = 0.0;
    double r_rm = 0.0;
    double volume = 0.0;        // executed volume min(D(r_mm), S(r_rm))
    double r_bd = 0.0;          // interdealer rate (midpoint split)
    double joint_profit = 0.0;  // (r_rm - r_mm) * volume
    bool balanced = false;
    bool nash = false;
    bool constrained_mm = false;  // quoting strictly below the own-peak rate
    bool constrained_rm = false;  // quoting strictly above the own-peak rate
};

// Midpoint split of the dealer spread. Throws on a negative spread.
double interdealer_rate(double r_mm, double r_rm);

// Rate at which the cash-side dealer's spread profit peaks, given the
// opponent's rate: root of (r_rm - r) D'(r) - D(r).
double peak_rate_mm(const Market& m, double r_rm);

// Securities-side peak: root of S(r) + (r - r_mm) S'(r).
double peak_rate_rm(const Market& m, double r_mm);

struct DealerPayoffs {
    double mm = 0.0;
    double rm = 0.0;
};
// Spread profit on the executed volume minus the carry cost of any
// unmatched client inventory (outside option pinned at rate zero).
DealerPayoffs dealer_payoffs(const Market& m, double r_mm, double r_rm);

// Full verdict on a rate pair: balance, peak conditions, Nash flag.
EquilibriumPoint classify(const Market& m, double r_mm, double r_rm, double tol = kNashTol);

// Walks a balanced seed to a Nash point: rebalance, pull the cash-side rate
// down to its peak and rebalance, then push the securities-side rate up to
// its peak and rebalance the other leg.
EquilibriumPoint equilibrium_from_seed(const Market& m, double seed);

// equilibrium_from_seed over `count` evenly spaced seeds on [0, crossing rate].
std::vector<EquilibriumPoint> enumerate_equilibria(const Market& m, int count);

// Joint-profit maximizer over volumes: argmax (S^-1(T) - D^-1(T)) * T.
EquilibriumPoint max_joint_profit(const Market& m);

// Same, restricted to volumes whose half-spread clears `kappa`.
// Empty when no positive volume is feasible.
std::optional<EquilibriumPoint> max_joint_profit(const Market& m, double kappa);

// Volume floors pledged to clients, translated to rate bounds:
// the cash dealer may not quote below r_fc_mm, the securities dealer not
// above r_fc_rm. Zero floors leave the full rate interval.
struct FundingCommitment {
    double t_floor_mm = 0.0;
    double t_floor_rm = 0.0;
    double r_fc_mm = 0.0;
    double r_fc_rm = 0.0;
};
FundingCommitment derive_commitment(const Market& m, double t_floor_mm, double t_floor_rm);

// Payoff-maximizing own rate against a fixed opponent rate, restricted to
// the commitment interval. Golden-section per monotone piece plus explicit
// boundary comparison.
double best_response(const Market& m, Side dealer, double opponent_rate,
                     const FundingCommitment& fc);

struct CommitmentOutcome {
    EquilibriumPoint point;
    bool converged = false;
    int iterations = 0;
    bool verified = false;  // both rates within 1e-6 of their best response
};
// Damped alternating best response from the commitment corner.
CommitmentOutcome commitment_equilibrium(const Market& m, const FundingCommitment& fc);

// CSV emission for sweep outputs: seed,r_mm,r_rm,volume,spread,joint_profit,nash.
void write_equilibria_csv(std::ostream& out, const std::vector<double>& seeds,
                          const std::vector<EquilibriumPoint>& points);

}  // namespace repomech
