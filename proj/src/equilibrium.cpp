#include "repomech/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include "repomech/format.hpp"
#include "repomech/roots.hpp"

namespace repomech {

Market make_market(ScheduleModel demand, ScheduleModel supply) {
    if (demand.side() != Side::demand || supply.side() != Side::supply)
        throw DomainError("market: sides must be (demand, supply)");
    if (demand.rate_bound() != supply.rate_bound())
        throw DomainError("market: schedules disagree on the rate bound");
    return Market{std::move(demand), std::move(supply)};
}

double interdealer_rate(double r_mm, double r_rm) {
    if (r_rm < r_mm) throw DomainError("interdealer rate: negative dealer spread");
    return 0.5 * (r_mm + r_rm);
}

double peak_rate_mm(const Market& m, double r_rm) {
    if (!(r_rm > 0.0 && r_rm <= m.demand.rate_bound()))
        throw DomainError("peak rate: opponent rate outside (0, r_b]");
    auto foc = [&](double r) {
        return (r_rm - r) * m.demand.slope(r) - m.demand.eval(r);
    };
    // foc(0+) > 0 for every admissible family, foc(r_rm) = -D(r_rm) < 0.
    return bisect(foc, 0.0, r_rm);
}

double peak_rate_rm(const Market& m, double r_mm) {
    double r_b = m.supply.rate_bound();
    if (!(r_mm >= 0.0 && r_mm < r_b))
        throw DomainError("peak rate: opponent rate outside [0, r_b)");
    auto foc = [&](double r) {
        return m.supply.eval(r) + (r - r_mm) * m.supply.slope(r);
    };
    return bisect(foc, r_mm, r_b);
}

DealerPayoffs dealer_payoffs(const Market& m, double r_mm, double r_rm) {
    double d = m.demand.eval(r_mm);
    double s = m.supply.eval(r_rm);
    double q = std::min(d, s);
    double spread_profit = 0.5 * std::max(0.0, r_rm - r_mm) * q;
    return DealerPayoffs{
        spread_profit - r_mm * std::max(0.0, d - q),
        spread_profit - r_rm * std::max(0.0, s - q),
    };
}

EquilibriumPoint classify(const Market& m, double r_mm, double r_rm, double tol) {
    double d = m.demand.eval(r_mm);
    double s = m.supply.eval(r_rm);
    EquilibriumPoint p;
    p.r_mm = r_mm;
    p.r_rm = r_rm;
    p.volume = std::min(d, s);
    p.r_bd = 0.5 * (r_mm + r_rm);
    p.joint_profit = (r_rm - r_mm) * p.volume;
    p.balanced = std::abs(d - s) <= tol;
    double pk_mm = (r_rm > 0.0) ? peak_rate_mm(m, r_rm) : 0.0;
    double pk_rm = (r_mm < m.supply.rate_bound()) ? peak_rate_rm(m, r_mm)
                                                  : m.supply.rate_bound();
    p.nash = p.balanced && r_mm <= pk_mm + tol && r_rm >= pk_rm - tol;
    p.constrained_mm = pk_mm - r_mm > tol;
    p.constrained_rm = r_rm - pk_rm > tol;
    return p;
}

EquilibriumPoint equilibrium_from_seed(const Market& m, double seed) {
    Crossing x = crossing(m.demand, m.supply);
    if (!(seed >= 0.0 && seed <= x.rate + 1e-12))
        throw DomainError("equilibrium seed outside [0, crossing rate]");
    double r_mm = std::min(seed, x.rate);
    double r_rm = balanced_counterpart(m.demand, m.supply, r_mm);
    if (r_mm > peak_rate_mm(m, r_rm)) {
        // Cash dealer past its peak: pull back, then restore balance.
        r_mm = peak_rate_mm(m, r_rm);
        r_rm = balanced_counterpart(m.demand, m.supply, r_mm);
    }
    if (r_rm < peak_rate_rm(m, r_mm)) {
        // Securities dealer short of its peak: push up, rebalance the cash leg.
        r_rm = peak_rate_rm(m, r_mm);
        r_mm = m.demand.inverse(m.supply.eval(r_rm));
    }
    return classify(m, r_mm, r_rm);
}

std::vector<EquilibriumPoint> enumerate_equilibria(const Market& m, int count) {
    if (count < 1) throw DomainError("enumerate: count must be positive");
    Crossing x = crossing(m.demand, m.supply);
    std::vector<EquilibriumPoint> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        double seed = (count == 1) ? 0.0
                                   : x.rate * static_cast<double>(i) /
                                         static_cast<double>(count - 1);
        out.push_back(equilibrium_from_seed(m, seed));
    }
    return out;
}

namespace {

double joint_profit_at(const Market& m, double t) {
    return (m.supply.inverse(t) - m.demand.inverse(t)) * t;
}

// First-order condition of the volume objective, derivatives of the inverse
// schedules taken by central differences.
double jpm_foc(const Market& m, double t, double t_max) {
    double h = std::min(1e-6, 0.25 * std::min(t, t_max - t));
    double spread = m.supply.inverse(t) - m.demand.inverse(t);
    double ds = (m.supply.inverse(t + h) - m.supply.inverse(t - h)) / (2.0 * h);
    double dd = (m.demand.inverse(t + h) - m.demand.inverse(t - h)) / (2.0 * h);
    return spread + t * (ds - dd);
}

}  // namespace

EquilibriumPoint max_joint_profit(const Market& m) {
    Crossing x = crossing(m.demand, m.supply);
    double t_max = x.volume;
    auto pi = [&](double t) { return joint_profit_at(m, t); };
    double t_star = golden_max(pi, 0.0, t_max);
    // Refine interior optima on the first-order condition.
    double lo = 1e-9 * t_max, hi = t_max * (1.0 - 1e-9);
    double flo = jpm_foc(m, lo, t_max), fhi = jpm_foc(m, hi, t_max);
    if (std::isfinite(flo) && std::isfinite(fhi) &&
        std::signbit(flo) != std::signbit(fhi)) {
        double t_foc = bisect([&](double t) { return jpm_foc(m, t, t_max); }, lo, hi);
        if (pi(t_foc) >= pi(t_star)) t_star = t_foc;
    }
    return classify(m, m.demand.inverse(t_star), m.supply.inverse(t_star));
}

std::optional<EquilibriumPoint> max_joint_profit(const Market& m, double kappa) {
    Crossing x = crossing(m.demand, m.supply);
    double t_max = x.volume;
    auto half_spread = [&](double t) {
        return 0.5 * (m.supply.inverse(t) - m.demand.inverse(t));
    };
    double t_cap = t_max;
    if (kappa > 0.0) {
        if (kappa >= half_spread(0.0)) return std::nullopt;  // only T = 0 clears it
        t_cap = bisect([&](double t) { return half_spread(t) - kappa; }, 0.0, t_max,
                       1e-12);
    }
    if (!(t_cap > 0.0)) return std::nullopt;
    auto pi = [&](double t) { return joint_profit_at(m, t); };
    EquilibriumPoint unconstrained = max_joint_profit(m);
    double t_star = (unconstrained.volume <= t_cap) ? unconstrained.volume
                                                    : golden_max(pi, 0.0, t_cap);
    if (pi(t_cap) >= pi(t_star)) t_star = t_cap;
    return classify(m, m.demand.inverse(t_star), m.supply.inverse(t_star));
}

FundingCommitment derive_commitment(const Market& m, double t_floor_mm,
                                    double t_floor_rm) {
    if (t_floor_mm < 0.0 || t_floor_rm < 0.0)
        throw DomainError("commitment: volume floors must be non-negative");
    Crossing x = crossing(m.demand, m.supply);
    if (t_floor_mm > x.volume + 1e-12 || t_floor_rm > x.volume + 1e-12)
        throw InfeasibleCommitmentError("commitment: floor above the crossing volume");
    FundingCommitment fc;
    fc.t_floor_mm = t_floor_mm;
    fc.t_floor_rm = t_floor_rm;
    fc.r_fc_mm = (t_floor_mm == 0.0) ? 0.0 : m.demand.inverse(t_floor_mm);
    fc.r_fc_rm = (t_floor_rm == 0.0) ? m.supply.rate_bound()
                                     : m.supply.inverse(t_floor_rm);
    return fc;
}

namespace {

// Best own rate over [lo, hi] for one dealer with the opponent held fixed.
// The payoff is single-peaked on each side of the balance rate, so golden
// section per piece plus the piece boundaries covers the maximum.
double best_rate_on(const std::function<double(double)>& payoff, double lo, double hi,
                    double split) {
    if (hi < lo) throw InfeasibleCommitmentError("commitment interval is empty");
    std::vector<double> candidates{lo, hi};
    double cut = std::clamp(split, lo, hi);
    candidates.push_back(cut);
    if (cut - lo > 1e-12) candidates.push_back(golden_max(payoff, lo, cut));
    if (hi - cut > 1e-12) candidates.push_back(golden_max(payoff, cut, hi));
    double best = candidates.front();
    double best_v = payoff(best);
    for (double c : candidates) {
        double v = payoff(c);
        if (v > best_v) {
            best = c;
            best_v = v;
        }
    }
    return best;
}

}  // namespace

double best_response(const Market& m, Side dealer, double opponent_rate,
                     const FundingCommitment& fc) {
    double r_b = m.demand.rate_bound();
    if (!(opponent_rate >= 0.0 && opponent_rate <= r_b))
        throw DomainError("best response: opponent rate outside [0, r_b]");
    if (dealer == Side::demand) {
        double s_opp = m.supply.eval(opponent_rate);
        auto payoff = [&](double r) {
            return dealer_payoffs(m, r, opponent_rate).mm;
        };
        double split = (s_opp >= m.demand.max_volume()) ? r_b : m.demand.inverse(s_opp);
        return best_rate_on(payoff, fc.r_fc_mm, r_b, split);
    }
    double d_opp = m.demand.eval(opponent_rate);
    auto payoff = [&](double r) { return dealer_payoffs(m, opponent_rate, r).rm; };
    double split = (d_opp >= m.supply.max_volume()) ? 0.0 : m.supply.inverse(d_opp);
    return best_rate_on(payoff, 0.0, fc.r_fc_rm, split);
}

CommitmentOutcome commitment_equilibrium(const Market& m, const FundingCommitment& fc) {
    constexpr double kDamp = 0.5;
    constexpr double kMoveTol = 1e-8;
    constexpr int kMaxIter = 10'000;
    double r_mm = fc.r_fc_mm;
    double r_rm = fc.r_fc_rm;
    CommitmentOutcome out;
    for (int it = 1; it <= kMaxIter; ++it) {
        double next_mm = r_mm + kDamp * (best_response(m, Side::demand, r_rm, fc) - r_mm);
        double next_rm =
            r_rm + kDamp * (best_response(m, Side::supply, next_mm, fc) - r_rm);
        double moved = std::max(std::abs(next_mm - r_mm), std::abs(next_rm - r_rm));
        r_mm = next_mm;
        r_rm = next_rm;
        out.iterations = it;
        if (moved < kMoveTol) {
            out.converged = true;
            break;
        }
    }
    out.point = classify(m, r_mm, r_rm);
    out.verified =
        out.converged &&
        std::abs(best_response(m, Side::demand, r_rm, fc) - r_mm) <= 1e-6 &&
        std::abs(best_response(m, Side::supply, r_mm, fc) - r_rm) <= 1e-6;
    return out;
}

void write_equilibria_csv(std::ostream& out, const std::vector<double>& seeds,
                          const std::vector<EquilibriumPoint>& points) {
    out << "seed,r_mm,r_rm,volume,spread,joint_profit,nash\n";
    for (size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        double seed = (i < seeds.size()) ? seeds[i] : 0.0;
        out << fmt9(seed) << ',' << fmt9(p.r_mm) << ',' << fmt9(p.r_rm) << ','
            << fmt9(p.volume) << ',' << fmt9(p.r_rm - p.r_mm) << ','
            << fmt9(p.joint_profit) << ',' << (p.nash ? 1 : 0) << '\n';
    }
}

}  // namespace repomech
