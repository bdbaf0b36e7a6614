#include "repomech/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "repomech/fixed.hpp"
#include "repomech/format.hpp"
#include "repomech/random.hpp"

namespace repomech::strategy {

namespace {

std::vector<ScheduleEntry> encode_leg(const DiscretizedBook& book, bool funding_side) {
    std::vector<ScheduleEntry> out;
    out.reserve(book.volume.size());
    for (size_t i = 0; i < book.volume.size(); ++i)
        out.push_back({fp::encode(book.volume[i]),
                       fp::encode(funding_side ? book.mm_rate[i] : book.rm_rate[i])});
    return out;
}

std::vector<ScheduleEntry> shift_rates(std::vector<ScheduleEntry> leg, Fp delta) {
    for (auto& e : leg) e.rate += delta;
    return leg;
}

struct RunOutcome {
    bool traded = false;
    Fp spread = 0;
    Fp volume = 0;
};

// The exact artifacts the deployed contract uses: integer hurdle filter,
// then integer profit argmax.
RunOutcome run_selection(const std::vector<ScheduleEntry>& mm,
                         const std::vector<ScheduleEntry>& rm, Fp kappa_hat) {
    auto feasible = contract::filter_feasible(mm, rm, kappa_hat);
    auto chosen = contract::select_trade(mm, rm, feasible);
    if (!chosen) return {};
    return {true, chosen->rate_rm - chosen->rate_mm, chosen->volume};
}

double dealer_payoff(const RunOutcome& o) {
    if (!o.traded) return 0;
    return 0.5 * fp::decode(o.spread) * fp::decode(o.volume);
}

}  // namespace

ReportSweep sweep_schedule_misreports(const DiscretizedBook& book, double kappa_hat,
                                      const std::vector<double>& offsets_mm,
                                      const std::vector<double>& offsets_rm, double tol) {
    if (offsets_mm.empty() || offsets_rm.empty() || offsets_mm.front() != 0 ||
        offsets_rm.front() != 0)
        throw DomainError("misreport sweep: offset lists must start at 0 (truthful)");
    for (double d : offsets_mm)
        if (d < 0) throw DomainError("funding-leg offsets must be nonnegative");
    for (double d : offsets_rm)
        if (d < 0) throw DomainError("lending-leg offsets must be nonnegative");

    const auto truth_mm = encode_leg(book, true);
    const auto truth_rm = encode_leg(book, false);
    const Fp hurdle = fp::encode(kappa_hat);

    ReportSweep sweep;
    sweep.offsets_mm = offsets_mm;
    sweep.offsets_rm = offsets_rm;
    sweep.cells.reserve(offsets_mm.size() * offsets_rm.size());
    for (double dm : offsets_mm) {
        auto mm = shift_rates(truth_mm, fp::encode(dm));
        for (double dr : offsets_rm) {
            auto rm = shift_rates(truth_rm, -fp::encode(dr));
            auto o = run_selection(mm, rm, hurdle);
            ReportCell cell;
            cell.offset_mm = dm;
            cell.offset_rm = dr;
            cell.traded = o.traded;
            cell.payoff_mm = cell.payoff_rm = dealer_payoff(o);
            sweep.cells.push_back(cell);
        }
    }
    for (size_t i = 0; i < offsets_mm.size(); ++i)
        for (size_t j = 0; j < offsets_rm.size(); ++j) {
            double gain_mm = sweep.at(i, j).payoff_mm - sweep.at(0, j).payoff_mm;
            double gain_rm = sweep.at(i, j).payoff_rm - sweep.at(i, 0).payoff_rm;
            sweep.max_gain_mm = std::max(sweep.max_gain_mm, gain_mm);
            sweep.max_gain_rm = std::max(sweep.max_gain_rm, gain_rm);
            if (gain_mm > tol) ++sweep.violations_mm;
            if (gain_rm > tol) ++sweep.violations_rm;
        }
    return sweep;
}

ReportFuzz fuzz_schedule_misreports(const DiscretizedBook& book, double kappa_hat, int draws,
                                    uint64_t seed, double tol) {
    if (draws < 1) throw DomainError("fuzz: at least one draw");
    const auto truth_mm = encode_leg(book, true);
    const auto truth_rm = encode_leg(book, false);
    const Fp hurdle = fp::encode(kappa_hat);
    const double truthful = dealer_payoff(run_selection(truth_mm, truth_rm, hurdle));

    ReportFuzz fz;
    fz.draws = draws;
    SplitRng rng(seed);
    for (int d = 0; d < draws; ++d) {
        bool funding_side = (d % 2 == 0);
        auto leg = funding_side ? truth_mm : truth_rm;
        for (auto& e : leg) {
            Fp bump = fp::encode(rng.uniform(0.0, 1.0));
            e.rate += funding_side ? bump : -bump;
        }
        // Rectify so the shaded report still passes intake monotonicity.
        for (size_t i = 1; i < leg.size(); ++i) {
            if (funding_side)
                leg[i].rate = std::max(leg[i].rate, leg[i - 1].rate);
            else
                leg[i].rate = std::min(leg[i].rate, leg[i - 1].rate);
        }
        if (!funding_side)
            for (auto& e : leg) e.rate = std::max<Fp>(e.rate, 0);
        auto o = funding_side ? run_selection(leg, truth_rm, hurdle)
                              : run_selection(truth_mm, leg, hurdle);
        double gain = dealer_payoff(o) - truthful;
        fz.max_gain = std::max(fz.max_gain, gain);
        if (gain > tol) ++fz.violations;
    }
    return fz;
}

// ---- spread negotiation ------------------------------------------------------

SpreadSweep sweep_spread_misreports(const DiscretizedBook& book, double kappa_true_first,
                                    double kappa_true_second,
                                    const std::vector<double>& candidates) {
    if (candidates.size() < 2) throw DomainError("spread sweep: need at least two candidates");
    for (size_t i = 1; i < candidates.size(); ++i)
        if (candidates[i] <= candidates[i - 1])
            throw DomainError("spread sweep: candidates must be strictly increasing");

    const auto mm = encode_leg(book, true);
    const auto rm = encode_leg(book, false);
    const Fp floor_first = fp::encode(kappa_true_first);
    const Fp floor_second = fp::encode(kappa_true_second);

    auto payoff_at = [&](Fp hat, Fp own_floor) -> std::pair<SpreadCell, double> {
        SpreadCell c;
        auto o = run_selection(mm, rm, hat);
        c.traded = o.traded;
        if (!o.traded) return {c, 0.0};
        c.half_spread = 0.5 * fp::decode(o.spread);
        c.volume = fp::decode(o.volume);
        double pay = o.spread < 2 * own_floor ? kFloorBreachPenalty : dealer_payoff(o);
        return {c, pay};
    };

    SpreadSweep sweep;
    sweep.candidates = candidates;
    sweep.best_response.resize(candidates.size());

    // Worst payoff the opener can be handed at each choice, across the
    // responder's tie-kept best responses.
    std::vector<double> opener_guarantee(candidates.size(),
                                         -std::numeric_limits<double>::infinity());

    for (size_t i = 0; i < candidates.size(); ++i) {
        Fp k1 = fp::encode(candidates[i]);
        double best_second = -std::numeric_limits<double>::infinity();
        std::vector<std::pair<double, double>> responses;  // (kappa_hat, opener payoff)
        for (size_t j = i; j < candidates.size(); ++j) {
            Fp k2 = fp::encode(candidates[j]);
            Fp hat = std::max(k1, k2);
            auto [cell_f, pay_first] = payoff_at(hat, floor_first);
            auto [cell_s, pay_second] = payoff_at(hat, floor_second);
            SpreadCell cell = cell_f;
            cell.kappa1 = candidates[i];
            cell.kappa2 = candidates[j];
            cell.kappa_hat = fp::decode(hat);
            cell.payoff_first = pay_first;
            cell.payoff_second = pay_second;
            sweep.cells.push_back(cell);
            if (pay_second > best_second + 1e-15) {
                best_second = pay_second;
                responses.clear();
            }
            if (pay_second >= best_second - 1e-15)
                responses.push_back({fp::decode(hat), pay_first});
        }
        double guarantee = std::numeric_limits<double>::infinity();
        for (auto& [hat, pf] : responses) {
            sweep.best_response[i].push_back(hat);
            guarantee = std::min(guarantee, pf);
        }
        opener_guarantee[i] = guarantee;
    }

    double best_first = *std::max_element(opener_guarantee.begin(), opener_guarantee.end());
    for (size_t i = 0; i < candidates.size(); ++i)
        if (opener_guarantee[i] >= best_first - 1e-15) {
            sweep.argmax_first.push_back(candidates[i]);
            for (double hat : sweep.best_response[i]) sweep.path_kappa_hats.push_back(hat);
        }

    // Truthful path: opener states its floor, responder lifts to its own.
    Fp hat_true = std::max(floor_first, floor_second);
    sweep.truthful_payoff_first = payoff_at(hat_true, floor_first).second;
    sweep.truthful_payoff_second = payoff_at(hat_true, floor_second).second;

    // Unilateral reachability: the opener owns its choice but not the
    // response; the responder owns its response under a truthful opener.
    double reach_first = -std::numeric_limits<double>::infinity();
    for (double g : opener_guarantee) reach_first = std::max(reach_first, g);
    sweep.max_gain_first = reach_first - sweep.truthful_payoff_first;

    double reach_second = -std::numeric_limits<double>::infinity();
    for (const auto& cell : sweep.cells)
        if (fp::encode(cell.kappa1) == floor_first)
            reach_second = std::max(reach_second, cell.payoff_second);
    sweep.max_gain_second = reach_second - sweep.truthful_payoff_second;
    return sweep;
}

// ---- selection vs pooling ----------------------------------------------------

SelectionRisk selection_risk_demo(const std::vector<double>& half_spreads,
                                  const std::vector<double>& weights, double kappa) {
    if (half_spreads.empty() || half_spreads.size() != weights.size())
        throw DomainError("selection demo: one weight per state");
    double wsum = 0;
    for (double w : weights) {
        if (w < 0) throw DomainError("selection demo: weights must be nonnegative");
        wsum += w;
    }
    if (wsum <= 0) throw DomainError("selection demo: weights must not all vanish");

    SelectionRisk out;
    for (size_t i = 0; i < half_spreads.size(); ++i)
        out.expected_half_spread += half_spreads[i] * (weights[i] / wsum);
    out.ex_ante_trade = out.expected_half_spread >= kappa;
    out.state_trades.resize(half_spreads.size());
    for (size_t i = 0; i < half_spreads.size(); ++i) {
        out.state_trades[i] = half_spreads[i] >= kappa;
        if (out.state_trades[i] && half_spreads[i] > out.selected_half_spread) {
            out.selected_half_spread = half_spreads[i];
            out.selected_state = static_cast<int>(i);
        }
    }
    return out;
}

// ---- csv ----------------------------------------------------------------------

void write_report_sweep_csv(std::ostream& out, const ReportSweep& sweep) {
    out << "offset_mm,offset_rm,traded,payoff_mm,payoff_rm\n";
    for (const auto& c : sweep.cells)
        out << fmt9(c.offset_mm) << ',' << fmt9(c.offset_rm) << ',' << (c.traded ? 1 : 0) << ','
            << fmt9(c.payoff_mm) << ',' << fmt9(c.payoff_rm) << '\n';
}

void write_spread_sweep_csv(std::ostream& out, const SpreadSweep& sweep) {
    out << "kappa1,kappa2,kappa_hat,traded,half_spread,volume,payoff_first,payoff_second\n";
    for (const auto& c : sweep.cells)
        out << fmt9(c.kappa1) << ',' << fmt9(c.kappa2) << ',' << fmt9(c.kappa_hat) << ','
            << (c.traded ? 1 : 0) << ',' << fmt9(c.half_spread) << ',' << fmt9(c.volume) << ','
            << fmt9(c.payoff_first) << ',' << fmt9(c.payoff_second) << '\n';
}

}  // namespace repomech::strategy
