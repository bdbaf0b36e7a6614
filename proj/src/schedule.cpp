#include "repomech/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "repomech/roots.hpp"

namespace repomech {

namespace {

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

// Base quadratic ramp f(x) = x - x^2/(2 r_b): rises from 0 with slope 1 and
// flattens out exactly at x = r_b (volume r_b/2).
double quad_ramp(double x, double r_b) { return x - x * x / (2.0 * r_b); }
double quad_ramp_slope(double x, double r_b) { return 1.0 - x / r_b; }
double quad_ramp_inverse(double y, double r_b) {
    double disc = r_b * r_b - 2.0 * r_b * y;
    return r_b - std::sqrt(std::max(0.0, disc));
}

}  // namespace

std::string to_string(Side s) { return s == Side::demand ? "demand" : "supply"; }

std::string to_string(Family f) {
    switch (f) {
        case Family::sqrt_curve: return "sqrt";
        case Family::quadratic_cap: return "quadratic-cap";
        case Family::tabulated: return "custom-tabulated";
    }
    return "?";
}

ScheduleModel ScheduleModel::analytic(Side side, Family family, double a, double r_b,
                                      double theta) {
    if (family == Family::tabulated)
        throw DomainError("schedule: tabulated family needs a table");
    ScheduleModel m;
    m.side_ = side;
    m.family_ = family;
    m.a_ = a;
    m.r_b_ = r_b;
    m.theta_ = theta;
    m.validate();
    return m;
}

ScheduleModel ScheduleModel::tabulated(Side side, std::vector<std::pair<double, double>> table,
                                       double theta) {
    ScheduleModel m;
    m.side_ = side;
    m.family_ = Family::tabulated;
    m.table_ = std::move(table);
    m.theta_ = theta;
    if (m.table_.size() < 2) throw DomainError("schedule: table needs at least two points");
    m.a_ = 1.0;
    m.r_b_ = m.table_.back().first;
    m.validate();
    return m;
}

void ScheduleModel::validate() const {
    if (!finite_positive(theta_)) throw DomainError("schedule: shock must be positive");
    if (family_ != Family::tabulated) {
        if (!finite_positive(a_)) throw DomainError("schedule: scale a must be positive");
        if (!finite_positive(r_b_)) throw DomainError("schedule: rate bound must be positive");
        return;
    }

    // Tabulated curves are validated structurally: rates span [0, r_b],
    // volumes move strictly in the declared direction, segment slopes are
    // non-increasing (concavity), and the zero endpoint is exact.
    if (table_.front().first != 0.0)
        throw DomainError("schedule: table must start at rate 0");
    if (!finite_positive(r_b_)) throw DomainError("schedule: table must end at a positive rate");
    for (size_t i = 0; i + 1 < table_.size(); ++i) {
        if (!(table_[i + 1].first > table_[i].first))
            throw DomainError("schedule: table rates must be strictly increasing");
    }
    const bool rising = (side_ == Side::demand);
    if (rising && table_.front().second != 0.0)
        throw DomainError("schedule: demand table must quote zero volume at rate 0");
    if (!rising && table_.back().second != 0.0)
        throw DomainError("schedule: supply table must quote zero volume at the rate bound");
    double prev_slope = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < table_.size(); ++i) {
        double dv = table_[i + 1].second - table_[i].second;
        double dr = table_[i + 1].first - table_[i].first;
        if (rising ? !(dv > 0.0) : !(dv < 0.0))
            throw DomainError("schedule: table volumes must be strictly monotone");
        double s = dv / dr;
        if (s > prev_slope + 1e-12)
            throw DomainError("schedule: table is not concave");
        prev_slope = s;
    }
    for (const auto& [r, v] : table_) {
        if (!std::isfinite(r) || !std::isfinite(v) || v < 0.0)
            throw DomainError("schedule: table entries must be finite and non-negative");
    }
}

double ScheduleModel::eval(double rate) const {
    if (!(rate >= 0.0 && rate <= r_b_))
        throw DomainError("schedule: rate outside [0, r_b]");
    switch (family_) {
        case Family::sqrt_curve:
            return side_ == Side::demand ? theta_ * a_ * std::sqrt(rate)
                                         : theta_ * a_ * std::sqrt(r_b_ - rate);
        case Family::quadratic_cap:
            return side_ == Side::demand ? theta_ * a_ * quad_ramp(rate, r_b_)
                                         : theta_ * a_ * quad_ramp(r_b_ - rate, r_b_);
        case Family::tabulated: {
            auto it = std::upper_bound(table_.begin(), table_.end(), rate,
                                       [](double r, const auto& p) { return r < p.first; });
            size_t hi = std::min<size_t>(table_.size() - 1,
                                         static_cast<size_t>(it - table_.begin()));
            if (hi == 0) hi = 1;
            size_t lo = hi - 1;
            double w = (rate - table_[lo].first) / (table_[hi].first - table_[lo].first);
            return theta_ * (table_[lo].second + w * (table_[hi].second - table_[lo].second));
        }
    }
    return 0.0;
}

double ScheduleModel::slope(double rate) const {
    if (!(rate >= 0.0 && rate <= r_b_))
        throw DomainError("schedule: rate outside [0, r_b]");
    switch (family_) {
        case Family::sqrt_curve:
            // One-sided infinities at the flat-volume endpoint are intended:
            // callers bracket with them rather than differentiate numerically.
            return side_ == Side::demand
                       ? theta_ * a_ / (2.0 * std::sqrt(rate))
                       : -theta_ * a_ / (2.0 * std::sqrt(r_b_ - rate));
        case Family::quadratic_cap:
            return side_ == Side::demand
                       ? theta_ * a_ * quad_ramp_slope(rate, r_b_)
                       : -theta_ * a_ * quad_ramp_slope(r_b_ - rate, r_b_);
        case Family::tabulated: {
            size_t seg = table_.size() - 2;
            for (size_t i = 0; i + 1 < table_.size(); ++i) {
                if (rate < table_[i + 1].first) {
                    seg = i;
                    break;
                }
            }
            double dv = table_[seg + 1].second - table_[seg].second;
            double dr = table_[seg + 1].first - table_[seg].first;
            return theta_ * dv / dr;
        }
    }
    return 0.0;
}

double ScheduleModel::max_volume() const {
    return side_ == Side::demand ? eval(r_b_) : eval(0.0);
}

double ScheduleModel::inverse(double volume) const {
    double vmax = max_volume();
    if (!(volume >= 0.0) || volume > vmax * (1.0 + 1e-12) + 1e-15)
        throw InfeasibleVolumeError("schedule: volume outside attainable range");
    volume = std::min(volume, vmax);
    double y = volume / theta_;
    switch (family_) {
        case Family::sqrt_curve: {
            double r = (y / a_) * (y / a_);
            return side_ == Side::demand ? std::min(r, r_b_) : std::max(0.0, r_b_ - r);
        }
        case Family::quadratic_cap: {
            double x = quad_ramp_inverse(y / a_, r_b_);
            return side_ == Side::demand ? std::min(x, r_b_) : std::max(0.0, r_b_ - x);
        }
        case Family::tabulated: {
            const bool rising = (side_ == Side::demand);
            for (size_t i = 0; i + 1 < table_.size(); ++i) {
                double v0 = theta_ * table_[i].second;
                double v1 = theta_ * table_[i + 1].second;
                bool in = rising ? (volume >= v0 && volume <= v1)
                                 : (volume <= v0 && volume >= v1);
                if (!in) continue;
                double w = (v1 == v0) ? 0.0 : (volume - v0) / (v1 - v0);
                return table_[i].first + w * (table_[i + 1].first - table_[i].first);
            }
            return rising ? r_b_ : 0.0;  // volume == vmax up to rounding
        }
    }
    return 0.0;
}

ScheduleModel ScheduleModel::with_shock(double theta) const {
    ScheduleModel m = *this;
    m.theta_ = theta;
    m.validate();
    return m;
}

Crossing crossing(const ScheduleModel& demand, const ScheduleModel& supply) {
    if (demand.side() != Side::demand || supply.side() != Side::supply)
        throw DomainError("crossing: pass (demand, supply) in that order");
    if (demand.rate_bound() != supply.rate_bound())
        throw DomainError("crossing: schedules disagree on the rate bound");
    double r_b = demand.rate_bound();
    double r = bisect([&](double x) { return demand.eval(x) - supply.eval(x); }, 0.0, r_b);
    return Crossing{r, 0.5 * (demand.eval(r) + supply.eval(r))};
}

double balanced_counterpart(const ScheduleModel& demand, const ScheduleModel& supply,
                            double r_mm) {
    return supply.inverse(demand.eval(r_mm));
}

DiscretizedBook discretize(const ScheduleModel& demand, const ScheduleModel& supply,
                           int levels) {
    if (levels < 2) throw DomainError("discretize: need at least two levels");
    Crossing x = crossing(demand, supply);
    DiscretizedBook book;
    book.volume.reserve(levels);
    for (int i = 0; i < levels; ++i) {
        double t = x.volume * static_cast<double>(i) / static_cast<double>(levels - 1);
        book.volume.push_back(t);
        book.mm_rate.push_back(demand.inverse(t));
        book.rm_rate.push_back(supply.inverse(t));
    }
    return book;
}

}  // namespace repomech
