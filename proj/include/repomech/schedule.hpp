#pragma once

#include <string>
#include <utility>
#include <vector>

#include "repomech/errors.hpp"

namespace repomech {

enum class Side { demand, supply };

// Curve families. Analytic families are parameterized by (a, r_b, theta);
// the tabulated family interpolates a client-supplied (rate, volume) table.
enum class Family { sqrt_curve, quadratic_cap, tabulated };

std::string to_string(Side s);
std::string to_string(Family f);

// One side of the client order book: volume as a function of the rate the
// dealer quotes. Demand starts at zero and rises concavely; supply falls
// concavely and dies at the rate bound r_b. A multiplicative shock theta
// scales volumes without moving rates.
class ScheduleModel {
  public:
    static ScheduleModel analytic(Side side, Family family, double a, double r_b,
                                  double theta = 1.0);
    static ScheduleModel tabulated(Side side, std::vector<std::pair<double, double>> table,
                                   double theta = 1.0);

    double eval(double rate) const;    // volume quoted at `rate`
    double slope(double rate) const;   // d volume / d rate (segment slope when tabulated)
    double inverse(double volume) const;  // rate that clears `volume`

    double max_volume() const;  // volume at the maximizing endpoint
    double rate_bound() const { return r_b_; }
    double shock() const { return theta_; }
    double scale() const { return a_; }
    Side side() const { return side_; }
    Family family() const { return family_; }

    // Same curve under a different multiplicative shock.
    ScheduleModel with_shock(double theta) const;

  private:
    ScheduleModel() = default;
    void validate() const;

    Side side_ = Side::demand;
    Family family_ = Family::sqrt_curve;
    double a_ = 1.0;
    double r_b_ = 1.0;
    double theta_ = 1.0;
    std::vector<std::pair<double, double>> table_;  // base (theta = 1) points
};

// Rate at which demand and supply quote the same volume, and that volume.
struct Crossing {
    double rate;
    double volume;
};
Crossing crossing(const ScheduleModel& demand, const ScheduleModel& supply);

// Supply rate quoting exactly the volume demand quotes at r_mm.
double balanced_counterpart(const ScheduleModel& demand, const ScheduleModel& supply,
                            double r_mm);

// Volume ladder used by the reporting protocol: `levels` evenly spaced
// volumes from 0 to the crossing volume, with the rate each side quotes.
struct DiscretizedBook {
    std::vector<double> volume;
    std::vector<double> mm_rate;  // demand-side rate per level
    std::vector<double> rm_rate;  // supply-side rate per level
};
DiscretizedBook discretize(const ScheduleModel& demand, const ScheduleModel& supply,
                           int levels);

}  // namespace repomech
