#pragma once

#include <cmath>
#include <utility>

#include "repomech/errors.hpp"

namespace repomech {

// Bisection root of f on [lo, hi]. Requires opposite signs at the ends;
// IEEE infinities at singular endpoints are acceptable, NaN is not.
template <class F>
double bisect(F&& f, double lo, double hi, double tol = 1e-10, int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::isnan(flo) || std::isnan(fhi) || std::signbit(flo) == std::signbit(fhi))
        throw DomainError("bisect: no sign change over bracket");
    for (int i = 0; i < max_iter && (hi - lo) > tol; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Golden-section maximizer of a unimodal f on [lo, hi].
// Returns the abscissa; callers re-evaluate f if they need the value.
template <class F>
double golden_max(F&& f, double lo, double hi, double tol = 1e-10, int max_iter = 500) {
    constexpr double invphi = 0.6180339887498949;  // 1/phi
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace repomech
