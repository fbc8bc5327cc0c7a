#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

namespace spdc {

// Bisection to near machine precision on a bracketing interval, then a few
// secant steps to polish. Derivative-free and deterministic; throws if the
// bracket does not straddle a sign change.
template <class F>
double bisect_root(F&& f, double lo, double hi, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::runtime_error("bisect_root: no sign change in bracket");
    for (int i = 0; i < max_iter; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;  // interval collapsed to adjacent doubles
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    // secant polish inside the final bracket
    double a = lo, b = hi, fa = flo, fb = fhi;
    for (int i = 0; i < 3; ++i) {
        double denom = fb - fa;
        if (denom == 0.0) break;
        double x = b - fb * (b - a) / denom;
        if (!(x >= lo && x <= hi)) break;
        double fx = f(x);
        a = b; fa = fb;
        b = x; fb = fx;
        if (fx == 0.0) break;
    }
    return std::abs(fa) < std::abs(fb) ? a : b;
}

// Golden-section maximization of a unimodal function; returns (argmax, max).
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double xtol = 1e-13,
                                     int max_iter = 300) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

// Coarse grid scan followed by golden refinement; for functions that are
// unimodal only near the global maximum.
template <class F>
std::pair<double, double> scan_then_golden_max(F&& f, double lo, double hi, int n_scan = 257,
                                               double xtol = 1e-13) {
    double h = (hi - lo) / (n_scan - 1);
    int best = 0;
    double fbest = f(lo);
    for (int i = 1; i < n_scan; ++i) {
        double fi = f(lo + i * h);
        if (fi > fbest) {
            fbest = fi;
            best = i;
        }
    }
    double a = lo + (best > 0 ? (best - 1) * h : 0.0);
    double b = lo + (best < n_scan - 1 ? (best + 1) * h : (n_scan - 1) * h);
    return golden_max(f, a, b, xtol);
}

}  // namespace spdc
