#pragma once

// BBO dispersion: Sellmeier index for ordinary and extraordinary branches,
// angle-dependent extraordinary index on the index ellipse, and the analytic
// group index.

#include <cmath>
#include <stdexcept>
#include <string>

namespace spdc {

struct SellmeierSet {
    // n^2(lambda) = b1 + b2/(lambda^2 - b3) - c1*lambda^2, lambda in um
    double b1, b2, b3, c1;
};

inline constexpr SellmeierSet bbo_ordinary{2.7359, 0.01878, 0.01822, 0.01354};
inline constexpr SellmeierSet bbo_extraordinary{2.3753, 0.01224, 0.01667, 0.01516};

inline constexpr double lambda_min_um = 0.35;
inline constexpr double lambda_max_um = 0.80;

enum class Branch { ordinary, extraordinary };

namespace detail {

inline void check_lambda(double lambda_um) {
    if (!(lambda_um >= lambda_min_um && lambda_um <= lambda_max_um))
        throw std::domain_error("wavelength " + std::to_string(lambda_um) +
                                " um outside valid interval [0.35, 0.80] um");
}

inline void check_theta(double theta_rad) {
    if (!(theta_rad >= 0.0 && theta_rad <= 1.5707963267948967))
        throw std::domain_error("optic-axis angle outside [0, pi/2]");
}

inline double n_squared(const SellmeierSet& s, double lambda_um) {
    double l2 = lambda_um * lambda_um;
    return s.b1 + s.b2 / (l2 - s.b3) - s.c1 * l2;
}

// d(n^2)/dlambda
inline double n_squared_prime(const SellmeierSet& s, double lambda_um) {
    double l2 = lambda_um * lambda_um;
    double d = l2 - s.b3;
    return -2.0 * lambda_um * (s.b2 / (d * d) + s.c1);
}

}  // namespace detail

// Dispersion model with overridable Sellmeier coefficients; default is BBO.
struct BboModel {
    SellmeierSet ord = bbo_ordinary;
    SellmeierSet ext = bbo_extraordinary;

    double index_ordinary(double lambda_um) const {
        detail::check_lambda(lambda_um);
        return std::sqrt(detail::n_squared(ord, lambda_um));
    }

    // principal extraordinary index (propagation perpendicular to optic axis)
    double index_extraordinary_principal(double lambda_um) const {
        detail::check_lambda(lambda_um);
        return std::sqrt(detail::n_squared(ext, lambda_um));
    }

    // index ellipse: 1/n^2(theta) = cos^2/n_o^2 + sin^2/n_e^2
    double index_extraordinary(double lambda_um, double theta_rad) const {
        detail::check_lambda(lambda_um);
        detail::check_theta(theta_rad);
        double co = std::cos(theta_rad), si = std::sin(theta_rad);
        double inv = co * co / detail::n_squared(ord, lambda_um) +
                     si * si / detail::n_squared(ext, lambda_um);
        return 1.0 / std::sqrt(inv);
    }

    // n_g = n - lambda dn/dlambda, closed form, theta held fixed
    double group_index(Branch branch, double lambda_um, double theta_rad = 0.0) const {
        detail::check_lambda(lambda_um);
        if (branch == Branch::ordinary) {
            double n2 = detail::n_squared(ord, lambda_um);
            double n = std::sqrt(n2);
            double dn = detail::n_squared_prime(ord, lambda_um) / (2.0 * n);
            return n - lambda_um * dn;
        }
        detail::check_theta(theta_rad);
        double co = std::cos(theta_rad), si = std::sin(theta_rad);
        double n2o = detail::n_squared(ord, lambda_um);
        double n2e = detail::n_squared(ext, lambda_um);
        double f = co * co / n2o + si * si / n2e;  // = 1/n^2
        double fp = -co * co * detail::n_squared_prime(ord, lambda_um) / (n2o * n2o) -
                    si * si * detail::n_squared_prime(ext, lambda_um) / (n2e * n2e);
        double n = 1.0 / std::sqrt(f);
        double dn = -0.5 * n * n * n * fp;
        return n - lambda_um * dn;
    }
};

}  // namespace spdc
