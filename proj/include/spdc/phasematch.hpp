#pragma once

// Type-II (e -> e + o) phase matching in the optic-axis principal plane:
// collinear degenerate angle, emission-angle solutions per wavelength,
// beamlike tangency angle, and the group-delay walkoff parameter.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spdc/constants.hpp"
#include "spdc/dispersion.hpp"
#include "spdc/rootfind.hpp"

namespace spdc {

struct CrystalConfig {
    double lambda_p_um = 0.3511;   // pump wavelength
    double theta_p_rad = deg_to_rad(48.3);  // internal pump angle to optic axis
    double length_mm = 1.0;

    void validate() const {
        if (!(lambda_p_um >= 0.35 && lambda_p_um <= 0.40))
            throw std::invalid_argument("pump wavelength outside [0.35, 0.40] um");
        if (!(theta_p_rad > 0.0 && theta_p_rad < pi / 2))
            throw std::invalid_argument("theta_p outside (0, pi/2)");
        if (!(length_mm > 0.0))
            throw std::invalid_argument("crystal length must be positive");
    }
};

struct TuningPoint {
    double lambda_signal_um;  // e-ray wavelength
    double lambda_idler_um;   // o-ray wavelength (energy conjugate)
    double alpha_e_int_rad;   // signed, from pump direction, in the optic-axis plane
    double alpha_o_int_rad;
    double alpha_e_ext_rad;   // after crystal-to-air Snell refraction
    double alpha_o_ext_rad;
};

struct TuningSample {
    double lambda_signal_um;
    std::optional<TuningPoint> point;  // absent: no real solution at this wavelength
    bool solver_failed = false;
};

struct WalkoffResult {
    double D_ps_per_mm;   // group-delay mismatch o vs e per unit length
    double DL_ps;         // D * L
    double cdl_um;        // equivalent path length c * DL
    double delta_e_ps_per_mm;  // e-branch group delay against the pump
    double delta_o_ps_per_mm;
};

namespace detail {

inline double conjugate_wavelength(double lambda_p, double lambda_s) {
    return 1.0 / (1.0 / lambda_p - 1.0 / lambda_s);
}

// Longitudinal wavevector mismatch along the pump at e-ray emission angle
// alpha, with the transverse balance already imposed. Returns a large
// negative value where the transverse equation has no real o-ray angle.
struct PairResidual {
    const BboModel& model;
    double lambda_e, lambda_o, theta_p, k_p, k_o;

    PairResidual(const BboModel& m, const CrystalConfig& cfg, double lambda_e_um)
        : model(m), lambda_e(lambda_e_um) {
        lambda_o = conjugate_wavelength(cfg.lambda_p_um, lambda_e_um);
        detail::check_lambda(lambda_o);
        theta_p = cfg.theta_p_rad;
        k_p = 2.0 * pi * model.index_extraordinary(cfg.lambda_p_um, theta_p) / cfg.lambda_p_um;
        k_o = 2.0 * pi * model.index_ordinary(lambda_o) / lambda_o;
    }

    double k_e(double alpha_e) const {
        // e-ray index taken at that ray's own angle to the optic axis
        return 2.0 * pi * model.index_extraordinary(lambda_e, theta_p - alpha_e) / lambda_e;
    }

    double operator()(double alpha_e) const {
        double ke = k_e(alpha_e);
        double st = -ke * std::sin(alpha_e) / k_o;  // transverse balance
        if (std::abs(st) >= 1.0) return -1e3 * k_p;
        return ke * std::cos(alpha_e) + k_o * std::sqrt(1.0 - st * st) - k_p;
    }
};

inline TuningPoint make_point(const PairResidual& res, double alpha_e) {
    double ke = res.k_e(alpha_e);
    double alpha_o = std::asin(-ke * std::sin(alpha_e) / res.k_o);
    double n_e = ke * res.lambda_e / (2.0 * pi);
    double n_o = res.k_o * res.lambda_o / (2.0 * pi);
    return TuningPoint{
        res.lambda_e,
        res.lambda_o,
        alpha_e,
        alpha_o,
        std::asin(n_e * std::sin(alpha_e)),
        std::asin(n_o * std::sin(alpha_o)),
    };
}

}  // namespace detail

// All emission-angle solutions for an e-ray at lambda_e_um: zero (curve does
// not reach this wavelength), one (tangency) or two (curve crossed twice).
inline std::vector<TuningPoint> solve_pair_all(const BboModel& model, const CrystalConfig& cfg,
                                               double lambda_e_um) {
    cfg.validate();
    detail::check_lambda(lambda_e_um);
    detail::PairResidual F(model, cfg, lambda_e_um);

    double lo = std::max(-0.35, cfg.theta_p_rad - pi / 2);
    double hi = std::min(0.35, cfg.theta_p_rad);
    auto [alpha_max, f_max] = scan_then_golden_max(F, lo, hi, 257);
    double tol = 1e-12 * F.k_p;

    std::vector<TuningPoint> out;
    if (f_max < -tol) return out;
    if (f_max <= tol) {  // vertex touches zero: double root
        out.push_back(detail::make_point(F, alpha_max));
        return out;
    }
    if (F(lo) < 0.0) out.push_back(detail::make_point(F, bisect_root(F, lo, alpha_max)));
    if (F(hi) < 0.0) out.push_back(detail::make_point(F, bisect_root(F, alpha_max, hi)));
    return out;
}

// Primary branch point: the root closer to the pump axis.
inline std::optional<TuningPoint> solve_pair(const BboModel& model, const CrystalConfig& cfg,
                                             double lambda_e_um) {
    auto roots = solve_pair_all(model, cfg, lambda_e_um);
    if (roots.empty()) return std::nullopt;
    if (roots.size() == 1) return roots.front();
    return std::abs(roots[0].alpha_e_int_rad) <= std::abs(roots[1].alpha_e_int_rad) ? roots[0]
                                                                                    : roots[1];
}

inline std::vector<TuningSample> tuning_curve(const BboModel& model, const CrystalConfig& cfg,
                                              double lambda_lo_um, double lambda_hi_um,
                                              int n_points) {
    cfg.validate();
    if (n_points < 2) throw std::invalid_argument("tuning_curve needs at least 2 points");
    if (!(lambda_lo_um < lambda_hi_um))
        throw std::invalid_argument("tuning_curve wavelength range is empty");
    detail::check_lambda(lambda_lo_um);
    detail::check_lambda(lambda_hi_um);

    std::vector<TuningSample> out;
    out.reserve(n_points);
    for (int i = 0; i < n_points; ++i) {
        double lam = lambda_lo_um + (lambda_hi_um - lambda_lo_um) * i / (n_points - 1);
        TuningSample s{lam, std::nullopt, false};
        try {
            s.point = solve_pair(model, cfg, lam);
        } catch (const std::runtime_error&) {
            s.solver_failed = true;  // flagged, never dropped
        }
        out.push_back(s);
    }
    return out;
}

// Collinear degenerate phase-matching angle: root of
// k_p(theta) - k_e(theta) - k_o = 0 at lambda_deg = 2 lambda_p.
inline double collinear_degenerate_angle(const BboModel& model, double lambda_p_um) {
    detail::check_lambda(lambda_p_um);
    double lambda_d = 2.0 * lambda_p_um;
    detail::check_lambda(lambda_d);
    auto dk = [&](double theta) {
        return 2.0 * pi * (model.index_extraordinary(lambda_p_um, theta) / lambda_p_um -
                           model.index_extraordinary(lambda_d, theta) / lambda_d -
                           model.index_ordinary(lambda_d) / lambda_d);
    };
    double lo = deg_to_rad(30.0), hi = deg_to_rad(70.0);
    if ((dk(lo) > 0.0) == (dk(hi) > 0.0))
        throw std::runtime_error("no phase-matching solution in [30 deg, 70 deg]");
    return bisect_root(dk, lo, hi);
}

// Pump angle at which the tuning curve is tangent to lambda_deg: the
// wavelength extremum sits exactly there, i.e. the longitudinal residual's
// maximum over emission angle crosses zero.
inline double beamlike_angle(const BboModel& model, double lambda_p_um, double lambda_deg_um) {
    detail::check_lambda(lambda_p_um);
    detail::check_lambda(lambda_deg_um);
    auto h = [&](double theta) {
        CrystalConfig c{lambda_p_um, theta, 1.0};
        detail::PairResidual F(model, c, lambda_deg_um);
        double lo = std::max(-0.35, theta - pi / 2);
        double hi = std::min(0.35, theta);
        return scan_then_golden_max(F, lo, hi, 257).second;
    };
    double lo = deg_to_rad(40.0), hi = deg_to_rad(55.0);
    if ((h(lo) > 0.0) == (h(hi) > 0.0))
        throw std::runtime_error("tangency not found in [40 deg, 55 deg]");
    return bisect_root(h, lo, hi);
}

// D = n_g,o/c - n_g,e/c at the degenerate wavelength, plus the per-branch
// mismatches against the pump used by the pulsed model.
inline WalkoffResult walkoff(const BboModel& model, const CrystalConfig& cfg,
                             double lambda_deg_um) {
    cfg.validate();
    detail::check_lambda(lambda_deg_um);
    double ng_o = model.group_index(Branch::ordinary, lambda_deg_um);
    double ng_e = model.group_index(Branch::extraordinary, lambda_deg_um, cfg.theta_p_rad);
    double ng_p = model.group_index(Branch::extraordinary, cfg.lambda_p_um, cfg.theta_p_rad);
    double per_mm = 1000.0 / c_um_per_ps;
    WalkoffResult w;
    w.D_ps_per_mm = (ng_o - ng_e) * per_mm;
    w.DL_ps = w.D_ps_per_mm * cfg.length_mm;
    w.cdl_um = c_um_per_ps * w.DL_ps;
    w.delta_e_ps_per_mm = (ng_e - ng_p) * per_mm;
    w.delta_o_ps_per_mm = (ng_o - ng_p) * per_mm;
    if (!(w.D_ps_per_mm > 0.0))
        throw std::runtime_error("walkoff: expected the o-ray to be the slow ray");
    return w;
}

}  // namespace spdc
