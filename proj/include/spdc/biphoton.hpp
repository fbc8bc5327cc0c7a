#pragma once

// CW biphoton spectrum, Hong-Ou-Mandel delay scan with flat or gaussian
// filters, gaussian dip-shape fit, and the pulsed-pump visibility estimate.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "spdc/constants.hpp"
#include "spdc/phasematch.hpp"

namespace spdc {

using cdouble = std::complex<double>;

inline double sinc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;  // removable singularity
    return std::sin(x) / x;
}

enum class FilterShape { flat, gaussian };

struct SpectralFilter {
    double center_um = 0.7022;
    double fwhm_nm = 3.0;  // intensity FWHM
    FilterShape shape = FilterShape::gaussian;

    void validate() const {
        if (!(fwhm_nm > 0.0)) throw std::invalid_argument("filter fwhm must be positive");
        if (!(center_um > 0.0)) throw std::invalid_argument("filter center must be positive");
    }

    // intensity FWHM converted to angular frequency, rad/ps
    double fwhm_omega() const {
        return 2.0 * pi * c_um_per_ps * (fwhm_nm * 1e-3) / (center_um * center_um);
    }

    // amplitude transmission at detuning from the degenerate frequency
    double amplitude(double omega, double lambda_deg_um) const {
        double omega_c = omega_of_lambda(center_um) - omega_of_lambda(lambda_deg_um);
        double d = omega - omega_c;
        double w = fwhm_omega();
        if (shape == FilterShape::flat) return std::abs(d) <= 0.5 * w ? 1.0 : 0.0;
        double sigma_a = w / (2.0 * std::sqrt(std::log(2.0)));  // intensity FWHM -> amplitude sigma
        return std::exp(-d * d / (2.0 * sigma_a * sigma_a));
    }
};

struct GridSpec {
    double omega_max;  // rad/ps, grid spans [-omega_max, omega_max]
    int n;             // odd sample count
};

// Span and resolution policy: cover min(4096 sinc half-lobes, filter
// support), resolve the sinc main lobe with >= 64 samples and any gaussian
// passband with >= 16 samples per sigma. Wide flat filters therefore reuse
// the unfiltered span; narrow filters shrink it.
inline GridSpec make_grid(const WalkoffResult& w, const std::optional<SpectralFilter>& f1,
                          const std::optional<SpectralFilter>& f2, double lambda_deg_um = 0.7022,
                          double tau_absmax_ps = 0.0) {
    if (!(w.DL_ps > 0.0)) throw std::invalid_argument("make_grid: DL must be positive");
    double span = 4096.0 * 2.0 * pi / w.DL_ps;
    double h = 4.0 * pi / w.DL_ps / 64.0;
    double inv_sig2 = 0.0;
    for (const auto& f : {f1, f2}) {
        if (!f) continue;
        f->validate();
        double width = f->fwhm_omega();
        double omega_c = omega_of_lambda(f->center_um) - omega_of_lambda(lambda_deg_um);
        if (f->shape == FilterShape::flat) {
            span = std::min(span, std::abs(omega_c) + 0.5 * width);
            h = std::min(h, width / 256.0);
        } else {
            double sigma_a = width / (2.0 * std::sqrt(std::log(2.0)));
            inv_sig2 += 1.0 / (sigma_a * sigma_a);
        }
    }
    if (inv_sig2 > 0.0) {
        double sigma_c = 1.0 / std::sqrt(inv_sig2);
        span = std::min(span, 13.0 * sigma_c);
        h = std::min(h, sigma_c / 16.0);
    }
    if (tau_absmax_ps > 0.0) h = std::min(h, pi / (4.0 * tau_absmax_ps));
    int n = 4097;
    while (n - 1 < 2.0 * span / h && n < (1 << 20) + 1) n = 2 * (n - 1) + 1;
    return GridSpec{span, n};
}

struct JointSpectralAmplitude {
    std::vector<double> omega;  // symmetric detuning grid, rad/ps
    std::vector<cdouble> amp;   // normalized so sum |amp|^2 * domega = 1
    double DL_ps;
    double lambda_deg_um;

    double step() const { return omega[1] - omega[0]; }
};

// phi(Omega) = sinc(Omega DL/2) exp(-i Omega DL/2), normalized on the grid
inline JointSpectralAmplitude jsa_cw(const WalkoffResult& w, double lambda_deg_um = 0.7022,
                                     std::optional<GridSpec> grid = std::nullopt) {
    if (!(w.DL_ps > 0.0)) throw std::invalid_argument("jsa_cw: DL must be positive");
    GridSpec g = grid ? *grid : make_grid(w, std::nullopt, std::nullopt, lambda_deg_um);
    if (g.n < 3 || g.n % 2 == 0) throw std::invalid_argument("jsa_cw: grid size must be odd >= 3");
    int m = (g.n - 1) / 2;
    double h = g.omega_max / m;
    double lobe_samples = std::min(4.0 * pi / w.DL_ps, 2.0 * g.omega_max) / h;
    if (lobe_samples < 64.0 - 1e-9)
        throw std::invalid_argument("jsa_cw: sinc main lobe needs >= 64 samples");

    JointSpectralAmplitude jsa;
    jsa.DL_ps = w.DL_ps;
    jsa.lambda_deg_um = lambda_deg_um;
    jsa.omega.resize(g.n);
    jsa.amp.resize(g.n);
    double norm2 = 0.0;
    for (int k = 0; k < g.n; ++k) {
        double om = (k - m) * h;  // exactly antisymmetric sampling
        double x = 0.5 * om * w.DL_ps;
        cdouble a = sinc(x) * std::polar(1.0, -x);
        jsa.omega[k] = om;
        jsa.amp[k] = a;
        norm2 += std::norm(a);
    }
    double scale = 1.0 / std::sqrt(norm2 * h);
    for (auto& a : jsa.amp) a *= scale;
    return jsa;
}

struct DelayScan {
    std::vector<double> tau_ps;
    std::vector<double> rate;  // normalized coincidence rate, baseline 1
};

namespace detail {

struct HomKernel {
    std::vector<cdouble> pair;  // trapezoid-weighted A(Omega) conj(A(-Omega))
    std::vector<double> omega;
    double base;  // trapezoid integral of |A(Omega)|^2 + |A(-Omega)|^2

    HomKernel(const JointSpectralAmplitude& jsa, const std::optional<SpectralFilter>& f1,
              const std::optional<SpectralFilter>& f2) {
        int n = static_cast<int>(jsa.omega.size());
        std::vector<cdouble> A(n);
        for (int k = 0; k < n; ++k) {
            double t = 1.0;
            if (f1) t *= f1->amplitude(jsa.omega[k], jsa.lambda_deg_um);
            if (f2) t *= f2->amplitude(-jsa.omega[k], jsa.lambda_deg_um);
            A[k] = jsa.amp[k] * t;
        }
        double h = jsa.step();
        omega = jsa.omega;
        pair.resize(n);
        base = 0.0;
        for (int k = 0; k < n; ++k) {
            double wgt = (k == 0 || k == n - 1) ? 0.5 * h : h;
            cdouble am = A[n - 1 - k];  // A(-Omega)
            pair[k] = wgt * A[k] * std::conj(am);
            base += wgt * (std::norm(A[k]) + std::norm(am));
        }
        if (!(base > 0.0)) throw std::runtime_error("hom_scan: empty passband");
    }

    // integral of Re(A(O) conj(A(-O)) e^{-2iO tau}) via phasor recurrence
    double cross(double tau) const {
        int n = static_cast<int>(omega.size());
        double h = omega[1] - omega[0];
        cdouble rot = std::polar(1.0, -2.0 * h * tau);
        cdouble ph = std::polar(1.0, -2.0 * omega[0] * tau);
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
            if ((k & 8191) == 0) ph = std::polar(1.0, -2.0 * omega[k] * tau);  // drift control
            acc += pair[k].real() * ph.real() - pair[k].imag() * ph.imag();
            ph *= rot;
        }
        return acc;
    }
};

}  // namespace detail

// R(tau) = 1 - 2/base * Int Re(A(O) conj(A(-O)) e^{-2iO tau}) dO.
// With the spectral phase of jsa_cw this puts the minimum exactly at
// tau = -DL/2, where the cross integrand equals the baseline integrand.
inline DelayScan hom_scan(const JointSpectralAmplitude& jsa, const std::optional<SpectralFilter>& f1,
                          const std::optional<SpectralFilter>& f2,
                          const std::vector<double>& tau_grid) {
    detail::HomKernel ker(jsa, f1, f2);
    DelayScan scan;
    scan.tau_ps = tau_grid;
    scan.rate.reserve(tau_grid.size());
    for (double tau : tau_grid) scan.rate.push_back(1.0 - 2.0 * ker.cross(tau) / ker.base);
    return scan;
}

// packet indistinguishability at delay tau, in [0,1]; equals 1 at tau=-DL/2
inline double packet_overlap(const JointSpectralAmplitude& jsa,
                             const std::optional<SpectralFilter>& f1,
                             const std::optional<SpectralFilter>& f2, double tau) {
    detail::HomKernel ker(jsa, f1, f2);
    int n = static_cast<int>(ker.omega.size());
    cdouble acc = 0.0;
    for (int k = 0; k < n; ++k)
        acc += ker.pair[k] * std::polar(1.0, -2.0 * ker.omega[k] * tau);
    return std::min(1.0, std::abs(acc) / (0.5 * ker.base));
}

// unfiltered dip: R = 1 - max(0, 1 - |tau + DL/2| / (DL/2))
inline double triangle_closed_form(double tau_ps, double DL_ps) {
    if (!(DL_ps > 0.0)) throw std::invalid_argument("triangle_closed_form: DL must be positive");
    return 1.0 - std::max(0.0, 1.0 - std::abs(tau_ps + 0.5 * DL_ps) / (0.5 * DL_ps));
}

struct GaussianFitReport {
    double visibility;  // fitted v in 1 - v exp(-(tau-tau0)^2 / 2 s^2)
    double tau0_ps;
    double sigma_ps;
    double rms;
};

// Levenberg-Marquardt fit of the dip to a gaussian; errors on flat scans.
inline GaussianFitReport gaussian_filter_shape_check(const DelayScan& scan) {
    int n = static_cast<int>(scan.tau_ps.size());
    if (n < 5) throw std::invalid_argument("gaussian fit needs at least 5 samples");
    int imin = 0;
    for (int i = 1; i < n; ++i)
        if (scan.rate[i] < scan.rate[imin]) imin = i;
    double v = 1.0 - scan.rate[imin];
    if (v < 1e-6) throw std::runtime_error("gaussian fit: scan is flat");
    double tau0 = scan.tau_ps[imin];
    // half-depth width estimate for the initial sigma
    double half = 1.0 - 0.5 * v;
    double wl = scan.tau_ps.front(), wr = scan.tau_ps.back();
    for (int i = imin; i >= 0; --i)
        if (scan.rate[i] > half) { wl = scan.tau_ps[i]; break; }
    for (int i = imin; i < n; ++i)
        if (scan.rate[i] > half) { wr = scan.tau_ps[i]; break; }
    double s = std::max((wr - wl) / (2.0 * std::sqrt(2.0 * std::log(2.0))), 1e-6);

    Eigen::Vector3d p(v, tau0, s);
    auto sse = [&](const Eigen::Vector3d& q) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            double d = scan.tau_ps[i] - q[1];
            double r = scan.rate[i] - (1.0 - q[0] * std::exp(-d * d / (2.0 * q[2] * q[2])));
            acc += r * r;
        }
        return acc;
    };
    double lambda = 1e-3;
    double cur = sse(p);
    for (int iter = 0; iter < 200; ++iter) {
        Eigen::Matrix3d JtJ = Eigen::Matrix3d::Zero();
        Eigen::Vector3d Jtr = Eigen::Vector3d::Zero();
        for (int i = 0; i < n; ++i) {
            double d = scan.tau_ps[i] - p[1];
            double g = std::exp(-d * d / (2.0 * p[2] * p[2]));
            double model = 1.0 - p[0] * g;
            double r = scan.rate[i] - model;
            Eigen::Vector3d J(-g, -p[0] * g * d / (p[2] * p[2]),
                              -p[0] * g * d * d / (p[2] * p[2] * p[2]));
            JtJ += J * J.transpose();
            Jtr += J * r;
        }
        Eigen::Matrix3d M = JtJ + lambda * Eigen::Matrix3d(JtJ.diagonal().asDiagonal());
        Eigen::Vector3d step = M.ldlt().solve(Jtr);
        Eigen::Vector3d trial = p + step;
        if (!(trial[2] > 0.0)) trial[2] = 0.5 * p[2];
        double trial_sse = sse(trial);
        if (trial_sse < cur) {
            double gain = cur - trial_sse;
            p = trial;
            cur = trial_sse;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (gain < 1e-18 * (1.0 + cur)) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    return GaussianFitReport{p[0], p[1], std::abs(p[2]), std::sqrt(cur / n)};
}

namespace detail {

// one evaluation of the two-dimensional pulsed model on an N x N grid
inline double pulsed_visibility_once(double sigma_pump, const WalkoffResult& w, int N) {
    double L = w.DL_ps / w.D_ps_per_mm;  // crystal length, mm
    double de = w.delta_e_ps_per_mm * L, do_ = w.delta_o_ps_per_mm * L;  // ps
    double DL = w.DL_ps;
    double span = 12.0 * pi / DL + 8.0 * sigma_pump;
    double h = 2.0 * span / (N - 1);
    std::vector<cdouble> phi(static_cast<size_t>(N) * N);
    double denom = 0.0;
    for (int i = 0; i < N; ++i) {
        double os = -span + i * h;
        for (int j = 0; j < N; ++j) {
            double oi = -span + j * h;
            double kl = de * os + do_ * oi;  // kappa L, rad
            double a = std::exp(-(os + oi) * (os + oi) / (4.0 * sigma_pump * sigma_pump));
            cdouble v = a * sinc(0.5 * kl) * std::polar(1.0, 0.5 * kl);
            phi[static_cast<size_t>(i) * N + j] = v;
            denom += std::norm(v);
        }
    }
    if (!(denom > 0.0)) throw std::runtime_error("pulsed_visibility: empty amplitude");
    // collapse Phi(s,i) conj(Phi(i,s)) over anti-diagonals u = Omega_s - Omega_i
    std::vector<cdouble> su(2 * N - 1, cdouble{0.0, 0.0});
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            su[i - j + N - 1] +=
                phi[static_cast<size_t>(i) * N + j] * std::conj(phi[static_cast<size_t>(j) * N + i]);
    auto mag = [&](double tau) {
        cdouble rot = std::polar(1.0, h * tau);
        cdouble ph = std::polar(1.0, -(N - 1.0) * h * tau);
        cdouble acc = 0.0;
        for (int k = 0; k < 2 * N - 1; ++k) {
            acc += su[k] * ph;
            ph *= rot;
        }
        return std::abs(acc);
    };
    auto [tau_best, best] = scan_then_golden_max(mag, -3.0 * DL, 3.0 * DL, 1201, 1e-10);
    (void)tau_best;
    return best / denom;
}

}  // namespace detail

// V = max_tau |Int Phi(Os,Oi) conj(Phi(Oi,Os)) e^{i(Os-Oi)tau}| / Int |Phi|^2
// for a gaussian pump envelope of bandwidth sigma_pump. Errors if the value
// has not settled to 1e-3 under grid doubling.
inline double pulsed_visibility(double sigma_pump, const WalkoffResult& w, int base_grid = 384) {
    if (sigma_pump < 0.0) throw std::invalid_argument("pulsed_visibility: negative bandwidth");
    if (sigma_pump == 0.0) return 1.0;  // CW limit: delay compensates the exchange phase
    double v1 = detail::pulsed_visibility_once(sigma_pump, w, base_grid);
    double v2 = detail::pulsed_visibility_once(sigma_pump, w, 2 * base_grid);
    if (std::abs(v2 - v1) > 1e-3)
        throw std::runtime_error("pulsed_visibility: grid not converged");
    return v2;
}

}  // namespace spdc
