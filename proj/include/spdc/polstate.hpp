#pragma once

// Two-photon state engine over (path, polarization) modes. Amplitudes are
// kept as an ordered matrix b, row index for the photon carrying spectral
// packet 1 and column index for packet 2, plus the packet overlap scalar
// V = |<xi1|xi2>|^2 that weights every exchange cross-term. This ordered form
// is what a symmetric amplitude on the doubled (mode x packet) space reduces
// to; bosonic amplitudes are recovered by symmetrizing b.

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spdc/constants.hpp"

namespace spdc {

enum class Pol { H = 0, V = 1 };

// path labels: 1, 2 are the source beams, 3 and 4 the detector ports
inline constexpr int path_1 = 1;
inline constexpr int path_2 = 2;
inline constexpr int port_c = 3;
inline constexpr int port_d = 4;
inline constexpr int n_paths = 4;
inline constexpr int n_modes = 2 * n_paths;

inline int mode_index(int path, Pol pol) {
    if (path < 1 || path > n_paths) throw std::invalid_argument("unknown path label");
    return 2 * (path - 1) + static_cast<int>(pol);
}

using ModeMatrix = Eigen::Matrix<std::complex<double>, n_modes, n_modes>;

struct TwoPhotonState {
    ModeMatrix b = ModeMatrix::Zero();
    double overlap = 1.0;

    // ||b||_F^2 + V Re sum_mn conj(b_mn) b_nm, invariant under mode unitaries
    double norm() const {
        double direct = b.squaredNorm();
        std::complex<double> exch = b.conjugate().cwiseProduct(b.transpose()).sum();
        return direct + overlap * exch.real();
    }
};

namespace detail {

inline void check_overlap(double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("overlap outside [0, 1]");
}

inline void assert_normalized(const TwoPhotonState& s) {
    if (std::abs(s.norm() - 1.0) > 1e-12) throw std::runtime_error("state norm drifted from 1");
}

inline TwoPhotonState apply_map(const TwoPhotonState& s, const ModeMatrix& m) {
    TwoPhotonState out;
    out.overlap = s.overlap;
    out.b = m * s.b * m.transpose();
    assert_normalized(out);
    return out;
}

inline bool path_occupied(const TwoPhotonState& s, int path) {
    for (Pol p : {Pol::H, Pol::V}) {
        int k = mode_index(path, p);
        if (s.b.row(k).cwiseAbs().maxCoeff() > 1e-15) return true;
        if (s.b.col(k).cwiseAbs().maxCoeff() > 1e-15) return true;
    }
    return false;
}

}  // namespace detail

// e-ray photon in beam 1 (horizontal), o-ray photon in beam 2 (vertical)
inline TwoPhotonState source_state(double overlap = 1.0) {
    detail::check_overlap(overlap);
    TwoPhotonState s;
    s.overlap = overlap;
    s.b(mode_index(path_1, Pol::H), mode_index(path_2, Pol::V)) = 1.0;
    return s;
}

// half-wave plate with fast axis at h: H -> cos2h H + sin2h V, V -> sin2h H - cos2h V
inline TwoPhotonState apply_hwp(const TwoPhotonState& s, int path, double h_rad) {
    int ih = mode_index(path, Pol::H), iv = mode_index(path, Pol::V);
    double c = std::cos(2.0 * h_rad), si = std::sin(2.0 * h_rad);
    ModeMatrix m = ModeMatrix::Identity();
    m(ih, ih) = c;
    m(iv, ih) = si;
    m(ih, iv) = si;
    m(iv, iv) = -c;
    return detail::apply_map(s, m);
}

// 50/50 beamsplitter, a -> (c+d)/sqrt2, b -> (c-d)/sqrt2, polarization blind
inline TwoPhotonState apply_bs(const TwoPhotonState& s, int in_a, int in_b, int out_c, int out_d) {
    if (detail::path_occupied(s, out_c) || detail::path_occupied(s, out_d))
        throw std::runtime_error("apply_bs: output path already in use");
    constexpr double r = 0.7071067811865476;
    ModeMatrix m = ModeMatrix::Identity();
    for (Pol p : {Pol::H, Pol::V}) {
        int a = mode_index(in_a, p), b = mode_index(in_b, p);
        int c = mode_index(out_c, p), d = mode_index(out_d, p);
        m(a, a) = m(b, b) = m(c, c) = m(d, d) = 0.0;
        m(c, a) = r;
        m(d, a) = r;
        m(c, b) = r;
        m(d, b) = -r;
    }
    return detail::apply_map(s, m);
}

// polarizing beamsplitter: H transmits (a->c, b->d), V reflects (a->d, b->c)
inline TwoPhotonState apply_pbs(const TwoPhotonState& s, int in_a, int in_b, int out_c, int out_d) {
    if (detail::path_occupied(s, out_c) || detail::path_occupied(s, out_d))
        throw std::runtime_error("apply_pbs: output path already in use");
    ModeMatrix m = ModeMatrix::Identity();
    for (Pol p : {Pol::H, Pol::V}) {
        int a = mode_index(in_a, p), b = mode_index(in_b, p);
        int c = mode_index(out_c, p), d = mode_index(out_d, p);
        m(a, a) = m(b, b) = m(c, c) = m(d, d) = 0.0;
    }
    m(mode_index(out_c, Pol::H), mode_index(in_a, Pol::H)) = 1.0;
    m(mode_index(out_d, Pol::V), mode_index(in_a, Pol::V)) = 1.0;
    m(mode_index(out_d, Pol::H), mode_index(in_b, Pol::H)) = 1.0;
    m(mode_index(out_c, Pol::V), mode_index(in_b, Pol::V)) = 1.0;
    return detail::apply_map(s, m);
}

// probability of one photon in mode m and one in mode n (unconditioned)
inline double pair_probability(const TwoPhotonState& s, int m, int n) {
    if (m == n) return (1.0 + s.overlap) * std::norm(s.b(m, m));
    auto x = s.b(m, n), y = s.b(n, m);
    return std::norm(x) + std::norm(y) + 2.0 * s.overlap * (x * std::conj(y)).real();
}

// raw probability that the two photons exit through distinct given paths
inline double cross_port_coincidence_probability(const TwoPhotonState& s, int pa = port_c,
                                                 int pb = port_d) {
    double acc = 0.0;
    for (Pol p : {Pol::H, Pol::V})
        for (Pol q : {Pol::H, Pol::V})
            acc += pair_probability(s, mode_index(pa, p), mode_index(pb, q));
    return acc;
}

inline double coincidence_sector_probability(const TwoPhotonState& s, int pa = port_c,
                                             int pb = port_d) {
    return cross_port_coincidence_probability(s, pa, pb);
}

// coincidence probability behind linear analyzers at theta1 (port c) and
// theta2 (port d), conditioned on the coincidence sector
inline double coincidence_probability(const TwoPhotonState& s, double theta1_rad,
                                      double theta2_rad, int pa = port_c, int pb = port_d) {
    double sector = coincidence_sector_probability(s, pa, pb);
    if (!(sector > 1e-300))
        throw std::runtime_error("coincidence_probability: no support on detector paths");
    double c1 = std::cos(theta1_rad), s1 = std::sin(theta1_rad);
    double c2 = std::cos(theta2_rad), s2 = std::sin(theta2_rad);
    std::array<double, 2> a1{c1, s1}, a2{c2, s2};
    std::complex<double> beta1 = 0.0, beta2 = 0.0;
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
            int mc = mode_index(pa, static_cast<Pol>(p));
            int md = mode_index(pb, static_cast<Pol>(q));
            beta1 += s.b(mc, md) * a1[p] * a2[q];
            beta2 += s.b(md, mc) * a1[p] * a2[q];
        }
    double raw = std::norm(beta1) + std::norm(beta2) +
                 2.0 * s.overlap * (beta1 * std::conj(beta2)).real();
    return raw / sector;
}

// polarization density matrix of the coincidence sector, basis {HH,HV,VH,VV}
// over (port pa, port pb), trace normalized to 1
inline Eigen::Matrix4cd sector_density_matrix(const TwoPhotonState& s, int pa = port_c,
                                              int pb = port_d) {
    Eigen::Vector4cd x, y;
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
            int mc = mode_index(pa, static_cast<Pol>(p));
            int md = mode_index(pb, static_cast<Pol>(q));
            x(2 * p + q) = s.b(mc, md);
            y(2 * p + q) = s.b(md, mc);
        }
    Eigen::Matrix4cd rho = x * x.adjoint() + y * y.adjoint() +
                           s.overlap * (x * y.adjoint() + y * x.adjoint());
    double tr = rho.trace().real();
    if (!(tr > 1e-300)) throw std::runtime_error("sector_density_matrix: empty sector");
    return rho / tr;
}

// rank-2 mixture reached at delay tau when the packet overlap is V(tau)
inline Eigen::Matrix4cd postselected_polarization_state(double overlap) {
    detail::check_overlap(overlap);
    Eigen::Vector4cd psi_minus;
    psi_minus << 0.0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0;
    Eigen::Matrix4cd rho = overlap * (psi_minus * psi_minus.adjoint());
    rho(1, 1) += 0.5 * (1.0 - overlap);
    rho(2, 2) += 0.5 * (1.0 - overlap);
    return rho;
}

inline const std::array<std::pair<std::string, Eigen::Vector4cd>, 4>& bell_states() {
    static const auto states = [] {
        double r = 1.0 / std::sqrt(2.0);
        std::array<std::pair<std::string, Eigen::Vector4cd>, 4> s;
        s[0] = {"phi_plus", (Eigen::Vector4cd() << r, 0, 0, r).finished()};
        s[1] = {"phi_minus", (Eigen::Vector4cd() << r, 0, 0, -r).finished()};
        s[2] = {"psi_plus", (Eigen::Vector4cd() << 0, r, r, 0).finished()};
        s[3] = {"psi_minus", (Eigen::Vector4cd() << 0, r, -r, 0).finished()};
        return s;
    }();
    return states;
}

inline std::array<double, 4> bell_fidelities(const Eigen::Matrix4cd& rho) {
    std::array<double, 4> f{};
    for (int i = 0; i < 4; ++i) {
        const auto& v = bell_states()[i].second;
        f[i] = (v.adjoint() * rho * v)(0, 0).real();
    }
    return f;
}

// Wootters concurrence of a two-qubit density matrix
inline double concurrence(const Eigen::Matrix4cd& rho) {
    Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
    // sigma_y x sigma_y in the {HH,HV,VH,VV} basis
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    Eigen::Matrix4cd m = rho * yy * rho.conjugate() * yy;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(m, false);
    std::array<double, 4> lam{};
    for (int i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(0.0, solver.eigenvalues()(i).real()));
    std::sort(lam.begin(), lam.end(), std::greater<>());
    return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

struct QutritState {
    int path;
    std::complex<double> amp_2h, amp_hv, amp_2v;  // {2H, HV, 2V}, normalized
};

// bosonic amplitudes of a two-photon state confined to a single beam
inline QutritState qutrit_state(const TwoPhotonState& s) {
    int found_path = -1;
    for (int m = 0; m < n_modes; ++m)
        for (int n = 0; n < n_modes; ++n) {
            if (std::abs(s.b(m, n)) <= 1e-14) continue;
            for (int k : {m, n}) {
                int p = k / 2 + 1;
                if (found_path == -1) found_path = p;
                else if (found_path != p)
                    throw std::invalid_argument("qutrit_state: photons occupy distinct paths");
            }
        }
    if (found_path == -1) throw std::invalid_argument("qutrit_state: empty state");
    int ih = mode_index(found_path, Pol::H), iv = mode_index(found_path, Pol::V);
    double r2 = std::sqrt(2.0);
    QutritState q{found_path, r2 * s.b(ih, ih), s.b(ih, iv) + s.b(iv, ih), r2 * s.b(iv, iv)};
    double norm = std::sqrt(std::norm(q.amp_2h) + std::norm(q.amp_hv) + std::norm(q.amp_2v));
    q.amp_2h /= norm;
    q.amp_hv /= norm;
    q.amp_2v /= norm;
    return q;
}

struct TwoCrystalBell {
    TwoPhotonState state;
    double w1, w2;               // normalized amplitude weights
    Eigen::Vector4cd pol_amp;    // pure polarization amplitude over {HH,HV,VH,VV}
    double concurrence;
    double sector_probability;   // emitted-pair survival (t1^2 + t2^2)/2; no postselection
    std::array<double, 4> fidelities;  // vs {phi+, phi-, psi+, psi-}
};

// Two-crystal scheme: crystal 1 contributes |H>_1 |V>_2, crystal 2 (phase
// phi from the compensator) contributes |H>_2 |V>_1; partial mirrors with
// amplitude transmissions t1, t2 set the weights. The pump polarization
// scales both crystal amplitudes equally, so it cancels from the weights.
inline TwoCrystalBell two_crystal_bell(double phi_rad, std::optional<double> hwp_after_rad,
                                       double t1, double t2, double pump_rotation_rad = 0.0) {
    if (!(t1 > 0.0 && t1 <= 1.0 && t2 > 0.0 && t2 <= 1.0))
        throw std::invalid_argument("two_crystal_bell: transmissions must lie in (0, 1]");
    (void)pump_rotation_rad;  // common factor on both amplitudes, cancels on normalization
    double norm = std::sqrt(t1 * t1 + t2 * t2);
    TwoCrystalBell out;
    out.w1 = t1 / norm;
    out.w2 = t2 / norm;
    out.sector_probability = 0.5 * (t1 * t1 + t2 * t2);

    TwoPhotonState s;
    s.overlap = 1.0;  // ideal compensators
    s.b(mode_index(path_1, Pol::H), mode_index(path_2, Pol::V)) = out.w1;
    s.b(mode_index(path_2, Pol::H), mode_index(path_1, Pol::V)) = out.w2 * std::polar(1.0, phi_rad);
    if (hwp_after_rad) s = apply_hwp(s, path_2, *hwp_after_rad);
    out.state = s;

    Eigen::Matrix4cd rho = sector_density_matrix(s, path_1, path_2);
    out.fidelities = bell_fidelities(rho);
    out.concurrence = concurrence(rho);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
    out.pol_amp = es.eigenvectors().col(3);  // dominant eigenvector; pure at unit overlap
    int lead = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(out.pol_amp(i)) > std::abs(out.pol_amp(lead))) lead = i;
    out.pol_amp *= std::polar(1.0, -std::arg(out.pol_amp(lead)));  // fix reporting phase
    return out;
}

}  // namespace spdc
