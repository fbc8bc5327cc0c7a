// Quickstart: find the collinear and beamlike angles for a 351.1 nm pump,
// then print the emission-angle tuning curve at the beamlike setting.

#include <cstdio>

#include "spdc/phasematch.hpp"

int main() {
    spdc::BboModel bbo{spdc::bbo_ordinary, spdc::bbo_extraordinary};

    double th_col = spdc::collinear_degenerate_angle(bbo, 0.3511);
    double th_beam = spdc::beamlike_angle(bbo, 0.3511, 0.7022);
    std::printf("collinear degenerate angle: %.4f deg\n", spdc::rad_to_deg(th_col));
    std::printf("beamlike tangency angle:    %.4f deg\n\n", spdc::rad_to_deg(th_beam));

    spdc::CrystalConfig cfg{0.3511, th_beam, 1.0};
    auto w = spdc::walkoff(bbo, cfg, 0.7022);
    std::printf("walkoff D = %.6f ps/mm, DL = %.6f ps, cDL = %.3f um\n\n", w.D_ps_per_mm,
                w.DL_ps, w.cdl_um);

    // each row: e-ray at lambda, o-ray partner at the energy-conjugate wavelength
    std::printf("%12s %14s %14s\n", "lambda_e_nm", "e_ext_deg", "o_partner_ext_deg");
    for (const auto& s : spdc::tuning_curve(bbo, cfg, 0.700, 0.712, 25)) {
        if (!s.point) {
            std::printf("%12.2f %14s %14s\n", 1e3 * s.lambda_signal_um, "-", "-");
            continue;
        }
        std::printf("%12.2f %14.5f %14.5f\n", 1e3 * s.lambda_signal_um,
                    spdc::rad_to_deg(s.point->alpha_e_ext_rad),
                    spdc::rad_to_deg(s.point->alpha_o_ext_rad));
    }
    return 0;
}
