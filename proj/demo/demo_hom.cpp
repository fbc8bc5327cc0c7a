// Quickstart: Hong-Ou-Mandel dip for the 1 mm crystal at 48.3 deg, with and
// without 3 nm gaussian filters, plus the polarization correlation at the dip.

#include <cstdio>

#include "spdc/biphoton.hpp"
#include "spdc/polstate.hpp"

int main() {
    spdc::BboModel bbo{spdc::bbo_ordinary, spdc::bbo_extraordinary};
    spdc::CrystalConfig cfg{0.3511, spdc::deg_to_rad(48.3), 1.0};
    auto w = spdc::walkoff(bbo, cfg, 0.7022);

    spdc::SpectralFilter f{0.7022, 3.0, spdc::FilterShape::gaussian};
    auto jsa_bare = spdc::jsa_cw(w);
    auto jsa_filt = spdc::jsa_cw(w, 0.7022, spdc::make_grid(w, f, f));

    std::vector<double> taus;
    for (double t = -0.45; t <= 0.21 + 1e-12; t += 0.03) taus.push_back(t);
    auto bare = spdc::hom_scan(jsa_bare, std::nullopt, std::nullopt, taus);
    auto filt = spdc::hom_scan(jsa_filt, f, f, taus);

    std::printf("dip expected at tau = -DL/2 = %.5f ps\n\n", -0.5 * w.DL_ps);
    std::printf("%10s %12s %12s %12s\n", "tau_ps", "unfiltered", "triangle", "3nm_gauss");
    for (size_t i = 0; i < taus.size(); ++i)
        std::printf("%10.3f %12.6f %12.6f %12.6f\n", taus[i], bare.rate[i],
                    spdc::triangle_closed_form(taus[i], w.DL_ps), filt.rate[i]);

    auto fit = spdc::gaussian_filter_shape_check(spdc::hom_scan(jsa_filt, f, f, [] {
        std::vector<double> t;
        for (double x = -0.75; x <= 0.5 + 1e-12; x += 0.0025) t.push_back(x);
        return t;
    }()));
    std::printf("\n3 nm dip gaussian fit: v = %.4f, tau0 = %.5f ps, sigma = %.5f ps, rms = %.2e\n",
                fit.visibility, fit.tau0_ps, fit.sigma_ps, fit.rms);

    // polarization correlations for the post-beamsplitter singlet
    auto s = spdc::apply_bs(spdc::source_state(1.0), spdc::path_1, spdc::path_2, spdc::port_c,
                            spdc::port_d);
    std::printf("\nanalyzer 1 fixed at -45 deg, conditioned coincidence probability:\n");
    for (double a2 = -90.0; a2 <= 90.0; a2 += 30.0)
        std::printf("  a2 = %6.1f deg: P = %.6f\n", a2,
                    spdc::coincidence_probability(s, spdc::deg_to_rad(-45.0),
                                                  spdc::deg_to_rad(a2)));
    return 0;
}
