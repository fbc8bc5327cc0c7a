#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spdc/phasematch.hpp"

using namespace spdc;

namespace {
const BboModel model{bbo_ordinary, bbo_extraordinary};
// degenerate birefringence: phase matching provably impossible
const BboModel isotropic{bbo_ordinary, bbo_ordinary};

constexpr double collinear_deg = 49.20527329445643;
constexpr double beamlike_deg = 48.327006311130106;
}  // namespace

TEST_CASE("collinear degenerate angle matches the frozen root") {
    double th = rad_to_deg(collinear_degenerate_angle(model, 0.3511));
    CHECK(th == Catch::Approx(collinear_deg).margin(1e-9));
    CHECK(th > 48.9);
    CHECK(th < 49.5);
}

TEST_CASE("beamlike tangency angle sits below the collinear angle") {
    double th = rad_to_deg(beamlike_angle(model, 0.3511, 0.7022));
    CHECK(th == Catch::Approx(beamlike_deg).margin(1e-9));
    CHECK(th > 48.0);
    CHECK(th < 48.6);
    CHECK(th < collinear_deg);
}

TEST_CASE("tangency point: emission angles at the beamlike setting") {
    CrystalConfig cfg{0.3511, deg_to_rad(beamlike_deg), 1.0};
    auto roots = solve_pair_all(model, cfg, 0.7022);
    REQUIRE(roots.size() == 1);  // double root at the vertex
    const auto& p = roots.front();
    CHECK(rad_to_deg(p.alpha_e_int_rad) == Catch::Approx(2.1112487).margin(1e-5));
    CHECK(rad_to_deg(p.alpha_o_int_rad) == Catch::Approx(-2.0299037).margin(1e-5));
    CHECK(rad_to_deg(p.alpha_e_ext_rad) == Catch::Approx(3.3789356).margin(1e-5));
    CHECK(rad_to_deg(p.alpha_o_ext_rad) == Catch::Approx(-3.3789356).margin(1e-5));
    // both beams leave at the same external angle magnitude, near 3.5 deg
    CHECK(std::abs(rad_to_deg(p.alpha_e_ext_rad)) == Catch::Approx(3.5).margin(0.4));
    CHECK(std::abs(rad_to_deg(p.alpha_o_ext_rad)) == Catch::Approx(3.5).margin(0.4));
}

TEST_CASE("the degenerate wavelength bounds the e-branch at the beamlike angle") {
    CrystalConfig cfg{0.3511, deg_to_rad(beamlike_deg), 1.0};
    CHECK(solve_pair_all(model, cfg, 0.70210).empty());
    CHECK(solve_pair_all(model, cfg, 0.70226).size() == 2);
}

TEST_CASE("at the collinear angle the primary branch passes through zero") {
    CrystalConfig cfg{0.3511, deg_to_rad(collinear_deg), 1.0};
    auto roots = solve_pair_all(model, cfg, 0.7022);
    REQUIRE(roots.size() == 2);
    auto inner = solve_pair(model, cfg, 0.7022);
    REQUIRE(inner.has_value());
    CHECK(std::abs(inner->alpha_e_int_rad) < 1e-9);
    double outer = std::max(std::abs(rad_to_deg(roots[0].alpha_e_int_rad)),
                            std::abs(rad_to_deg(roots[1].alpha_e_int_rad)));
    CHECK(outer == Catch::Approx(4.1968957).margin(1e-5));
}

TEST_CASE("solved points satisfy energy, momentum and refraction identities") {
    CrystalConfig cfg{0.3511, deg_to_rad(collinear_deg), 1.0};
    for (int i = 0; i <= 40; ++i) {
        double lam = 0.7025 + (0.7500 - 0.7025) * i / 40.0;
        for (const auto& p : solve_pair_all(model, cfg, lam)) {
            // energy conservation through the conjugate wavelength
            CHECK(1.0 / p.lambda_signal_um + 1.0 / p.lambda_idler_um ==
                  Catch::Approx(1.0 / cfg.lambda_p_um).epsilon(1e-14));

            double ke = 2 * pi *
                        model.index_extraordinary(p.lambda_signal_um,
                                                  cfg.theta_p_rad - p.alpha_e_int_rad) /
                        p.lambda_signal_um;
            double ko = 2 * pi * model.index_ordinary(p.lambda_idler_um) / p.lambda_idler_um;
            double kp = 2 * pi * model.index_extraordinary(cfg.lambda_p_um, cfg.theta_p_rad) /
                        cfg.lambda_p_um;
            // transverse balance and longitudinal closure
            CHECK(ke * std::sin(p.alpha_e_int_rad) + ko * std::sin(p.alpha_o_int_rad) ==
                  Catch::Approx(0.0).margin(1e-10 * kp));
            CHECK(ke * std::cos(p.alpha_e_int_rad) + ko * std::cos(p.alpha_o_int_rad) ==
                  Catch::Approx(kp).epsilon(1e-10));
            // external angles follow Snell's law with the matching index
            double n_e = ke * p.lambda_signal_um / (2 * pi);
            double n_o = ko * p.lambda_idler_um / (2 * pi);
            CHECK(std::sin(p.alpha_e_ext_rad) ==
                  Catch::Approx(n_e * std::sin(p.alpha_e_int_rad)).margin(1e-14));
            CHECK(std::sin(p.alpha_o_ext_rad) ==
                  Catch::Approx(n_o * std::sin(p.alpha_o_int_rad)).margin(1e-14));
        }
    }
}

TEST_CASE("tuning_curve keeps every grid point, solution or not") {
    CrystalConfig cfg{0.3511, deg_to_rad(beamlike_deg), 1.0};
    auto samples = tuning_curve(model, cfg, 0.68, 0.76, 41);
    REQUIRE(samples.size() == 41);
    int with = 0, without = 0;
    for (const auto& s : samples) {
        CHECK_FALSE(s.solver_failed);
        if (s.point) {
            ++with;
            CHECK(s.point->lambda_signal_um == Catch::Approx(s.lambda_signal_um).epsilon(1e-15));
        } else {
            ++without;
            CHECK(s.lambda_signal_um < 0.7022);  // below the tangency turning point
        }
    }
    CHECK(with > 0);
    CHECK(without > 0);
}

TEST_CASE("tuning_curve validates its grid") {
    CrystalConfig cfg;
    CHECK_THROWS_AS(tuning_curve(model, cfg, 0.70, 0.76, 1), std::invalid_argument);
    CHECK_THROWS_AS(tuning_curve(model, cfg, 0.76, 0.70, 11), std::invalid_argument);
    CHECK_THROWS_AS(tuning_curve(model, cfg, 0.30, 0.76, 11), std::domain_error);
}

TEST_CASE("walkoff matches the frozen group-delay mismatch") {
    CrystalConfig cfg{0.3511, deg_to_rad(48.3), 1.0};
    auto w = walkoff(model, cfg, 0.7022);
    CHECK(w.D_ps_per_mm == Catch::Approx(0.241156791341580).margin(1e-12));
    CHECK(w.DL_ps == Catch::Approx(w.D_ps_per_mm * cfg.length_mm).epsilon(1e-15));
    CHECK(w.cdl_um == Catch::Approx(c_um_per_ps * w.DL_ps).epsilon(1e-15));
    CHECK(w.cdl_um == Catch::Approx(72.3).margin(0.1));
    // both daughters trail the pump; their difference is D
    CHECK(w.delta_e_ps_per_mm < 0.0);
    CHECK(w.delta_o_ps_per_mm < 0.0);
    CHECK(w.delta_o_ps_per_mm - w.delta_e_ps_per_mm ==
          Catch::Approx(w.D_ps_per_mm).epsilon(1e-12));

    CrystalConfig cfg2{0.3511, deg_to_rad(48.3), 2.0};
    CHECK(walkoff(model, cfg2, 0.7022).DL_ps == Catch::Approx(2.0 * w.DL_ps).epsilon(1e-15));

    CrystalConfig cfgb{0.3511, deg_to_rad(beamlike_deg), 1.0};
    CHECK(walkoff(model, cfgb, 0.7022).D_ps_per_mm ==
          Catch::Approx(0.24134654878171297).margin(1e-12));
}

TEST_CASE("config validation rejects unphysical settings") {
    CHECK_THROWS_AS((CrystalConfig{0.30, deg_to_rad(48.3), 1.0}.validate()),
                    std::invalid_argument);
    CHECK_THROWS_AS((CrystalConfig{0.3511, 0.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((CrystalConfig{0.3511, deg_to_rad(48.3), -1.0}.validate()),
                    std::invalid_argument);
    CHECK_NOTHROW(CrystalConfig{}.validate());
}

TEST_CASE("degenerate birefringence reports no solution instead of a bogus root") {
    CHECK_THROWS_WITH(collinear_degenerate_angle(isotropic, 0.3511),
                      Catch::Matchers::ContainsSubstring("no phase-matching solution"));
    CHECK_THROWS_WITH(beamlike_angle(isotropic, 0.3511, 0.7022),
                      Catch::Matchers::ContainsSubstring("tangency not found"));
    CrystalConfig cfg{0.3511, deg_to_rad(48.3), 1.0};
    CHECK_THROWS_WITH(walkoff(isotropic, cfg, 0.7022),
                      Catch::Matchers::ContainsSubstring("slow ray"));
}
