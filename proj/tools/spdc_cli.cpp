// Command-line front door: wires the library modules into figure-style
// recipes and writes CSV/JSON artifacts. Exit codes: 0 ok, 2 config error,
// 3 solver failure.

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spdc/biphoton.hpp"
#include "spdc/counting.hpp"
#include "spdc/dispersion.hpp"
#include "spdc/phasematch.hpp"
#include "spdc/polstate.hpp"
#include "spdc/scan.hpp"

using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json default_config() {
    return json{
        {"pump_wavelength_um", 0.3511},
        {"theta_p_deg", 48.3},
        {"crystal_length_mm", 1.0},
        {"sellmeier_ordinary", {2.7359, 0.01878, 0.01822, 0.01354}},
        {"sellmeier_extraordinary", {2.3753, 0.01224, 0.01667, 0.01516}},
        {"filter1_shape", "gaussian"},
        {"filter1_fwhm_nm", 3.0},
        {"filter2_shape", "gaussian"},
        {"filter2_fwhm_nm", 3.0},
        {"lambda_min_nm", 695.0},
        {"lambda_max_nm", 715.0},
        {"n_points", 81},
        {"tau_min_ps", -0.75},
        {"tau_max_ps", 0.5},
        {"tau_step_ps", 0.0025},
        {"tau_ps", nullptr},
        {"analyzer_a1_deg", -45.0},
        {"a2_min_deg", -90.0},
        {"a2_max_deg", 90.0},
        {"a2_step_deg", 10.0},
        {"hwp_deg", nullptr},
        {"scheme", "singlet"},
        {"compensator_phase_deg", 180.0},
        {"hwp_after_deg", nullptr},
        {"qutrit_hwp_deg", nullptr},
        {"t1", 1.0},
        {"t2", 1.0},
        {"pump_rotation_deg", 0.0},
        {"pair_rate_hz", 1e5},
        {"duration_s", 5.0},
        {"window_ns", 7.3},
        {"seed", 12345},
        {"eff_detector_1", 0.70},
        {"eff_fiber_1", 0.65},
        {"eff_filter_1", 0.55},
        {"eff_misc_1", 1.0},
        {"eff_detector_2", 0.70},
        {"eff_fiber_2", 0.65},
        {"eff_filter_2", 0.55},
        {"eff_misc_2", 1.0},
    };
}

json load_config(const std::string& path) {
    json cfg = default_config();
    if (path.empty()) return cfg;
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    json user;
    try {
        user = json::parse(f);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!user.is_object()) throw ConfigError("config root must be a JSON object");
    for (auto& [key, value] : user.items()) {
        if (!cfg.contains(key)) throw ConfigError("unknown config key: " + key);
        cfg[key] = value;
    }
    return cfg;
}

double getd(const json& cfg, const std::string& key) {
    const auto& v = cfg.at(key);
    if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return v.get<double>();
}

std::int64_t geti(const json& cfg, const std::string& key) {
    const auto& v = cfg.at(key);
    if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
    return v.get<std::int64_t>();
}

std::string gets(const json& cfg, const std::string& key) {
    const auto& v = cfg.at(key);
    if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
    return v.get<std::string>();
}

std::optional<double> getd_opt(const json& cfg, const std::string& key) {
    const auto& v = cfg.at(key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number or null");
    return v.get<double>();
}

spdc::SellmeierSet get_sellmeier(const json& cfg, const std::string& key) {
    const auto& v = cfg.at(key);
    if (!v.is_array() || v.size() != 4)
        throw ConfigError("config key '" + key + "' must be an array of 4 numbers");
    for (const auto& x : v)
        if (!x.is_number()) throw ConfigError("config key '" + key + "' must hold numbers");
    return spdc::SellmeierSet{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(),
                              v[3].get<double>()};
}

spdc::BboModel get_model(const json& cfg) {
    return spdc::BboModel{get_sellmeier(cfg, "sellmeier_ordinary"),
                          get_sellmeier(cfg, "sellmeier_extraordinary")};
}

spdc::CrystalConfig get_crystal(const json& cfg) {
    spdc::CrystalConfig c{getd(cfg, "pump_wavelength_um"),
                          spdc::deg_to_rad(getd(cfg, "theta_p_deg")),
                          getd(cfg, "crystal_length_mm")};
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

std::optional<spdc::SpectralFilter> get_filter(const json& cfg, int which, double lambda_deg_um) {
    std::string base = "filter" + std::to_string(which);
    std::string shape = gets(cfg, base + "_shape");
    if (shape == "none") return std::nullopt;
    spdc::SpectralFilter f;
    f.center_um = lambda_deg_um;
    f.fwhm_nm = getd(cfg, base + "_fwhm_nm");
    if (shape == "flat") f.shape = spdc::FilterShape::flat;
    else if (shape == "gaussian") f.shape = spdc::FilterShape::gaussian;
    else throw ConfigError(base + "_shape must be flat, gaussian or none");
    try {
        f.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return f;
}

std::vector<double> tau_grid_from(const json& cfg) {
    double lo = getd(cfg, "tau_min_ps"), hi = getd(cfg, "tau_max_ps");
    double step = getd(cfg, "tau_step_ps");
    if (!(step > 0.0)) throw ConfigError("tau_step_ps must be positive");
    if (!(hi >= lo)) throw ConfigError("tau_max_ps must be >= tau_min_ps");
    int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> taus(n);
    for (int i = 0; i < n; ++i) taus[i] = lo + i * step;
    return taus;
}

void write_json_atomic(const json& j, const std::filesystem::path& path) {
    spdc::write_file_atomic(path, j.dump(2) + "\n");
}

// packet overlap at the configured delay; defaults to the dip where V = 1
double overlap_from_config(const json& cfg, const spdc::BboModel& model,
                           const spdc::CrystalConfig& crystal) {
    auto tau = getd_opt(cfg, "tau_ps");
    if (!tau) return 1.0;
    double lambda_deg = 2.0 * crystal.lambda_p_um;
    auto w = spdc::walkoff(model, crystal, lambda_deg);
    auto f1 = get_filter(cfg, 1, lambda_deg);
    auto f2 = get_filter(cfg, 2, lambda_deg);
    auto grid = spdc::make_grid(w, f1, f2, lambda_deg, std::abs(*tau) + w.DL_ps);
    auto jsa = spdc::jsa_cw(w, lambda_deg, grid);
    return spdc::packet_overlap(jsa, f1, f2, *tau);
}

int cmd_tuning_curve(const json& cfg, const std::string& out) {
    auto model = get_model(cfg);
    auto crystal = get_crystal(cfg);
    double lo_nm = getd(cfg, "lambda_min_nm"), hi_nm = getd(cfg, "lambda_max_nm");
    auto n = geti(cfg, "n_points");
    if (n < 2) throw ConfigError("n_points must be >= 2");
    if (!(lo_nm < hi_nm)) throw ConfigError("lambda_min_nm must be < lambda_max_nm");
    auto conj = [&](double lam_um) {
        return 1.0 / (1.0 / crystal.lambda_p_um - 1.0 / lam_um);
    };
    for (double edge : {lo_nm * 1e-3, hi_nm * 1e-3, conj(lo_nm * 1e-3), conj(hi_nm * 1e-3)})
        if (!(edge >= spdc::lambda_min_um && edge <= spdc::lambda_max_um))
            throw ConfigError("wavelength range (or its energy conjugate) leaves [350, 800] nm");

    spdc::ScanCurve curve;
    curve.columns = {"wavelength_nm", "angle_e_ext_deg", "angle_o_ext_deg", "angle_e_int_deg",
                     "angle_o_int_deg"};
    for (std::int64_t i = 0; i < n; ++i) {
        double lam_nm = lo_nm + (hi_nm - lo_nm) * i / double(n - 1);
        double lam_um = lam_nm * 1e-3;
        std::optional<spdc::TuningPoint> e_pt, o_pt;
        try {
            e_pt = spdc::solve_pair(model, crystal, lam_um);        // e-ray at this wavelength
            o_pt = spdc::solve_pair(model, crystal, conj(lam_um));  // partner solve: o-ray here
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("solver failed at grid point " + spdc::format_g9(lam_nm) +
                                     " nm: " + e.what());
        }
        std::vector<std::optional<double>> row(5);
        row[0] = lam_nm;
        if (e_pt) {
            row[1] = spdc::rad_to_deg(e_pt->alpha_e_ext_rad);
            row[3] = spdc::rad_to_deg(e_pt->alpha_e_int_rad);
        }
        if (o_pt) {
            row[2] = spdc::rad_to_deg(o_pt->alpha_o_ext_rad);
            row[4] = spdc::rad_to_deg(o_pt->alpha_o_int_rad);
        }
        curve.rows.push_back(std::move(row));
    }
    spdc::write_csv(curve, out.empty() ? "tuning_curve.csv" : out);
    return 0;
}

int cmd_hom_scan(const json& cfg, const std::string& out) {
    auto model = get_model(cfg);
    auto crystal = get_crystal(cfg);
    double lambda_deg = 2.0 * crystal.lambda_p_um;
    auto w = spdc::walkoff(model, crystal, lambda_deg);
    auto f1 = get_filter(cfg, 1, lambda_deg);
    auto f2 = get_filter(cfg, 2, lambda_deg);
    auto taus = tau_grid_from(cfg);
    double tau_absmax = std::max(std::abs(taus.front()), std::abs(taus.back()));
    auto grid = spdc::make_grid(w, f1, f2, lambda_deg, tau_absmax);
    auto jsa = spdc::jsa_cw(w, lambda_deg, grid);
    auto scan = spdc::hom_scan(jsa, f1, f2, taus);

    spdc::ScanCurve curve;
    curve.columns = {"tau_ps", "rate_normalized"};
    for (size_t i = 0; i < scan.tau_ps.size(); ++i)
        curve.rows.push_back({scan.tau_ps[i], scan.rate[i]});
    std::filesystem::path csv_path = out.empty() ? "hom_scan.csv" : out;
    spdc::write_csv(curve, csv_path);

    size_t imin = 0;
    for (size_t i = 1; i < scan.rate.size(); ++i)
        if (scan.rate[i] < scan.rate[imin]) imin = i;
    json side{{"DL_ps", w.DL_ps},
              {"expected_dip_tau_ps", -0.5 * w.DL_ps},
              {"dip_tau_ps", scan.tau_ps[imin]},
              {"dip_rate", scan.rate[imin]}};
    try {
        auto fit = spdc::gaussian_filter_shape_check(scan);
        side["fit_visibility"] = fit.visibility;
        side["fit_tau0_ps"] = fit.tau0_ps;
        side["fit_sigma_ps"] = fit.sigma_ps;
        side["fit_rms"] = fit.rms;
    } catch (const std::exception&) {
        // flat scans have no meaningful gaussian fit; omit the fields
    }
    write_json_atomic(side, std::filesystem::path(csv_path).replace_extension(".json"));
    return 0;
}

int cmd_pol_correlation(const json& cfg, const std::string& out) {
    auto model = get_model(cfg);
    auto crystal = get_crystal(cfg);
    double overlap = overlap_from_config(cfg, model, crystal);
    auto hwp = getd_opt(cfg, "hwp_deg");
    auto state = spdc::apply_hwp(spdc::source_state(overlap), spdc::path_1,
                                 spdc::deg_to_rad(hwp.value_or(0.0)));
    state = spdc::apply_bs(state, spdc::path_1, spdc::path_2, spdc::port_c, spdc::port_d);

    double a1 = getd(cfg, "analyzer_a1_deg");
    double lo = getd(cfg, "a2_min_deg"), hi = getd(cfg, "a2_max_deg");
    double step = getd(cfg, "a2_step_deg");
    if (!(step > 0.0)) throw ConfigError("a2_step_deg must be positive");
    if (!(hi >= lo)) throw ConfigError("a2_max_deg must be >= a2_min_deg");

    spdc::ScanCurve curve;
    curve.columns = {"a2_deg", "coincidence_probability"};
    int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> a2s(n), ps(n);
    for (int i = 0; i < n; ++i) {
        a2s[i] = lo + i * step;
        ps[i] = spdc::coincidence_probability(state, spdc::deg_to_rad(a1),
                                              spdc::deg_to_rad(a2s[i]));
        curve.rows.push_back({a2s[i], ps[i]});
    }
    std::filesystem::path csv_path = out.empty() ? "pol_correlation.csv" : out;
    spdc::write_csv(curve, csv_path);

    // least-squares fit P = p0 + p1 sin^2(a2 - a1)
    double sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        double x = std::sin(spdc::deg_to_rad(a2s[i] - a1));
        x *= x;
        sx += x;
        sxx += x * x;
        sy += ps[i];
        sxy += x * ps[i];
    }
    double det = n * sxx - sx * sx;
    double p1 = det != 0.0 ? (n * sxy - sx * sy) / det : 0.0;
    double p0 = (sy - p1 * sx) / n;
    int imin = 0, imax = 0;
    for (int i = 1; i < n; ++i) {
        if (ps[i] < ps[imin]) imin = i;
        if (ps[i] > ps[imax]) imax = i;
    }
    json side{{"a1_deg", a1},
              {"overlap", overlap},
              {"fit_offset", p0},
              {"fit_amplitude", p1},
              {"fit_visibility", p1 != 0.0 || p0 != 0.0 ? p1 / (p1 + 2.0 * p0) : 0.0},
              {"min_a2_deg", a2s[imin]},
              {"max_a2_deg", a2s[imax]}};
    write_json_atomic(side, std::filesystem::path(csv_path).replace_extension(".json"));
    return 0;
}

json complex_json(const std::complex<double>& z) {
    return json{z.real(), z.imag()};
}

json density_json(const Eigen::Matrix4cd& rho) {
    json re = json::array(), im = json::array();
    for (int i = 0; i < 4; ++i) {
        json rrow = json::array(), irow = json::array();
        for (int j = 0; j < 4; ++j) {
            rrow.push_back(rho(i, j).real());
            irow.push_back(rho(i, j).imag());
        }
        re.push_back(rrow);
        im.push_back(irow);
    }
    return json{{"re", re}, {"im", im}};
}

json fidelity_json(const std::array<double, 4>& f) {
    json out;
    for (int i = 0; i < 4; ++i) out[spdc::bell_states()[i].first] = f[i];
    return out;
}

int cmd_state(const json& cfg, const std::string& out) {
    auto model = get_model(cfg);
    auto crystal = get_crystal(cfg);
    std::string scheme = gets(cfg, "scheme");
    json report{{"scheme", scheme}};

    if (scheme == "hom-dip") {
        double overlap = overlap_from_config(cfg, model, crystal);
        auto hwp = getd_opt(cfg, "hwp_deg");
        auto s = spdc::apply_hwp(spdc::source_state(overlap), spdc::path_1,
                                 spdc::deg_to_rad(hwp.value_or(45.0)));
        s = spdc::apply_bs(s, spdc::path_1, spdc::path_2, spdc::port_c, spdc::port_d);
        int cc = spdc::mode_index(spdc::port_c, spdc::Pol::V);
        int dd = spdc::mode_index(spdc::port_d, spdc::Pol::V);
        report["overlap"] = overlap;
        report["cross_port_coincidence_probability"] = spdc::cross_port_coincidence_probability(s);
        report["p_both_port_c"] = spdc::pair_probability(s, cc, cc);
        report["p_both_port_d"] = spdc::pair_probability(s, dd, dd);
        report["amp_20_abs"] = std::sqrt(2.0) * std::abs(s.b(cc, cc));
        report["amp_02_abs"] = std::sqrt(2.0) * std::abs(s.b(dd, dd));
        report["norm"] = s.norm();
    } else if (scheme == "singlet") {
        double overlap = overlap_from_config(cfg, model, crystal);
        auto hwp = getd_opt(cfg, "hwp_deg");
        auto s = spdc::apply_hwp(spdc::source_state(overlap), spdc::path_1,
                                 spdc::deg_to_rad(hwp.value_or(0.0)));
        s = spdc::apply_bs(s, spdc::path_1, spdc::path_2, spdc::port_c, spdc::port_d);
        double sector = spdc::coincidence_sector_probability(s);
        auto rho = spdc::sector_density_matrix(s);
        report["overlap"] = overlap;
        report["sector_probability"] = sector;
        report["discarded_probability"] = 1.0 - sector;
        report["density_matrix"] = density_json(rho);
        report["concurrence"] = spdc::concurrence(rho);
        report["bell_fidelities"] = fidelity_json(spdc::bell_fidelities(rho));
        report["werner_overlap_model"] = density_json(spdc::postselected_polarization_state(overlap));
    } else if (scheme == "qutrit") {
        auto s = spdc::apply_pbs(spdc::source_state(1.0), spdc::path_1, spdc::path_2, spdc::port_c,
                                 spdc::port_d);
        if (auto h = getd_opt(cfg, "qutrit_hwp_deg"))
            s = spdc::apply_hwp(s, spdc::port_c, spdc::deg_to_rad(*h));
        auto q = spdc::qutrit_state(s);
        report["path"] = q.path;
        report["amp_2h"] = complex_json(q.amp_2h);
        report["amp_hv"] = complex_json(q.amp_hv);
        report["amp_2v"] = complex_json(q.amp_2v);
        report["norm"] = s.norm();
    } else if (scheme == "two-crystal") {
        std::optional<double> hwp_after;
        if (auto h = getd_opt(cfg, "hwp_after_deg")) hwp_after = spdc::deg_to_rad(*h);
        auto r = spdc::two_crystal_bell(spdc::deg_to_rad(getd(cfg, "compensator_phase_deg")),
                                        hwp_after, getd(cfg, "t1"), getd(cfg, "t2"),
                                        spdc::deg_to_rad(getd(cfg, "pump_rotation_deg")));
        report["weights"] = json{r.w1, r.w2};
        report["sector_probability"] = r.sector_probability;
        report["concurrence"] = r.concurrence;
        report["bell_fidelities"] = fidelity_json(r.fidelities);
        json amp = json::array();
        for (int i = 0; i < 4; ++i) amp.push_back(complex_json(r.pol_amp(i)));
        report["pol_amplitude"] = amp;
    } else {
        throw ConfigError("scheme must be hom-dip, singlet, qutrit or two-crystal");
    }

    if (out.empty()) std::cout << report.dump(2) << "\n";
    else write_json_atomic(report, out);
    return 0;
}

int cmd_counts(const json& cfg, const std::string& out, std::optional<std::uint64_t> seed_flag) {
    spdc::EfficiencyChain c1{getd(cfg, "eff_detector_1"), getd(cfg, "eff_fiber_1"),
                             getd(cfg, "eff_filter_1"), getd(cfg, "eff_misc_1")};
    spdc::EfficiencyChain c2{getd(cfg, "eff_detector_2"), getd(cfg, "eff_fiber_2"),
                             getd(cfg, "eff_filter_2"), getd(cfg, "eff_misc_2")};
    spdc::CountingConfig cc{getd(cfg, "pair_rate_hz"), getd(cfg, "duration_s"),
                            getd(cfg, "window_ns"),
                            seed_flag ? *seed_flag : static_cast<std::uint64_t>(geti(cfg, "seed"))};
    try {
        c1.validate();
        c2.validate();
        cc.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    auto summary = spdc::simulate_counts(cc, c1, c2);
    double r1 = summary.singles1 / cc.duration_s;
    double r2 = summary.singles2 / cc.duration_s;
    std::string table;
    auto line = [&table](const std::string& k, const std::string& v) {
        table += k;
        table.append(k.size() < 34 ? 34 - k.size() : 1, ' ');
        table += v + "\n";
    };
    line("arm 1 efficiency product", spdc::format_g9(c1.product()));
    line("arm 2 efficiency product", spdc::format_g9(c2.product()));
    line("expected coinc/singles ratio arm 1", spdc::format_g9(spdc::expected_ratio(c2)));
    line("expected coinc/singles ratio arm 2", spdc::format_g9(spdc::expected_ratio(c1)));
    line("pair rate (1/s)", spdc::format_g9(cc.pair_rate_hz));
    line("duration (s)", spdc::format_g9(cc.duration_s));
    line("window (ns)", spdc::format_g9(cc.window_ns));
    line("seed", std::to_string(cc.seed));
    line("pairs emitted", std::to_string(summary.pairs));
    line("singles arm 1", std::to_string(summary.singles1));
    line("singles arm 2", std::to_string(summary.singles2));
    line("true coincidences", std::to_string(summary.true_coinc));
    line("accidental coincidences", std::to_string(summary.accidental_coinc));
    line("measured ratio arm 1", summary.singles1 > 0
                                     ? spdc::format_g9(double(summary.true_coinc) / summary.singles1)
                                     : "n/a");
    line("measured ratio arm 2", summary.singles2 > 0
                                     ? spdc::format_g9(double(summary.true_coinc) / summary.singles2)
                                     : "n/a");
    line("accidental rate estimate (1/s)", spdc::format_g9(spdc::accidental_rate(r1, r2, cc.window_ns)));
    std::cout << table;
    if (!out.empty()) spdc::write_file_atomic(out, table);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"beamlike type-II SPDC simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::optional<std::uint64_t> seed_flag;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out", out_path, "output path");
        sub->add_option("--seed", seed_flag, "override the PRNG seed");
    };

    auto* tuning = app.add_subcommand("tuning-curve", "emission angles vs wavelength (CSV)");
    auto* hom = app.add_subcommand("hom-scan", "Hong-Ou-Mandel delay scan (CSV + JSON sidecar)");
    auto* pol = app.add_subcommand("pol-correlation", "analyzer correlation sweep (CSV + JSON)");
    auto* state = app.add_subcommand("state", "two-photon state report (JSON)");
    auto* counts = app.add_subcommand("counts", "efficiency budget and seeded counts (table)");
    for (auto* sub : {tuning, hom, pol, state, counts}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        json cfg = load_config(config_path);
        if (tuning->parsed()) return cmd_tuning_curve(cfg, out_path);
        if (hom->parsed()) return cmd_hom_scan(cfg, out_path);
        if (pol->parsed()) return cmd_pol_correlation(cfg, out_path);
        if (state->parsed()) return cmd_state(cfg, out_path);
        if (counts->parsed()) return cmd_counts(cfg, out_path, seed_flag);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    }
}
