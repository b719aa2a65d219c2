#ifndef E2PA_CLI_HPP
#define E2PA_CLI_HPP

// Command implementations behind the e2pa tool. Each command builds a
// Report; the tool prints it and maps exceptions to exit codes.

#include "e2pa/config.hpp"
#include "e2pa/io.hpp"
#include "e2pa/jsi.hpp"
#include "e2pa/optics.hpp"
#include "e2pa/photon_stats.hpp"
#include "e2pa/report.hpp"
#include "e2pa/sim.hpp"
#include "e2pa/stats.hpp"
#include "e2pa/xsection.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace e2pa::cli {

enum ExitCode : int { ok = 0, config_error = 2, numeric_failure = 3, io_failure = 4 };

/// Exit code for an exception escaping a command.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return config_error;
    if (dynamic_cast<const IoError*>(&e)) return io_failure;
    if (dynamic_cast<const NumericError*>(&e)) return numeric_failure;
    return numeric_failure;
}

using report::Report;
using io::fmt;

inline std::string join(const std::vector<double>& v, int digits = 6) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + fmt(v[k], digits);
    return s;
}

inline void echo_config(Report& r, const config::RunConfig& cfg) {
    r.input("config", cfg.source);
    for (const auto& [k, v] : cfg.echo) r.input(k, v);
}

// ---------------------------------------------------------------- te

struct TeOptions {
    std::optional<std::string> jsi_path;
    double beta_fs2 = 3700.0;
    double center_nm = 810.0;
    double fwhm_s_nm = 76.0;
    double fwhm_i_nm = 76.0;
    double sum_fwhm_rad_per_fs = 0.00425;
    std::size_t n = 1024;
    double extent_fwhm = 4.0;
    std::size_t pad = 4;
    std::vector<double> windows_fs{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000};
    std::optional<std::string> jti_out;
    double jti_crop_fs = 2500.0;
    std::size_t jti_stride = 8;
};

inline Report cmd_te(const TeOptions& o) {
    Report r("te");
    jsi::JointSpectrum j;
    if (o.jsi_path) {
        r.input("jsi", *o.jsi_path);
        r.input("resample_n", static_cast<double>(o.n));
        j = jsi::resample_to_omega(io::read_jsi_grid(*o.jsi_path), o.n);
    } else {
        r.input("jsi", "synthetic gaussian");
        r.input("center_nm", o.center_nm);
        r.input("fwhm_s_nm", o.fwhm_s_nm);
        r.input("fwhm_i_nm", o.fwhm_i_nm);
        r.input("sum_fwhm_rad_per_fs", o.sum_fwhm_rad_per_fs);
        r.input("grid_n", static_cast<double>(o.n));
        r.input("extent_fwhm", o.extent_fwhm);
        const double ws = units::bandwidth_nm_to_omega(o.fwhm_s_nm, o.center_nm);
        const double wi = units::bandwidth_nm_to_omega(o.fwhm_i_nm, o.center_nm);
        const double rho = jsi::anticorrelation_for_sum_fwhm(ws, wi, o.sum_fwhm_rad_per_fs);
        r.input("anticorrelation", rho);
        j = jsi::synthesize_gaussian_jsi(o.center_nm, o.fwhm_s_nm, o.fwhm_i_nm, rho, {o.n, o.extent_fwhm});
    }
    r.input("beta_fs2", o.beta_fs2);
    r.input("pad", static_cast<double>(o.pad));

    const auto ref = jsi::apply_dispersion_and_transform(j, {0.0}, o.pad);
    const auto dis = o.beta_fs2 == 0.0 ? ref : jsi::apply_dispersion_and_transform(j, {o.beta_fs2}, o.pad);
    r.line("time_step_fs = " + fmt(dis.dt(), 6));
    r.line("parseval_ratio = " + fmt(dis.total() / j.total(), 12));
    r.line("T_e_fs = " + fmt(jsi::entanglement_time(dis), 6));
    r.line("T_e_transform_limited_fs = " + fmt(jsi::entanglement_time(ref), 6));
    r.line("tau_signal_fs = " + fmt(jsi::marginal_pulse_fwhm(dis, jsi::PhotonAxis::signal), 6));
    r.line("tau_idler_fs = " + fmt(jsi::marginal_pulse_fwhm(dis, jsi::PhotonAxis::idler), 6));
    auto& t = r.table("coincidence_ratio", {"delta_t_fs", "fraction_ref", "fraction_disp", "ratio"});
    for (double w : o.windows_fs) {
        if (w < dis.dt()) {
            r.line("skipped window " + fmt(w, 6) + " fs (finer than the time step)");
            continue;
        }
        t.rows.push_back({fmt(w, 6), fmt(jsi::coincidence_fraction(ref, w), 8), fmt(jsi::coincidence_fraction(dis, w), 8),
                          fmt(jsi::coincidence_ratio(ref, dis, w), 8)});
    }
    if (o.jti_out) {
        io::write_jti_grid(*o.jti_out, dis, o.jti_crop_fs, o.jti_stride);
        r.line("jti_written = " + *o.jti_out);
    }
    return r;
}

// ---------------------------------------------------------------- mu

struct MuOptions {
    std::vector<double> count_rates;
    std::vector<double> powers_uW;
    double eta = 0.46;
    double dead_time_ns = 52.0;
    double rep_rate = 8e7;
    int modes = 1;
    std::optional<double> target_power_uW;
    double loss = 0.0;
};

inline Report cmd_mu(const MuOptions& o) {
    Report r("mu");
    r.input("count_rates_per_s", join(o.count_rates));
    if (!o.powers_uW.empty()) r.input("powers_uW", join(o.powers_uW));
    r.input("eta", o.eta);
    r.input("dead_time_ns", o.dead_time_ns);
    r.input("rep_rate_per_s", o.rep_rate);
    r.input("modes", static_cast<double>(o.modes));
    if (o.target_power_uW) r.input("target_power_uW", *o.target_power_uW);
    r.input("loss", o.loss);
    if (o.count_rates.empty()) throw ConfigError("mu: at least one count rate is required");
    if (!o.powers_uW.empty() && o.powers_uW.size() != o.count_rates.size())
        throw ConfigError("mu: powers and count rates must have the same length");

    const photon_stats::DetectorModel det{o.eta, o.dead_time_ns, o.rep_rate};
    const int nd = det.dead_pulses();
    r.line("N_dead = " + std::to_string(nd));
    auto& t = r.table("mu", {"power_uW", "rate_per_s", "P_meas", "P_corr", "mu"});
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < o.count_rates.size(); ++k) {
        const double pm = o.count_rates[k] / o.rep_rate;
        const double pc = photon_stats::dead_time_correct(pm, nd);
        const double mu = photon_stats::invert_mu(pc, o.eta, o.modes);
        const double w = o.powers_uW.empty() ? NAN : o.powers_uW[k];
        t.rows.push_back({o.powers_uW.empty() ? "" : fmt(w, 6), fmt(o.count_rates[k], 6), fmt(pm, 6), fmt(pc, 6),
                          fmt(mu, 6)});
        if (!o.powers_uW.empty()) pts.emplace_back(w, mu);
        if (o.count_rates.size() == 1) {
            r.line("P_meas = " + fmt(pm, 6));
            r.line("P_corr = " + fmt(pc, 6));
            r.line("mu = " + fmt(mu, 6));
        }
    }
    if (pts.size() >= 2) {
        const auto line = photon_stats::fit_mu_line(pts);
        r.line("mu_slope_per_uW = " + fmt(line.slope, 6));
        r.line("mu_intercept = " + fmt(line.intercept, 6));
        if (o.target_power_uW) {
            const double mx = line(*o.target_power_uW);
            r.line("mu_xtal_at_target = " + fmt(mx, 6));
            r.line("mu_sample_at_target = " + fmt(photon_stats::mu_after_loss(mx, o.loss), 6));
        }
    }
    return r;
}

// ---------------------------------------------------------------- flux

struct FluxOptions {
    std::string config_path;
    std::optional<double> mu;
};

inline Report cmd_flux(const FluxOptions& o) {
    Report r("flux");
    const auto cfg = config::load(o.config_path);
    echo_config(r, cfg);
    BeamProfile spdc = spdc_beam(cfg.apparatus);
    if (o.mu) {
        r.input("mu_override", *o.mu);
        spdc = spdc.with_photon_rate(*o.mu * spdc.rep_rate_hz);
    }
    const double phi = peak_flux(spdc);
    r.line("spdc_mean_photon_number = " + fmt(spdc.mean_photon_number(), 6));
    r.line("spdc_peak_flux = " + fmt(phi, 6));
    r.line("spdc_peak_flux_mode_form = " + fmt(peak_flux_mode_form(spdc), 6));
    r.line("mode_form_over_peak = " + fmt(peak_flux_mode_form(spdc) / phi, 8));
    r.line("spdc_effective_area_cm2 = " + fmt(effective_area(spdc, 0.0), 6));
    r.line("spdc_effective_duration_fs = " + fmt(effective_duration_fs(spdc), 6));
    r.line("spdc_flux_per_photon = " + fmt(flux_per_photon(spdc), 6));
    if (cfg.laser) {
        const double lf = flux_per_photon(*cfg.laser);
        r.line("laser_flux_per_photon = " + fmt(lf, 6));
        r.line("laser_over_spdc_flux_per_photon = " + fmt(lf / flux_per_photon(spdc), 6));
    }
    const auto& c = cfg.apparatus.collection;
    r.line("K_integral_rayleigh_cm = " + fmt(integrate_K_cm(c, cfg.apparatus.rayleigh_mm), 6));
    r.line("K_line_average_cuvette = " +
           fmt(collection_line_average(c, 0.5 * cfg.apparatus.cuvette_length_cm / units::mm_to_cm), 6));
    auto& t = r.table("beam_profile", {"z_mm", "fwhm_x_um", "fwhm_y_um", "area_cm2", "peak_flux", "K"});
    for (double z = -2.0; z <= 2.0 + 1e-12; z += 0.25)
        t.rows.push_back({fmt(z, 4), fmt(beam_fwhm_at(spdc, z, Axis::x), 6), fmt(beam_fwhm_at(spdc, z, Axis::y), 6),
                          fmt(effective_area(spdc, z), 6), fmt(peak_flux(spdc, z), 6), fmt(collection_K(c, z), 6)});
    return r;
}

// ---------------------------------------------------------------- bounds

struct BoundsOptions {
    std::string config_path;
    std::vector<double> diagonal_sigma_cm2{1e-25, 1e-24, 1e-23, 1e-22, 1e-21, 1e-20, 1e-19};
    std::vector<double> diagonal_mu{1, 3, 10, 30, 112};
    std::optional<double> sigma_E_cm2;  // extra expected-rate query
};

struct BoundsOutcome {
    Report report{"bounds"};
    std::size_t failures = 0;
};

inline BoundsOutcome cmd_bounds(const BoundsOptions& o) {
    BoundsOutcome out;
    Report& r = out.report;
    const auto cfg = config::load(o.config_path);
    echo_config(r, cfg);
    r.input("diagonal_sigma_cm2", join(o.diagonal_sigma_cm2));
    r.input("diagonal_mu", join(o.diagonal_mu));
    if (o.sigma_E_cm2) r.input("sigma_E_cm2", *o.sigma_E_cm2);

    const auto& a = cfg.apparatus;
    const double phi_spdc = peak_flux(spdc_beam(a));
    const auto& u = cfg.uncertainty;
    r.line("spdc_peak_flux = " + fmt(phi_spdc, 6));
    r.line("samples = " + std::to_string(cfg.samples.size()));

    auto& t = r.table("bounds", {"sample", "sigma_E_UB_cm2", "sigma_E_UB_expanded", "sigma_E_est_cm2", "QA_UB",
                                 "QA_UB_expanded", "note"});
    auto& d = r.table("diagonal", {"sample", "sigma_E_cm2", "mu", "peak_flux", "rate_cnt_per_s"});
    auto& e = r.table("expected", {"sample", "sigma_E_cm2", "rate_cnt_per_s"});
    for (const auto& s : cfg.samples) {
        try {
            const auto ub = xsection::sigma_E_upper_bound_uncertain(s, a, u);
            std::string est = "", qa = "", qa_u = "", note;
            if (s.sigma_C_GM && cfg.entanglement)
                est = fmt(xsection::sigma_E_estimate(*s.sigma_C_GM, cfg.entanglement->Te_fs, cfg.entanglement->Ae_cm2), 4);
            else if (!cfg.entanglement)
                note += "no [entanglement] section, estimate skipped; ";
            if (s.sigma_C_GM && cfg.laser) {
                const auto q = xsection::quantum_advantage_UB(s, a, *cfg.laser, phi_spdc);
                const double rel_sc = s.sigma_C_std_GM ? *s.sigma_C_std_GM / *s.sigma_C_GM : 0.0;
                const UncertainValue qv = stats::propagate(
                    {{UncertainValue(1.0, u.F_LB), 0.5},
                     {UncertainValue(1.0, rel_sc), -0.5},
                     {UncertainValue(1.0, u.photon_rate), -1.0}},
                    u.coverage_k);
                qa = fmt(q.value, 4);
                qa_u = fmt(q.value * qv.std_uncertainty * u.coverage_k, 2);
            } else if (!s.sigma_C_GM) {
                note += "sigma_C absent, QA_UB skipped; ";
            } else {
                note += "no [laser] section, QA_UB skipped; ";
            }
            t.rows.push_back({s.name, fmt(ub.value, 4), fmt(ub.expanded(), 2), est, qa, qa_u, note});
            for (double sig : o.diagonal_sigma_cm2)
                for (const auto& p : xsection::e2pef_diagonal(sig, s, a, o.diagonal_mu))
                    d.rows.push_back({s.name, fmt(sig, 4), fmt(p.mu, 6), fmt(p.flux, 6), fmt(p.rate, 6)});
            for (const auto& p : xsection::e2pef_diagonal(ub.value, s, a, o.diagonal_mu))
                d.rows.push_back({s.name, "UB:" + fmt(ub.value, 4), fmt(p.mu, 6), fmt(p.flux, 6), fmt(p.rate, 6)});
            if (o.sigma_E_cm2)
                e.rows.push_back({s.name, fmt(*o.sigma_E_cm2, 4), fmt(xsection::expected_e2pef(*o.sigma_E_cm2, s, a), 6)});
        } catch (const Error& ex) {
            ++out.failures;
            r.line("sample '" + s.name + "' failed: " + ex.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------- sigma-c

struct SigmaCOptions {
    std::string config_path;
    std::string sample;
    std::optional<double> slope;
    double slope_std = 0.0;
    std::optional<std::string> points_path;
};

inline Report cmd_sigma_c(const SigmaCOptions& o) {
    Report r("sigma-c");
    const auto cfg = config::load(o.config_path);
    echo_config(r, cfg);
    r.input("sample", o.sample);
    const auto& s = cfg.sample(o.sample);
    const auto laser = cfg.laser_beam();
    xsection::C2PAResult res;
    if (o.points_path) {
        r.input("points", *o.points_path);
        const auto pts = io::read_power_points(*o.points_path);
        std::optional<double> b;
        try {
            const auto pl = stats::fit_power_law(pts);
            b = pl.exponent_b;
            r.line("power_law_a = " + fmt(pl.amplitude_a, 6) + " +/- " + fmt(pl.sigma_a(), 3));
            r.line("power_law_b = " + fmt(pl.exponent_b, 6) + " +/- " + fmt(pl.sigma_b(), 3));
            r.line(std::string("exponent_accepted = ") + (pl.accepted() ? "yes" : "no"));
            for (const auto& w : pl.warnings) r.line("warning: " + w);
        } catch (const DomainError& e) {
            r.line(std::string("power-law fit skipped: ") + e.what());
        }
        const auto sf = stats::fit_quadratic_slope(pts);
        res = xsection::extract_sigma_C(UncertainValue(sf.slope, sf.sigma), s, cfg.apparatus, laser, cfg.uncertainty, b);
    } else if (o.slope) {
        r.input("slope_cnt_per_s_per_uW2", *o.slope);
        r.input("slope_std", o.slope_std);
        res = xsection::extract_sigma_C(UncertainValue(*o.slope, o.slope_std), s, cfg.apparatus, laser,
                                        cfg.uncertainty);
    } else {
        throw ConfigError("sigma-c: give --slope or --points");
    }
    r.line("fit_slope = " + fmt(res.fit_slope.value, 6) + " +/- " + fmt(res.fit_slope.std_uncertainty, 3));
    r.line("sigma_C_GM = " + report::with_uncertainty(res.sigma_C_GM.value, res.sigma_C_GM.expanded(),
                                                       res.sigma_C_GM.coverage_k));
    r.line("F_C_at_F_LB_power_uW = " + fmt(std::sqrt(cfg.apparatus.F_LB_cnt_per_s / res.fit_slope.value), 6));
    return r;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
    std::string config_path;
    std::string out_dir = ".";
};

inline std::string series_filename(std::size_t index, double power) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "c2pef_%02zu_%guW.csv", index, power);
    return buf;
}

inline Report cmd_simulate(const SimulateOptions& o) {
    Report r("simulate");
    const auto cfg = config::load(o.config_path);
    echo_config(r, cfg);
    r.input("out_dir", o.out_dir);
    const auto plan = config::make_plan(cfg);
    const std::string hash = sim::plan_fingerprint(plan);
    std::error_code ec;
    std::filesystem::create_directories(o.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + o.out_dir + "': " + ec.message());
    r.line("plan_hash = " + hash);

    const std::map<std::string, std::string> meta{{"plan_hash", hash}, {"sample", plan.sample.name}};
    auto& t = r.table("series", {"file", "power_uW", "true_rate_cnt_per_s", "total_counts"});
    const auto series = sim::simulate_c2pef_run(plan);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto path = (std::filesystem::path(o.out_dir) / series_filename(k, plan.powers_uW[k])).string();
        io::write_count_series(path, series[k], meta);
        const double f = plan.powers_uW[k] > 0.0 ? xsection::c2pef_forward(plan.sample, plan.apparatus, plan.beam,
                                                                         plan.powers_uW[k])
                                                 : 0.0;
        t.rows.push_back({path, fmt(plan.powers_uW[k], 6), fmt(f, 6), std::to_string(series[k].total_counts())});
    }
    if (cfg.simulate->sigma_E_cm2) {
        const auto s = sim::simulate_e2pef_run(plan, *cfg.simulate->sigma_E_cm2);
        const auto path = (std::filesystem::path(o.out_dir) / "e2pef.csv").string();
        auto m = meta;
        m["sigma_E_cm2"] = fmt(*cfg.simulate->sigma_E_cm2);
        io::write_count_series(path, s, m);
        t.rows.push_back({path, "", fmt(xsection::expected_e2pef(*cfg.simulate->sigma_E_cm2, plan.sample, plan.apparatus), 6),
                          std::to_string(s.total_counts())});
    }
    return r;
}

// ---------------------------------------------------------------- fit

struct FitOptions {
    std::string series_glob;
    std::string config_path;
    std::optional<std::string> sample;
    double transition_fraction = 0.05;
};

inline Report cmd_fit(const FitOptions& o) {
    Report r("fit");
    const auto cfg = config::load(o.config_path);
    echo_config(r, cfg);
    r.input("series", o.series_glob);
    r.input("transition_fraction", o.transition_fraction);
    const auto paths = io::glob_paths(o.series_glob);
    if (paths.empty()) throw IoError("fit: no files match '" + o.series_glob + "'");

    std::optional<std::string> expected_hash;
    if (cfg.simulate) expected_hash = sim::plan_fingerprint(config::make_plan(cfg));
    std::vector<CountSeries> series;
    std::optional<std::string> meta_sample;
    for (const auto& p : paths) {
        auto f = io::read_count_series(p);
        if (!f.series.power_uW) {
            r.line("skipped " + p + " (no power_uW metadata)");
            continue;
        }
        auto h = f.metadata.find("plan_hash");
        if (expected_hash && h != f.metadata.end() && h->second != *expected_hash)
            throw ConfigError("fit: " + p + " was generated by plan " + h->second + " but the config describes plan " +
                              *expected_hash + " (seed or plan mismatch)");
        if (auto s = f.metadata.find("sample"); s != f.metadata.end()) meta_sample = s->second;
        r.input("file", p);
        series.push_back(std::move(f.series));
    }
    if (series.empty()) throw IoError("fit: no usable series among " + std::to_string(paths.size()) + " files");

    std::string name;
    if (o.sample) name = *o.sample;
    else if (cfg.simulate) name = cfg.simulate->sample;
    else if (meta_sample) name = *meta_sample;
    else throw ConfigError("fit: no sample given (use --sample)");
    r.input("sample", name);
    const auto a = sim::analyze_c2pef(series, cfg.sample(name), cfg.apparatus, cfg.laser_beam(), cfg.uncertainty,
                                      o.transition_fraction);
    auto& t = r.table("points", {"power_uW", "rate_cnt_per_s", "sigma_cnt_per_s"});
    for (const auto& p : a.points) t.rows.push_back({fmt(p.power_uW, 6), fmt(p.rate, 8), fmt(p.sigma, 6)});
    if (a.power_law) {
        r.line("power_law_a = " + fmt(a.power_law->amplitude_a, 6) + " +/- " + fmt(a.power_law->sigma_a(), 3));
        r.line("power_law_b = " + fmt(a.power_law->exponent_b, 6) + " +/- " + fmt(a.power_law->sigma_b(), 3));
        r.line(std::string("exponent_accepted = ") + (a.power_law->accepted() ? "yes" : "no"));
    }
    for (const auto& w : a.warnings) r.line("warning: " + w);
    r.line("fit_slope = " + fmt(a.slope.slope, 6) + " +/- " + fmt(a.slope.sigma, 3));
    r.line("sigma_C_GM = " + report::with_uncertainty(a.result.sigma_C_GM.value, a.result.sigma_C_GM.expanded(),
                                                       a.result.sigma_C_GM.coverage_k));
    return r;
}

// ---------------------------------------------------------------- allan

struct AllanOptions {
    std::string input_path;
    double dt_s = 1.0;
    std::vector<double> taus_s;  // empty: powers of two times dt
};

inline Report cmd_allan(const AllanOptions& o) {
    Report r("allan");
    r.input("input", o.input_path);
    r.input("dt_s", o.dt_s);
    const auto rates = io::read_column(o.input_path);
    std::vector<double> taus = o.taus_s;
    if (taus.empty())
        for (double t = o.dt_s; t <= o.dt_s * static_cast<double>(rates.size()) / 2.0; t *= 2.0) taus.push_back(t);
    r.input("taus_s", join(taus));
    const auto res = stats::allan_deviation(rates, o.dt_s, taus);
    for (const auto& w : res.warnings) r.line("warning: " + w);
    auto& t = r.table("allan", {"tau_s", "deviation", "clusters"});
    const stats::AllanPoint* best = nullptr;
    for (const auto& p : res.points) {
        t.rows.push_back({fmt(p.tau_s, 6), fmt(p.deviation, 6), std::to_string(p.clusters)});
        if (!best || p.deviation < best->deviation) best = &p;
    }
    if (best) r.line("minimum_at_tau_s = " + fmt(best->tau_s, 6));
    return r;
}

} // namespace e2pa::cli

#endif
