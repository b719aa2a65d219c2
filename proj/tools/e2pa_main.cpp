// e2pa command-line tool.

#include "e2pa/e2pa.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace e2pa;

int emit(const report::Report& r, const std::string& out_path) {
    if (out_path.empty()) {
        r.write(std::cout);
        return cli::ok;
    }
    std::ofstream f(out_path);
    if (!f) throw IoError("cannot open report file '" + out_path + "' for writing");
    r.write(f);
    if (!f) throw IoError("failed writing report file '" + out_path + "'");
    std::cout << "report written to " << out_path << '\n';
    return cli::ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entangled two-photon absorption sensitivity pipeline"};
    app.require_subcommand(1);
    std::string out_path;
    app.add_option("--report", out_path, "Write the report to this file instead of stdout");

    cli::TeOptions te;
    std::string jsi_path, jti_out;
    auto* c_te = app.add_subcommand("te", "Entanglement time and coincidence ratios from a joint spectrum");
    c_te->add_option("--jsi", jsi_path, "JSI grid CSV (wavelength axes, nm); synthetic fixture if omitted");
    c_te->add_option("--beta-fs2", te.beta_fs2, "Group-delay dispersion applied to both photons (fs^2)");
    c_te->add_option("--center-nm", te.center_nm);
    c_te->add_option("--fwhm-s-nm", te.fwhm_s_nm);
    c_te->add_option("--fwhm-i-nm", te.fwhm_i_nm);
    c_te->add_option("--sum-fwhm", te.sum_fwhm_rad_per_fs, "Sum-frequency FWHM of the fixture (rad/fs)");
    c_te->add_option("--grid", te.n, "Grid points per axis")->check(CLI::Range(64, 8192));
    c_te->add_option("--extent-fwhm", te.extent_fwhm);
    c_te->add_option("--pad", te.pad, "Zero-padding factor")->check(CLI::Range(1, 8));
    c_te->add_option("--windows-fs", te.windows_fs, "Coincidence windows (fs)");
    c_te->add_option("--jti-out", jti_out, "Write the dispersed JTI grid here");
    c_te->add_option("--jti-crop-fs", te.jti_crop_fs);
    c_te->add_option("--jti-stride", te.jti_stride)->check(CLI::PositiveNumber);

    cli::MuOptions mu;
    double target = NAN;
    auto* c_mu = app.add_subcommand("mu", "Mean photon number per pulse from single-detector count rates");
    c_mu->add_option("--rates", mu.count_rates, "Count rates (cnt/s)")->required();
    c_mu->add_option("--powers-uW", mu.powers_uW, "Pump powers matching --rates");
    c_mu->add_option("--eta", mu.eta, "Detection efficiency");
    c_mu->add_option("--dead-time-ns", mu.dead_time_ns);
    c_mu->add_option("--rep-rate", mu.rep_rate, "Pulse repetition rate (1/s)");
    c_mu->add_option("--modes", mu.modes, "Number of temporal modes")->check(CLI::PositiveNumber);
    c_mu->add_option("--target-power-uW", target);
    c_mu->add_option("--loss", mu.loss, "Fractional loss between crystal and sample");

    cli::FluxOptions fx;
    double fx_mu = NAN;
    auto* c_flux = app.add_subcommand("flux", "Peak photon flux and collection integrals");
    c_flux->add_option("--config", fx.config_path)->required();
    c_flux->add_option("--mu", fx_mu, "Override the mean photon number per pulse");

    cli::BoundsOptions bd;
    double bd_sigma = NAN;
    auto* c_bounds = app.add_subcommand("bounds", "Upper bounds, estimates and quantum advantage per sample");
    c_bounds->add_option("--config", bd.config_path)->required();
    c_bounds->add_option("--diagonal-sigma", bd.diagonal_sigma_cm2, "Cross-sections for the rate diagonals (cm^2)");
    c_bounds->add_option("--diagonal-mu", bd.diagonal_mu, "Mean photon numbers for the rate diagonals");
    c_bounds->add_option("--sigma-E", bd_sigma, "Report the expected E2PEF rate at this cross-section (cm^2)");

    cli::SigmaCOptions sc;
    double sc_slope = NAN;
    std::string sc_points;
    auto* c_sc = app.add_subcommand("sigma-c", "Classical cross-section from a quadratic slope or power points");
    c_sc->add_option("--config", sc.config_path)->required();
    c_sc->add_option("--sample", sc.sample)->required();
    c_sc->add_option("--slope", sc_slope, "Quadratic slope (cnt s^-1 uW^-2)");
    c_sc->add_option("--slope-std", sc.slope_std);
    c_sc->add_option("--points", sc_points, "CSV of power_uW,rate[,sigma]");

    cli::SimulateOptions sm;
    auto* c_sim = app.add_subcommand("simulate", "Synthetic count series from the [simulate] plan");
    c_sim->add_option("--config", sm.config_path)->required();
    c_sim->add_option("--out-dir", sm.out_dir);

    cli::FitOptions ft;
    std::string ft_sample;
    auto* c_fit = app.add_subcommand("fit", "Background subtraction, power-law fit and sigma_C from series");
    c_fit->add_option("--series", ft.series_glob, "Glob of count series files")->required();
    c_fit->add_option("--config", ft.config_path)->required();
    c_fit->add_option("--sample", ft_sample);
    c_fit->add_option("--transition-fraction", ft.transition_fraction);

    cli::AllanOptions al;
    auto* c_allan = app.add_subcommand("allan", "Allan deviation of a rate record");
    c_allan->add_option("input", al.input_path, "One rate per line")->required();
    c_allan->add_option("--dt-s", al.dt_s, "Sample spacing (s)")->check(CLI::PositiveNumber);
    c_allan->add_option("--taus", al.taus_s, "Averaging times (s)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::config_error;
    }

    try {
        if (*c_te) {
            if (!jsi_path.empty()) te.jsi_path = jsi_path;
            if (!jti_out.empty()) te.jti_out = jti_out;
            return emit(cli::cmd_te(te), out_path);
        }
        if (*c_mu) {
            if (!std::isnan(target)) mu.target_power_uW = target;
            return emit(cli::cmd_mu(mu), out_path);
        }
        if (*c_flux) {
            if (!std::isnan(fx_mu)) fx.mu = fx_mu;
            return emit(cli::cmd_flux(fx), out_path);
        }
        if (*c_bounds) {
            if (!std::isnan(bd_sigma)) bd.sigma_E_cm2 = bd_sigma;
            auto r = cli::cmd_bounds(bd);
            emit(r.report, out_path);
            return r.failures ? cli::numeric_failure : cli::ok;
        }
        if (*c_sc) {
            if (!std::isnan(sc_slope)) sc.slope = sc_slope;
            if (!sc_points.empty()) sc.points_path = sc_points;
            return emit(cli::cmd_sigma_c(sc), out_path);
        }
        if (*c_sim) return emit(cli::cmd_simulate(sm), out_path);
        if (*c_fit) {
            if (!ft_sample.empty()) ft.sample = ft_sample;
            return emit(cli::cmd_fit(ft), out_path);
        }
        if (*c_allan) return emit(cli::cmd_allan(al), out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::exit_code_for(e);
    }
    return cli::config_error;
}
