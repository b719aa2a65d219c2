#ifndef E2PA_CONFIG_HPP
#define E2PA_CONFIG_HPP

// Run configuration: INI-style sections with unit-suffixed keys.
//
//   [apparatus]   rep_rate_per_s, cuvette_length_cm, kappa_max, alpha_per_mm,
//                 z0_mm, transmittance, F_LB_cnt_per_s,
//                 wavelength_nm or photon_energy_J
//   [spdc]        fwhm_x0_um, fwhm_y0_um, rayleigh_mm, tau_fs,
//                 photon_rate_per_s or mean_photon_number
//   [laser]       fwhm_x0_um, fwhm_y0_um, rayleigh_mm, tau_fs
//   [entanglement] Te_fs, Ae_um2 [, Ae_min_um2, Ae_max_um2]
//   [uncertainty] rel_* relative standard uncertainties, coverage_k
//   [sample NAME] c_umol_per_L, quantum_yield, overlap_ratio
//                 [, sigma_C_GM, sigma_C_std_GM, extinction_per_M_per_cm]
//   [simulate]    sample, powers_uW, integration_s, chopper_hz,
//                 background_cnt_per_s, seed [, sigma_E_cm2, bins_per_period,
//                 transition_bins]

#include "e2pa/constants.hpp"
#include "e2pa/error.hpp"
#include "e2pa/io.hpp"
#include "e2pa/optics.hpp"
#include "e2pa/sim.hpp"
#include "e2pa/types.hpp"
#include "e2pa/xsection.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace e2pa::config {

struct SimulateSection {
    std::string sample;
    std::vector<double> powers_uW;
    double integration_s = 0.0;
    double chopper_hz = 0.0;
    double background_cnt_per_s = 0.0;
    std::uint64_t seed = 0;
    std::optional<double> sigma_E_cm2;
    std::size_t bins_per_period = 40;
    std::size_t transition_bins = 2;
};

struct RunConfig {
    std::string source;
    ApparatusSpec apparatus;
    std::optional<BeamProfile> laser;
    std::optional<xsection::EntanglementParams> entanglement;
    xsection::UncertaintyBudget uncertainty;
    std::vector<SampleSpec> samples;
    std::optional<SimulateSection> simulate;
    /// Every key as read, "section.key" -> text, for provenance.
    std::vector<std::pair<std::string, std::string>> echo;

    const SampleSpec& sample(const std::string& name) const {
        for (const auto& s : samples)
            if (s.name == name) return s;
        throw ConfigError("no sample named '" + name + "' in " + source);
    }

    BeamProfile laser_beam() const {
        if (!laser) throw ConfigError("config " + source + " has no [laser] section");
        return *laser;
    }
};

namespace detail {

namespace pt = boost::property_tree;

// Collects problems so a single error can list all of them.
class Problems {
public:
    void add(std::string msg) { list_.push_back(std::move(msg)); }
    bool empty() const { return list_.empty(); }
    [[noreturn]] void raise(const std::string& source) const {
        std::ostringstream os;
        os << "invalid configuration " << source << ":";
        for (const auto& m : list_) os << "\n  " << m;
        throw ConfigError(os.str());
    }

private:
    std::vector<std::string> list_;
};

class Section {
public:
    Section(std::string name, const pt::ptree* tree, Problems& p, RunConfig& cfg)
        : name_(std::move(name)), tree_(tree), problems_(p), cfg_(cfg) {
        if (tree_)
            for (const auto& [k, v] : *tree_) cfg_.echo.emplace_back(name_ + "." + k, v.data());
    }

    bool present() const { return tree_ != nullptr; }
    bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

    std::optional<std::string> text(const std::string& key) {
        seen_.insert(key);
        if (!tree_) return std::nullopt;
        auto it = tree_->find(key);
        if (it == tree_->not_found()) return std::nullopt;
        return it->second.data();
    }

    double number(const std::string& key) {
        auto t = text(key);
        if (!t) {
            problems_.add("[" + name_ + "] missing key '" + key + "'");
            return 0.0;
        }
        return parse(key, *t).value_or(0.0);
    }

    std::optional<double> optional_number(const std::string& key) {
        auto t = text(key);
        if (!t) return std::nullopt;
        return parse(key, *t);
    }

    std::vector<double> list(const std::string& key) {
        auto t = text(key);
        std::vector<double> out;
        if (!t) {
            problems_.add("[" + name_ + "] missing key '" + key + "'");
            return out;
        }
        for (auto f : io::split(*t, ',')) {
            double v;
            if (!io::parse_double(f, v)) {
                problems_.add("[" + name_ + "] '" + key + "': '" + std::string(f) + "' is not a number");
                continue;
            }
            out.push_back(v);
        }
        return out;
    }

    void reject_unknown() {
        if (!tree_) return;
        for (const auto& [k, v] : *tree_)
            if (!seen_.count(k)) problems_.add("[" + name_ + "] unknown key '" + k + "'");
    }

    Problems& problems() { return problems_; }
    const std::string& name() const { return name_; }

private:
    std::optional<double> parse(const std::string& key, const std::string& t) {
        double v;
        if (!io::parse_double(t, v)) {
            problems_.add("[" + name_ + "] '" + key + "': '" + t + "' is not a number");
            return std::nullopt;
        }
        return v;
    }

    std::string name_;
    const pt::ptree* tree_;
    Problems& problems_;
    RunConfig& cfg_;
    std::set<std::string> seen_;
};

inline void check(Problems& p, const std::string& section, const std::function<void()>& f) {
    try {
        f();
    } catch (const DomainError& e) {
        p.add("[" + section + "] " + e.what());
    }
}

} // namespace detail

/// Parse configuration text. '#' comment lines are accepted alongside ';'.
inline RunConfig parse(const std::string& text, const std::string& source = "<string>") {
    namespace pt = boost::property_tree;
    std::string cleaned;
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            const auto t = io::trim(line);
            if (!t.empty() && t.front() == '#')
                cleaned += ";" + line + "\n";
            else
                cleaned += line + "\n";
        }
    }
    pt::ptree tree;
    try {
        std::istringstream in(cleaned);
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
    }

    RunConfig cfg;
    cfg.source = source;
    detail::Problems problems;
    auto child = [&](const std::string& name) -> const pt::ptree* {
        auto it = tree.find(name);
        return it == tree.not_found() ? nullptr : &it->second;
    };
    for (const auto& [name, sub] : tree) {
        if (sub.empty() && !sub.data().empty()) {
            problems.add("key '" + name + "' outside any section");
            continue;
        }
        const bool known = name == "apparatus" || name == "spdc" || name == "laser" || name == "entanglement" ||
                           name == "uncertainty" || name == "simulate" || name.rfind("sample ", 0) == 0;
        if (!known) problems.add("unknown section [" + name + "]");
    }

    // [apparatus] and [spdc]
    {
        detail::Section ap("apparatus", child("apparatus"), problems, cfg);
        detail::Section sp("spdc", child("spdc"), problems, cfg);
        if (!ap.present()) problems.add("missing section [apparatus]");
        if (!sp.present()) problems.add("missing section [spdc]");
        auto& a = cfg.apparatus;
        a.rep_rate_hz = ap.number("rep_rate_per_s");
        a.cuvette_length_cm = ap.number("cuvette_length_cm");
        a.collection.kappa_max = ap.number("kappa_max");
        a.collection.alpha_per_mm = ap.number("alpha_per_mm");
        a.collection.z0_mm = ap.number("z0_mm");
        a.path_transmittance = ap.number("transmittance");
        a.F_LB_cnt_per_s = ap.number("F_LB_cnt_per_s");
        const auto wl = ap.optional_number("wavelength_nm");
        const auto e = ap.optional_number("photon_energy_J");
        if (wl && e) problems.add("[apparatus] give wavelength_nm or photon_energy_J, not both");
        else if (wl) a.photon_energy_J = *wl > 0.0 ? units::photon_energy_J(*wl) : 0.0;
        else if (e) a.photon_energy_J = *e;
        else problems.add("[apparatus] missing key 'wavelength_nm' (or 'photon_energy_J')");
        ap.reject_unknown();

        a.beam_fwhm_x0_um = sp.number("fwhm_x0_um");
        a.beam_fwhm_y0_um = sp.number("fwhm_y0_um");
        a.rayleigh_mm = sp.number("rayleigh_mm");
        a.pulse_fwhm_fs = sp.number("tau_fs");
        const auto q = sp.optional_number("photon_rate_per_s");
        const auto mu = sp.optional_number("mean_photon_number");
        if (q && mu) problems.add("[spdc] give photon_rate_per_s or mean_photon_number, not both");
        else if (q) a.photon_rate_per_s = *q;
        else if (mu) a.photon_rate_per_s = *mu * a.rep_rate_hz;
        else problems.add("[spdc] missing key 'photon_rate_per_s' (or 'mean_photon_number')");
        sp.reject_unknown();
        if (problems.empty()) detail::check(problems, "apparatus", [&] { validate(a); });
    }

    // [laser]
    if (child("laser")) {
        detail::Section ls("laser", child("laser"), problems, cfg);
        BeamProfile b;
        b.fwhm_x0_um = ls.number("fwhm_x0_um");
        b.fwhm_y0_um = ls.number("fwhm_y0_um");
        b.rayleigh_mm = ls.number("rayleigh_mm");
        b.pulse_fwhm_fs = ls.number("tau_fs");
        b.rep_rate_hz = cfg.apparatus.rep_rate_hz;
        b.photon_energy_J = cfg.apparatus.photon_energy_J;
        if (auto p = ls.optional_number("power_uW")) b.avg_power_W = *p * units::uW_to_W;
        ls.reject_unknown();
        if (problems.empty()) detail::check(problems, "laser", [&] { validate(b); });
        cfg.laser = b;
    }

    // [entanglement]
    if (child("entanglement")) {
        detail::Section en("entanglement", child("entanglement"), problems, cfg);
        xsection::EntanglementParams ep;
        ep.Te_fs = en.number("Te_fs");
        ep.Ae_cm2 = en.number("Ae_um2") * units::um2_to_cm2;
        const auto lo = en.optional_number("Ae_min_um2");
        const auto hi = en.optional_number("Ae_max_um2");
        if (lo.has_value() != hi.has_value()) problems.add("[entanglement] Ae_min_um2 and Ae_max_um2 go together");
        if (lo && hi) ep.Ae_bracket_cm2 = std::pair{*lo * units::um2_to_cm2, *hi * units::um2_to_cm2};
        en.reject_unknown();
        detail::check(problems, "entanglement", [&] { validate(ep); });
        cfg.entanglement = ep;
    }

    // [uncertainty]
    if (child("uncertainty")) {
        detail::Section un("uncertainty", child("uncertainty"), problems, cfg);
        auto& u = cfg.uncertainty;
        auto rel = [&](const char* key, double& dst) {
            if (auto v = un.optional_number(key)) {
                if (*v < 0.0) problems.add(std::string("[uncertainty] ") + key + " must be >= 0");
                dst = *v;
            }
        };
        rel("rel_F_LB", u.F_LB);
        rel("rel_transmittance", u.transmittance);
        rel("rel_photon_rate", u.photon_rate);
        rel("rel_concentration", u.concentration);
        rel("rel_overlap", u.overlap);
        rel("rel_kappa_max", u.kappa_max);
        rel("rel_alpha", u.alpha);
        rel("rel_z0", u.z0);
        rel("rel_rayleigh_spdc", u.rayleigh_spdc);
        rel("rel_rayleigh_laser", u.rayleigh_laser);
        rel("rel_beam_fwhm_laser", u.beam_fwhm_laser);
        rel("rel_tau_laser", u.tau_laser);
        rel("rel_power", u.power);
        if (auto k = un.optional_number("coverage_k")) {
            if (*k < 1.0) problems.add("[uncertainty] coverage_k must be >= 1");
            u.coverage_k = *k;
        }
        un.reject_unknown();
    }

    // [sample NAME], in file order
    for (const auto& [name, sub] : tree) {
        if (name.rfind("sample ", 0) != 0) continue;
        const std::string sname(io::trim(std::string_view(name).substr(7)));
        detail::Section sc(name, &sub, problems, cfg);
        SampleSpec s;
        s.name = sname;
        if (sname.empty()) problems.add("[" + name + "] sample name is empty");
        s.concentration_mol_per_L = sc.number("c_umol_per_L") * units::umol_to_mol;
        s.quantum_yield = sc.number("quantum_yield");
        s.spectral_overlap_ratio = sc.number("overlap_ratio");
        s.sigma_C_GM = sc.optional_number("sigma_C_GM");
        s.sigma_C_std_GM = sc.optional_number("sigma_C_std_GM");
        s.extinction_per_M_per_cm = sc.optional_number("extinction_per_M_per_cm");
        sc.reject_unknown();
        detail::check(problems, name, [&] { validate(s); });
        for (const auto& other : cfg.samples)
            if (other.name == s.name) problems.add("duplicate sample '" + s.name + "'");
        cfg.samples.push_back(s);
    }

    // [simulate]
    if (child("simulate")) {
        detail::Section si("simulate", child("simulate"), problems, cfg);
        SimulateSection sim;
        sim.sample = si.text("sample").value_or("");
        if (sim.sample.empty()) problems.add("[simulate] missing key 'sample'");
        sim.powers_uW = si.list("powers_uW");
        sim.integration_s = si.number("integration_s");
        sim.chopper_hz = si.number("chopper_hz");
        sim.background_cnt_per_s = si.number("background_cnt_per_s");
        const double seed = si.number("seed");
        if (seed < 0.0 || seed != std::floor(seed)) problems.add("[simulate] seed must be a non-negative integer");
        sim.seed = static_cast<std::uint64_t>(seed);
        sim.sigma_E_cm2 = si.optional_number("sigma_E_cm2");
        if (auto b = si.optional_number("bins_per_period")) sim.bins_per_period = static_cast<std::size_t>(*b);
        if (auto t = si.optional_number("transition_bins")) sim.transition_bins = static_cast<std::size_t>(*t);
        si.reject_unknown();
        cfg.simulate = sim;
    }

    if (!problems.empty()) problems.raise(source);
    return cfg;
}

inline RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

/// Simulation plan assembled from the [simulate] section.
inline sim::SimPlan make_plan(const RunConfig& cfg) {
    if (!cfg.simulate) throw ConfigError("config " + cfg.source + " has no [simulate] section");
    const auto& s = *cfg.simulate;
    sim::SimPlan p;
    p.sample = cfg.sample(s.sample);
    if (!p.sample.sigma_C_GM) throw ConfigError("[simulate] sample '" + s.sample + "' needs sigma_C_GM");
    p.apparatus = cfg.apparatus;
    p.beam = cfg.laser_beam();
    p.powers_uW = s.powers_uW;
    p.integration_s = s.integration_s;
    p.chopper_hz = s.chopper_hz;
    p.background_rate = s.background_cnt_per_s;
    p.rng_seed = s.seed;
    p.bins_per_period = s.bins_per_period;
    p.transition_bins = s.transition_bins;
    try {
        sim::validate(p);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("[simulate] ") + e.what());
    }
    return p;
}

} // namespace e2pa::config

#endif
