#ifndef E2PA_SIM_HPP
#define E2PA_SIM_HPP

// Synthetic chopper-modulated Poisson count streams drawn from the forward
// models, and the analysis chain that turns them back into cross-sections.

#include "e2pa/error.hpp"
#include "e2pa/optics.hpp"
#include "e2pa/stats.hpp"
#include "e2pa/types.hpp"
#include "e2pa/xsection.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

namespace e2pa::sim {

struct SimPlan {
    SampleSpec sample;
    ApparatusSpec apparatus;
    BeamProfile beam;  // classical excitation beam
    std::vector<double> powers_uW;
    double integration_s = 30.0;
    double chopper_hz = 10.0;
    double background_rate = 0.0;  // cnt/s, present in both chopper phases
    std::uint64_t rng_seed = 1;
    std::size_t bins_per_period = 40;
    std::size_t transition_bins = 2;  // one after each chopper edge
};

inline void validate(const SimPlan& p) {
    e2pa::detail::require(p.integration_s > 0.0, "sim plan: integration time must be positive");
    e2pa::detail::require(p.chopper_hz > 0.0, "sim plan: chopper frequency must be positive");
    e2pa::detail::require(p.background_rate >= 0.0, "sim plan: background rate must be >= 0");
    e2pa::detail::require(p.bins_per_period >= 4 && p.bins_per_period % 2 == 0,
                          "sim plan: bins per period must be even and >= 4");
    e2pa::detail::require(p.transition_bins % 2 == 0 && p.transition_bins < p.bins_per_period / 2,
                          "sim plan: transition bins must be even and fewer than half a period");
    e2pa::detail::require(p.integration_s * p.chopper_hz >= 1.0, "sim plan: integration shorter than one chopper period");
    for (double w : p.powers_uW) e2pa::detail::require(w >= 0.0, "sim plan: powers must be >= 0");
}

/// FNV-1a over the canonical text of the plan; written into every series
/// so a fit can check it is looking at the plan it was given.
inline std::string plan_fingerprint(const SimPlan& p) {
    std::string text;
    char buf[64];
    auto add = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g;", v);
        text += buf;
    };
    text += p.sample.name + ";";
    add(p.sample.concentration_mol_per_L);
    add(p.sample.quantum_yield);
    add(p.sample.spectral_overlap_ratio);
    add(p.sample.sigma_C_GM.value_or(0.0));
    add(p.integration_s);
    add(p.chopper_hz);
    add(p.background_rate);
    add(static_cast<double>(p.rng_seed));
    add(static_cast<double>(p.bins_per_period));
    add(static_cast<double>(p.transition_bins));
    for (double w : p.powers_uW) add(w);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// One folded chopper-period histogram: the open half carries signal plus
/// background, the closed half background only, and the first bin(s) after
/// each edge see half the signal and are labeled transition.
inline CountSeries simulate_series(double signal_rate, double background_rate, double integration_s,
                                   double chopper_hz, std::size_t bins_per_period, std::size_t transition_bins,
                                   std::uint64_t seed, std::uint64_t stream) {
    const double period = 1.0 / chopper_hz;
    const auto folds = static_cast<std::uint64_t>(std::llround(integration_s * chopper_hz));
    const double width = period / static_cast<double>(bins_per_period);
    const std::size_t half = bins_per_period / 2;
    const std::size_t tr = transition_bins / 2;

    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::mt19937_64 rng(seq);

    CountSeries s;
    s.fold_count = folds;
    s.seed = seed;
    s.bin_edges_s.resize(bins_per_period + 1);
    for (std::size_t k = 0; k <= bins_per_period; ++k) s.bin_edges_s[k] = width * static_cast<double>(k);
    s.counts.resize(bins_per_period);
    s.phase.resize(bins_per_period);
    const double live = width * static_cast<double>(folds);
    for (std::size_t k = 0; k < bins_per_period; ++k) {
        const std::size_t in_half = k % half;
        const bool open = k < half;
        double rate = background_rate;
        if (in_half < tr) {
            s.phase[k] = ChopperPhase::transition;
            rate += 0.5 * signal_rate;
        } else {
            s.phase[k] = open ? ChopperPhase::signal : ChopperPhase::background;
            if (open) rate += signal_rate;
        }
        const double mean = rate * live;
        s.counts[k] = mean > 0.0 ? static_cast<std::uint64_t>(std::poisson_distribution<long long>(mean)(rng)) : 0;
    }
    return s;
}

/// One series per power, at rate c2pef_forward(W) during the open phase.
inline std::vector<CountSeries> simulate_c2pef_run(const SimPlan& p) {
    validate(p);
    std::vector<CountSeries> out;
    for (std::size_t k = 0; k < p.powers_uW.size(); ++k) {
        const double W = p.powers_uW[k];
        const double f = W > 0.0 ? xsection::c2pef_forward(p.sample, p.apparatus, p.beam, W) : 0.0;
        auto s = simulate_series(f, p.background_rate, p.integration_s, p.chopper_hz, p.bins_per_period,
                                 p.transition_bins, p.rng_seed, k);
        s.power_uW = W;
        out.push_back(std::move(s));
    }
    return out;
}

/// Entangled-excitation run at the apparatus photon rate; block selects an
/// independent random stream so repeated blocks do not share draws.
inline CountSeries simulate_e2pef_run(const SimPlan& p, double sigma_E_cm2, std::uint64_t block = 0) {
    validate(p);
    const double f = sigma_E_cm2 > 0.0 ? xsection::expected_e2pef(sigma_E_cm2, p.sample, p.apparatus) : 0.0;
    return simulate_series(f, p.background_rate, p.integration_s, p.chopper_hz, p.bins_per_period,
                           p.transition_bins, p.rng_seed, (std::uint64_t{1} << 40) + block);
}

struct C2PEFAnalysis {
    std::vector<stats::PowerPoint> points;
    std::optional<stats::PowerLawFit> power_law;
    stats::SlopeFit slope;
    xsection::C2PAResult result;
    std::vector<std::string> warnings;
};

/// Subtract background per series, fit the power law and the fixed-exponent
/// slope, and invert for sigma_C.
inline C2PEFAnalysis analyze_c2pef(const std::vector<CountSeries>& series, const SampleSpec& sample,
                                   const ApparatusSpec& app, const BeamProfile& laser,
                                   const xsection::UncertaintyBudget& u = {}, double transition_fraction = 0.05) {
    C2PEFAnalysis a;
    for (const auto& s : series) {
        if (!s.power_uW) throw DomainError("analyze_c2pef: series without a power");
        const auto r = stats::background_subtract(s, transition_fraction);
        a.points.push_back({*s.power_uW, r.rate, r.poisson_sigma > 0.0 ? r.poisson_sigma : 1.0 / r.signal_time_s});
    }
    try {
        a.power_law = stats::fit_power_law(a.points);
        for (auto& w : a.power_law->warnings) a.warnings.push_back(w);
    } catch (const Error& e) {
        a.warnings.push_back(std::string("power-law fit skipped: ") + e.what());
    }
    a.slope = stats::fit_quadratic_slope(a.points);
    if (!(a.slope.slope > 0.0)) throw NumericError("analyze_c2pef: fitted quadratic slope is not positive");
    std::optional<double> b;
    if (a.power_law) b = a.power_law->exponent_b;
    a.result = xsection::extract_sigma_C(UncertainValue(a.slope.slope, a.slope.sigma, u.coverage_k), sample, app, laser,
                                         u, b);
    return a;
}

} // namespace e2pa::sim

#endif
