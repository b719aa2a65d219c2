#ifndef E2PA_XSECTION_HPP
#define E2PA_XSECTION_HPP

// Forward fluorescence models for classical and entangled two-photon
// excitation, cross-section extraction, upper bounds and quantum advantage.

#include "e2pa/constants.hpp"
#include "e2pa/error.hpp"
#include "e2pa/optics.hpp"
#include "e2pa/stats.hpp"
#include "e2pa/types.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace e2pa::xsection {

/// R = 1/2 (sigma_E phi + 3 sigma_C phi^2), per fluorophore.
inline double e2pa_rate(double sigma_E_cm2, double sigma_C_GM, double phi) {
    e2pa::detail::require(sigma_E_cm2 >= 0.0 && sigma_C_GM >= 0.0 && phi >= 0.0, "e2pa_rate: inputs must be >= 0");
    return 0.5 * (sigma_E_cm2 * phi + 3.0 * units::gm_to_cgs(sigma_C_GM) * phi * phi);
}

/// Flux at which the linear and quadratic terms are equal.
inline double crossover_flux(double sigma_E_cm2, double sigma_C_GM) {
    e2pa::detail::require(sigma_C_GM > 0.0, "crossover_flux: sigma_C must be positive");
    return sigma_E_cm2 / (3.0 * units::gm_to_cgs(sigma_C_GM));
}

struct LossScaledRate {
    double linear = 0.0;     // 1/2 sigma_E T phi
    double quadratic = 0.0;  // 3/2 sigma_C phi^2
    double total() const { return linear + quadratic; }
};

/// Rate after a beamsplitter loss of transmittance T between crystal and sample.
inline LossScaledRate loss_scaled_rate(double sigma_E_cm2, double sigma_C_GM, double transmittance,
                                       double phi_sample) {
    e2pa::detail::require(transmittance > 0.0 && transmittance <= 1.0, "loss_scaled_rate: transmittance must lie in (0,1]");
    e2pa::detail::require(sigma_E_cm2 >= 0.0 && sigma_C_GM >= 0.0 && phi_sample >= 0.0,
                          "loss_scaled_rate: inputs must be >= 0");
    return {0.5 * sigma_E_cm2 * transmittance * phi_sample,
            1.5 * units::gm_to_cgs(sigma_C_GM) * phi_sample * phi_sample};
}

/// F_C / W^2 per GM of sigma_C, in cnt s^-1 uW^-2 GM^-1.
inline double c2pef_coefficient_per_GM(const SampleSpec& s, const ApparatusSpec& a, const BeamProfile& laser) {
    const double tau = laser.pulse_fwhm_fs * units::fs_to_s;
    const double hnu = laser.photon_energy_J;
    const double zint = integrate_K_over_area_cm(a.collection, laser, 0.5 * a.cuvette_length_cm / units::mm_to_cm);
    const double overlap = s.overlap_integral();
    if (!(zint > 0.0)) throw NumericError("c2pef: collection z-integral is zero");
    if (!(overlap > 0.0)) throw NumericError("c2pef: spectral overlap is zero");
    const double pre = std::sqrt(2.0) * std::pow(constants::ln2 / constants::pi, 1.5);
    const double per_W2 = pre * constants::goeppert_mayer * s.number_density_per_cm3() /
                          (tau * laser.rep_rate_hz * hnu * hnu) * zint * overlap;
    return per_W2 * units::uW_to_W * units::uW_to_W;
}

/// Classical two-photon fluorescence count rate at average power W (uW).
inline double c2pef_forward(const SampleSpec& s, const ApparatusSpec& a, const BeamProfile& laser, double W_uW) {
    if (!s.sigma_C_GM) throw DomainError("c2pef_forward: sample '" + s.name + "' has no sigma_C");
    e2pa::detail::require(W_uW >= 0.0, "c2pef_forward: power must be >= 0");
    return *s.sigma_C_GM * c2pef_coefficient_per_GM(s, a, laser) * W_uW * W_uW;
}

struct C2PAResult {
    UncertainValue sigma_C_GM;
    UncertainValue fit_slope;  // cnt s^-1 uW^-2
    std::optional<double> fit_exponent;

    bool exponent_accepted() const {
        return !fit_exponent || (*fit_exponent >= stats::exponent_gate_lo && *fit_exponent <= stats::exponent_gate_hi);
    }
};

/// Relative standard uncertainties of the apparatus and sample inputs.
struct UncertaintyBudget {
    double F_LB = 0.0;
    double transmittance = 0.0;
    double photon_rate = 0.0;
    double concentration = 0.0;
    double overlap = 0.0;
    double kappa_max = 0.0;
    double alpha = 0.0;
    double z0 = 0.0;
    double rayleigh_spdc = 0.0;
    double rayleigh_laser = 0.0;
    double beam_fwhm_laser = 0.0;
    double tau_laser = 0.0;
    double power = 0.0;
    double coverage_k = 2.0;
};

namespace detail {

inline UncertainValue rel(double value, double relative) { return UncertainValue(value, std::abs(value) * relative); }

} // namespace detail

/// Invert the forward model for sigma_C from the fitted F_C/W^2 slope. The
/// uncertainty combines the slope with the budget's apparatus terms.
inline C2PAResult extract_sigma_C(const UncertainValue& fit_slope, const SampleSpec& s, const ApparatusSpec& a,
                                  const BeamProfile& laser, const UncertaintyBudget& u = {},
                                  std::optional<double> fit_exponent = std::nullopt) {
    if (!(fit_slope.value > 0.0)) throw DomainError("extract_sigma_C: fit slope must be positive");
    const double coef = c2pef_coefficient_per_GM(s, a, laser);
    const double sigma = fit_slope.value / coef;

    // Elasticities of the z-integral; sigma_C scales as its inverse.
    const double half_mm = 0.5 * a.cuvette_length_cm / units::mm_to_cm;
    auto zint_with = [&](auto mutate) {
        return [&, mutate](double x) {
            CollectionModel m = a.collection;
            BeamProfile b = laser;
            mutate(m, b, x);
            return integrate_K_over_area_cm(m, b, half_mm);
        };
    };
    const double e_alpha = stats::elasticity(
        zint_with([](CollectionModel& m, BeamProfile&, double x) { m.alpha_per_mm = x; }), a.collection.alpha_per_mm);
    const double e_z0 =
        stats::elasticity(zint_with([](CollectionModel& m, BeamProfile&, double x) { m.z0_mm = x; }), a.collection.z0_mm);
    const double e_zr = stats::elasticity(
        zint_with([](CollectionModel&, BeamProfile& b, double x) { b.rayleigh_mm = x; }), laser.rayleigh_mm);
    const double e_w = stats::elasticity(
        zint_with([aspect = laser.fwhm_y0_um / laser.fwhm_x0_um](CollectionModel&, BeamProfile& b, double x) {
            b.fwhm_x0_um = x;
            b.fwhm_y0_um = x * aspect;
        }),
        laser.fwhm_x0_um);

    const std::vector<stats::PropagationTerm> terms{
        {fit_slope, 1.0},
        {detail::rel(1.0, u.concentration), -1.0},
        {detail::rel(1.0, u.overlap), -1.0},
        {detail::rel(1.0, u.kappa_max), -1.0},
        {detail::rel(1.0, u.tau_laser), 1.0},
        {detail::rel(1.0, u.power), -2.0},
        {detail::rel(1.0, u.alpha), -e_alpha},
        {detail::rel(1.0, u.z0), -e_z0},
        {detail::rel(1.0, u.rayleigh_laser), -e_zr},
        {detail::rel(1.0, u.beam_fwhm_laser), -e_w},
    };
    UncertainValue prop = stats::propagate(terms, u.coverage_k);
    C2PAResult r;
    r.sigma_C_GM = UncertainValue(sigma, prop.std_uncertainty / std::abs(prop.value) * sigma, u.coverage_k);
    r.fit_slope = fit_slope;
    r.fit_exponent = fit_exponent;
    return r;
}

/// T Q n int_{-zR}^{zR} K dz int gamma Phi: E2PEF counts per unit sigma_E
/// after the factor 1/2. Throws naming the first zero factor.
inline double e2pef_denominator(const SampleSpec& s, const ApparatusSpec& a) {
    if (!a.photon_rate_per_s) throw DomainError("e2pef: photon rate Q is not set");
    const std::pair<const char*, double> factors[] = {
        {"path transmittance", a.path_transmittance},
        {"photon rate Q", *a.photon_rate_per_s},
        {"number density n", s.number_density_per_cm3()},
        {"collection integral", integrate_K_cm(a.collection, a.rayleigh_mm)},
        {"spectral overlap", s.overlap_integral()},
    };
    double d = 1.0;
    for (auto [name, v] : factors) {
        if (!(v > 0.0)) throw NumericError(std::string("e2pef: zero factor in denominator: ") + name);
        d *= v;
    }
    return d;
}

/// sigma_E^UB = 2 F^LB / [T Q n int K dz int gamma Phi].
inline double sigma_E_upper_bound(const SampleSpec& s, const ApparatusSpec& a) {
    return 2.0 * a.F_LB_cnt_per_s / e2pef_denominator(s, a);
}

inline UncertainValue sigma_E_upper_bound_uncertain(const SampleSpec& s, const ApparatusSpec& a,
                                                    const UncertaintyBudget& u) {
    const double ub = sigma_E_upper_bound(s, a);
    auto kint = [&](auto mutate) {
        return [&, mutate](double x) {
            CollectionModel m = a.collection;
            double zr = a.rayleigh_mm;
            mutate(m, zr, x);
            return integrate_K_cm(m, zr);
        };
    };
    const double e_alpha =
        stats::elasticity(kint([](CollectionModel& m, double&, double x) { m.alpha_per_mm = x; }), a.collection.alpha_per_mm);
    const double e_z0 = stats::elasticity(kint([](CollectionModel& m, double&, double x) { m.z0_mm = x; }), a.collection.z0_mm);
    const double e_zr = stats::elasticity(kint([](CollectionModel&, double& zr, double x) { zr = x; }), a.rayleigh_mm);
    const std::vector<stats::PropagationTerm> terms{
        {detail::rel(1.0, u.F_LB), 1.0},
        {detail::rel(1.0, u.transmittance), -1.0},
        {detail::rel(1.0, u.photon_rate), -1.0},
        {detail::rel(1.0, u.concentration), -1.0},
        {detail::rel(1.0, u.overlap), -1.0},
        {detail::rel(1.0, u.kappa_max), -1.0},
        {detail::rel(1.0, u.alpha), -e_alpha},
        {detail::rel(1.0, u.z0), -e_z0},
        {detail::rel(1.0, u.rayleigh_spdc), -e_zr},
    };
    const UncertainValue p = stats::propagate(terms, u.coverage_k);
    return UncertainValue(ub, ub * p.std_uncertainty, u.coverage_k);
}

/// E2PEF count rate F_E = 1/2 sigma_E T Q n int K dz int gamma Phi.
inline double expected_e2pef(double sigma_E_cm2, const SampleSpec& s, const ApparatusSpec& a) {
    e2pa::detail::require(sigma_E_cm2 >= 0.0, "expected_e2pef: sigma_E must be >= 0");
    return 0.5 * sigma_E_cm2 * e2pef_denominator(s, a);
}

struct DiagonalPoint {
    double mu = 0.0;    // photons per pulse at the sample
    double flux = 0.0;  // peak photon flux, photons cm^-2 s^-1
    double rate = 0.0;  // cnt s^-1
};

/// Expected E2PEF along a sweep of mean photon number: a straight line of
/// unit slope on log-log axes.
inline std::vector<DiagonalPoint> e2pef_diagonal(double sigma_E_cm2, const SampleSpec& s, const ApparatusSpec& a,
                                                 const std::vector<double>& mus) {
    std::vector<DiagonalPoint> out;
    const BeamProfile beam = spdc_beam(a);
    for (double mu : mus) {
        ApparatusSpec at = a;
        at.photon_rate_per_s = mu * a.rep_rate_hz;
        out.push_back({mu, peak_flux(beam.with_photon_rate(*at.photon_rate_per_s)), expected_e2pef(sigma_E_cm2, s, at)});
    }
    return out;
}

/// sigma_E ~ sigma_C / (T_e A_e), cm^2.
inline double sigma_E_estimate(double sigma_C_GM, double Te_fs, double Ae_cm2) {
    if (!(Te_fs > 0.0) || !(Ae_cm2 > 0.0))
        throw DomainError("sigma_E_estimate: entanglement time and area must be positive");
    e2pa::detail::require(sigma_C_GM > 0.0, "sigma_E_estimate: sigma_C must be positive");
    return units::gm_to_cgs(sigma_C_GM) / (Te_fs * units::fs_to_s * Ae_cm2);
}

/// Entanglement area that makes sigma_C/(T_e A_e) equal to sigma_E, um^2.
inline double required_entanglement_area(double sigma_C_GM, double sigma_E_cm2, double Te_fs) {
    e2pa::detail::require(sigma_C_GM > 0.0 && sigma_E_cm2 > 0.0 && Te_fs > 0.0,
                          "required_entanglement_area: inputs must be positive");
    return units::gm_to_cgs(sigma_C_GM) / (sigma_E_cm2 * Te_fs * units::fs_to_s) * units::cm2_to_um2;
}

struct EntanglementParams {
    double Te_fs = 0.0;
    double Ae_cm2 = 0.0;
    std::optional<std::pair<double, double>> Ae_bracket_cm2;
};

inline void validate(const EntanglementParams& e) {
    e2pa::detail::require(e.Te_fs > 0.0 && e.Ae_cm2 > 0.0, "entanglement: T_e and A_e must be positive");
    if (e.Ae_bracket_cm2) {
        const auto [lo, hi] = *e.Ae_bracket_cm2;
        e2pa::detail::require(lo <= e.Ae_cm2 && e.Ae_cm2 <= hi, "entanglement: A_e outside its bracket");
    }
}

struct QuantumAdvantage {
    double value = 0.0;
    double W_min_uW = 0.0;      // laser power where C2PEF reaches F^LB
    double phi_min_C = 0.0;     // laser peak flux at that power
    double phi_spdc_max = 0.0;
};

/// Minimum classical flux that yields F^LB under the pure quadratic law,
/// divided by the maximum SPDC flux.
inline QuantumAdvantage quantum_advantage_UB(const SampleSpec& s, const ApparatusSpec& a, const BeamProfile& laser,
                                             double phi_spdc_max) {
    if (!s.sigma_C_GM) throw DomainError("quantum_advantage_UB: sample '" + s.name + "' has no sigma_C");
    e2pa::detail::require(phi_spdc_max > 0.0, "quantum_advantage_UB: SPDC flux must be positive");
    const double slope = *s.sigma_C_GM * c2pef_coefficient_per_GM(s, a, laser);
    QuantumAdvantage q;
    q.W_min_uW = std::sqrt(a.F_LB_cnt_per_s / slope);
    q.phi_min_C = peak_flux(laser.with_power(q.W_min_uW * units::uW_to_W));
    q.phi_spdc_max = phi_spdc_max;
    q.value = q.phi_min_C / phi_spdc_max;
    return q;
}

/// Laser power (uW) that gives a peak flux phi on axis at the focus.
inline double power_for_peak_flux(const BeamProfile& laser, double phi) {
    const double per_W = peak_flux(laser.with_power(1.0));
    return phi / per_W / units::uW_to_W;
}

} // namespace e2pa::xsection

#endif
