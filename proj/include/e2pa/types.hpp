#ifndef E2PA_TYPES_HPP
#define E2PA_TYPES_HPP

// Shared domain types: fluorophore samples, apparatus parameters, the
// parametric collection model and values carrying a standard uncertainty.

#include "e2pa/constants.hpp"
#include "e2pa/error.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace e2pa {

/// Fluorophores per cm^3 for a molar concentration in mol/L.
inline double number_density(double concentration_mol_per_L) {
    if (!(concentration_mol_per_L > 0.0))
        throw DomainError("number_density: concentration must be positive");
    return concentration_mol_per_L * constants::avogadro / 1000.0;
}

/// Position-dependent geometrical collection efficiency
/// K(z) = kappa_max/2 * erfc(alpha (|z| - z0)), z in mm.
struct CollectionModel {
    double kappa_max = 0.0;
    double alpha_per_mm = 0.0;
    double z0_mm = 0.0;
};

inline void validate(const CollectionModel& m) {
    detail::require(m.kappa_max > 0.0 && m.kappa_max < 1.0, "collection: kappa_max must lie in (0,1)");
    detail::require(m.alpha_per_mm > 0.0, "collection: alpha must be positive");
    detail::require(m.z0_mm > 0.0, "collection: z0 must be positive");
}

struct SampleSpec {
    std::string name;
    double concentration_mol_per_L = 0.0;
    double quantum_yield = 0.0;
    /// Integral of gamma(lambda) Phi(lambda) over the emission band divided by Phi.
    double spectral_overlap_ratio = 0.0;
    std::optional<double> sigma_C_GM;
    std::optional<double> sigma_C_std_GM;
    std::optional<double> extinction_per_M_per_cm;

    double number_density_per_cm3() const { return number_density(concentration_mol_per_L); }

    /// The collected-emission integral, Phi times the overlap ratio.
    double overlap_integral() const { return quantum_yield * spectral_overlap_ratio; }
};

inline void validate(const SampleSpec& s) {
    const std::string who = "sample '" + s.name + "': ";
    detail::require(s.concentration_mol_per_L > 0.0, who + "concentration must be positive");
    detail::require(s.quantum_yield > 0.0 && s.quantum_yield <= 1.0, who + "quantum yield must lie in (0,1]");
    detail::require(s.spectral_overlap_ratio > 0.0 && s.spectral_overlap_ratio < 1.0,
                    who + "spectral overlap ratio must lie in (0,1)");
    if (s.sigma_C_GM) detail::require(*s.sigma_C_GM > 0.0, who + "sigma_C must be positive");
    if (s.sigma_C_std_GM) detail::require(*s.sigma_C_std_GM >= 0.0, who + "sigma_C uncertainty must be >= 0");
    if (s.extinction_per_M_per_cm)
        detail::require(*s.extinction_per_M_per_cm > 0.0, who + "extinction must be positive");
}

/// Parameters of the entangled-excitation apparatus. The beam fields describe
/// the SPDC beam at the sample; the classical laser beam is a separate BeamProfile.
struct ApparatusSpec {
    double rep_rate_hz = 0.0;
    double pulse_fwhm_fs = 0.0;
    double beam_fwhm_x0_um = 0.0;
    double beam_fwhm_y0_um = 0.0;
    double rayleigh_mm = 0.0;
    double photon_energy_J = 0.0;
    double cuvette_length_cm = 0.0;
    CollectionModel collection;
    double path_transmittance = 0.0;
    std::optional<double> photon_rate_per_s;
    double F_LB_cnt_per_s = 0.0;
};

inline void validate(const ApparatusSpec& a) {
    detail::require(a.rep_rate_hz > 0.0, "apparatus: rep rate must be positive");
    detail::require(a.pulse_fwhm_fs > 0.0, "apparatus: pulse duration must be positive");
    detail::require(a.beam_fwhm_x0_um > 0.0 && a.beam_fwhm_y0_um > 0.0, "apparatus: beam FWHM must be positive");
    detail::require(a.rayleigh_mm > 0.0, "apparatus: Rayleigh range must be positive");
    detail::require(a.photon_energy_J > 0.0, "apparatus: photon energy must be positive");
    detail::require(a.cuvette_length_cm > 0.0, "apparatus: cuvette length must be positive");
    detail::require(a.path_transmittance > 0.0 && a.path_transmittance <= 1.0,
                    "apparatus: path transmittance must lie in (0,1]");
    if (a.photon_rate_per_s) detail::require(*a.photon_rate_per_s > 0.0, "apparatus: photon rate must be positive");
    detail::require(a.F_LB_cnt_per_s > 0.0, "apparatus: F_LB must be positive");
    validate(a.collection);
}

/// A value with its standard uncertainty and the coverage factor used to
/// report an expanded interval.
struct UncertainValue {
    double value = 0.0;
    double std_uncertainty = 0.0;
    double coverage_k = 2.0;

    UncertainValue() = default;
    UncertainValue(double v, double u = 0.0, double k = 2.0) : value(v), std_uncertainty(u), coverage_k(k) {
        detail::require(std_uncertainty >= 0.0, "uncertain value: standard uncertainty must be >= 0");
        detail::require(coverage_k >= 1.0, "uncertain value: coverage factor must be >= 1");
    }

    double expanded() const { return coverage_k * std_uncertainty; }

    /// Relative standard uncertainty; empty when the value is zero.
    std::optional<double> relative() const {
        if (value == 0.0) return std::nullopt;
        return std_uncertainty / std::abs(value);
    }

    std::optional<double> relative_expanded() const {
        auto r = relative();
        if (!r) return std::nullopt;
        return coverage_k * *r;
    }
};

} // namespace e2pa

#endif
