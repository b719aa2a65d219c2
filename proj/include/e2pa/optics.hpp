#ifndef E2PA_OPTICS_HPP
#define E2PA_OPTICS_HPP

// Gaussian beam geometry, peak photon flux, the erfc collection model and
// the one-photon fluorescence calibration of the collection efficiency.

#include "e2pa/constants.hpp"
#include "e2pa/error.hpp"
#include "e2pa/types.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace e2pa {

enum class Axis { x, y };

struct BeamProfile {
    double fwhm_x0_um = 0.0;
    double fwhm_y0_um = 0.0;
    double rayleigh_mm = 0.0;
    double pulse_fwhm_fs = 0.0;
    double rep_rate_hz = 0.0;
    double photon_energy_J = 0.0;
    std::optional<double> avg_power_W;
    std::optional<double> photon_rate_per_s;

    /// Photon rate Q, from the power when no rate is given.
    double photon_rate() const {
        if (photon_rate_per_s) return *photon_rate_per_s;
        if (avg_power_W) return *avg_power_W / photon_energy_J;
        throw DomainError("beam: neither photon rate nor average power is set");
    }

    double mean_photon_number() const { return photon_rate() / rep_rate_hz; }

    BeamProfile with_power(double watts) const {
        BeamProfile b = *this;
        b.avg_power_W = watts;
        b.photon_rate_per_s.reset();
        return b;
    }

    BeamProfile with_photon_rate(double q) const {
        BeamProfile b = *this;
        b.photon_rate_per_s = q;
        b.avg_power_W.reset();
        return b;
    }
};

inline void validate(const BeamProfile& b) {
    detail::require(b.fwhm_x0_um > 0.0 && b.fwhm_y0_um > 0.0, "beam: FWHM must be positive");
    detail::require(b.rayleigh_mm > 0.0, "beam: Rayleigh range must be positive");
    detail::require(b.pulse_fwhm_fs > 0.0, "beam: pulse duration must be positive");
    detail::require(b.rep_rate_hz > 0.0, "beam: rep rate must be positive");
    detail::require(b.photon_energy_J > 0.0, "beam: photon energy must be positive");
    if (b.avg_power_W) detail::require(*b.avg_power_W >= 0.0, "beam: power must be >= 0");
    if (b.photon_rate_per_s) detail::require(*b.photon_rate_per_s >= 0.0, "beam: photon rate must be >= 0");
    if (b.avg_power_W && b.photon_rate_per_s) {
        const double q = *b.avg_power_W / b.photon_energy_J;
        if (std::abs(q - *b.photon_rate_per_s) > 1e-6 * std::max(q, *b.photon_rate_per_s))
            throw DomainError("beam: photon rate disagrees with power / photon energy");
    }
}

/// The SPDC beam described by the apparatus fields.
inline BeamProfile spdc_beam(const ApparatusSpec& a) {
    BeamProfile b;
    b.fwhm_x0_um = a.beam_fwhm_x0_um;
    b.fwhm_y0_um = a.beam_fwhm_y0_um;
    b.rayleigh_mm = a.rayleigh_mm;
    b.pulse_fwhm_fs = a.pulse_fwhm_fs;
    b.rep_rate_hz = a.rep_rate_hz;
    b.photon_energy_J = a.photon_energy_J;
    b.photon_rate_per_s = a.photon_rate_per_s;
    return b;
}

inline double beam_fwhm_at(const BeamProfile& b, double z_mm, Axis axis) {
    const double w0 = axis == Axis::x ? b.fwhm_x0_um : b.fwhm_y0_um;
    const double r = z_mm / b.rayleigh_mm;
    return w0 * std::sqrt(1.0 + r * r);
}

/// A(z) = pi dx dy / (2 ln 2), cm^2.
inline double effective_area(const BeamProfile& b, double z_mm) {
    const double dx = beam_fwhm_at(b, z_mm, Axis::x) * units::um_to_cm;
    const double dy = beam_fwhm_at(b, z_mm, Axis::y) * units::um_to_cm;
    return constants::pi * dx * dy / (2.0 * constants::ln2);
}

/// T = tau / sqrt(2 ln 2), fs.
inline double effective_duration_fs(const BeamProfile& b) {
    return b.pulse_fwhm_fs / std::sqrt(2.0 * constants::ln2);
}

/// Peak photon flux at the center of the pulse on axis, photons cm^-2 s^-1:
/// Q (4 ln2 / pi)^(3/2) / (dx dy g tau).
inline double peak_flux(const BeamProfile& b, double z_mm = 0.0) {
    const double dx = beam_fwhm_at(b, z_mm, Axis::x) * units::um_to_cm;
    const double dy = beam_fwhm_at(b, z_mm, Axis::y) * units::um_to_cm;
    const double tau = b.pulse_fwhm_fs * units::fs_to_s;
    const double c = std::pow(4.0 * constants::ln2 / constants::pi, 1.5);
    return b.photon_rate() * c / (dx * dy * b.rep_rate_hz * tau);
}

/// 2 sqrt(2) mu / (T A). Larger than peak_flux by exactly sqrt(pi); kept as a
/// cross-check only.
inline double peak_flux_mode_form(const BeamProfile& b, double z_mm = 0.0) {
    const double T = effective_duration_fs(b) * units::fs_to_s;
    return 2.0 * std::sqrt(2.0) * b.mean_photon_number() / (T * effective_area(b, z_mm));
}

/// Peak flux per photon per pulse; the conversion between the two axes of a
/// flux-vs-mean-photon-number plot.
inline double flux_per_photon(const BeamProfile& b, double z_mm = 0.0) {
    return peak_flux(b.with_photon_rate(b.rep_rate_hz), z_mm);
}

/// Space-time photon flux of the central pulse, photons cm^-2 s^-1.
inline double flux_density(const BeamProfile& b, double x_um, double y_um, double z_mm, double t_fs) {
    const double dx = beam_fwhm_at(b, z_mm, Axis::x);
    const double dy = beam_fwhm_at(b, z_mm, Axis::y);
    const double q = 4.0 * constants::ln2;
    const double e = x_um * x_um / (dx * dx) + y_um * y_um / (dy * dy) +
                     t_fs * t_fs / (b.pulse_fwhm_fs * b.pulse_fwhm_fs);
    return peak_flux(b, z_mm) * std::exp(-q * e);
}

/// K(z) = kappa_max/2 erfc(alpha (|z| - z0)), z in mm.
inline double collection_K(const CollectionModel& m, double z_mm) {
    return 0.5 * m.kappa_max * std::erfc(m.alpha_per_mm * (std::abs(z_mm) - m.z0_mm));
}

namespace detail {

inline constexpr double quad_tol = 1e-10;

// Integrate an even or piecewise-smooth integrand over [-h, h] (mm), splitting
// at 0 and at +/- the collection knee.
template <class F>
double integrate_symmetric_mm(F&& f, double half_mm, double knee_mm) {
    using boost::math::quadrature::gauss_kronrod;
    std::vector<double> cuts{-half_mm, 0.0, half_mm};
    if (knee_mm > 0.0 && knee_mm < half_mm) {
        cuts.push_back(-knee_mm);
        cuts.push_back(knee_mm);
    }
    std::sort(cuts.begin(), cuts.end());
    double sum = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i)
        sum += gauss_kronrod<double, 31>::integrate(f, cuts[i - 1], cuts[i], 15, quad_tol);
    return sum;
}

} // namespace detail

/// Integral of K(z) over [-h, h] in cm (h given in mm).
inline double integrate_K_cm(const CollectionModel& m, double half_width_mm) {
    detail::require(half_width_mm > 0.0, "integrate_K: half width must be positive");
    const double mm = detail::integrate_symmetric_mm([&](double z) { return collection_K(m, z); },
                                                     half_width_mm, m.z0_mm);
    return mm * units::mm_to_cm;
}

/// Line-average of K(z) over [-h, h].
inline double collection_line_average(const CollectionModel& m, double half_width_mm) {
    return integrate_K_cm(m, half_width_mm) / (2.0 * half_width_mm * units::mm_to_cm);
}

/// Integral of K(z)/(dx(z) dy(z)) over [-h, h], cm^-1.
inline double integrate_K_over_area_cm(const CollectionModel& m, const BeamProfile& b, double half_width_mm) {
    detail::require(half_width_mm > 0.0, "integrate_K_over_area: half width must be positive");
    auto f = [&](double z) {
        const double dx = beam_fwhm_at(b, z, Axis::x) * units::um_to_cm;
        const double dy = beam_fwhm_at(b, z, Axis::y) * units::um_to_cm;
        return collection_K(m, z) / (dx * dy);
    };
    return detail::integrate_symmetric_mm(f, half_width_mm, m.z0_mm) * units::mm_to_cm;
}

/// Excitations per photon 1 - 10^(-epsilon c l).
inline double excitations_per_photon(double epsilon_per_M_per_cm, double c_mol_per_L, double l_cm) {
    detail::require(epsilon_per_M_per_cm >= 0.0 && c_mol_per_L >= 0.0 && l_cm >= 0.0,
                    "excitations_per_photon: inputs must be non-negative");
    return -std::expm1(-epsilon_per_M_per_cm * c_mol_per_L * l_cm * std::log(10.0));
}

inline double excitations_per_photon_od(double od) {
    detail::require(od >= 0.0, "excitations_per_photon: optical density must be non-negative");
    return -std::expm1(-od * std::log(10.0));
}

/// One-photon fluorescence count rate for a given collection efficiency.
inline double one_photon_rate(double kappa, double od, double W, double hnu_J, double overlap_integral) {
    return kappa * excitations_per_photon_od(od) * (W / hnu_J) * overlap_integral;
}

/// kappa'_min = F1 / [(1 - 10^-OD) (W/h nu) int gamma Phi].
inline double calibrate_kappa_min(double F1_cnt_per_s, double od, double W, double hnu_J, double overlap_integral) {
    detail::require(F1_cnt_per_s >= 0.0, "calibrate_kappa_min: count rate must be >= 0");
    detail::require(od > 0.0, "calibrate_kappa_min: optical density must be positive");
    detail::require(W > 0.0 && hnu_J > 0.0 && overlap_integral > 0.0,
                    "calibrate_kappa_min: power, photon energy and overlap must be positive");
    return F1_cnt_per_s / (excitations_per_photon_od(od) * (W / hnu_J) * overlap_integral);
}

/// kappa'_max = kappa'_min / kappa_min(sim) * kappa_max(sim).
inline double rescale_kappa_max(double kappa_prime_min, double kappa_min_sim, double kappa_max_sim) {
    detail::require(kappa_prime_min > 0.0 && kappa_min_sim > 0.0 && kappa_max_sim > 0.0,
                    "rescale_collection: efficiencies must be positive");
    return kappa_prime_min / kappa_min_sim * kappa_max_sim;
}

/// Simulated collection model rescaled to a measured kappa'_min; alpha and z0 are kept.
inline CollectionModel rescale_collection(double kappa_prime_min, double kappa_min_sim, const CollectionModel& sim) {
    CollectionModel out = sim;
    out.kappa_max = rescale_kappa_max(kappa_prime_min, kappa_min_sim, sim.kappa_max);
    validate(out);
    return out;
}

} // namespace e2pa

#endif
