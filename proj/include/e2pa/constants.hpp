#ifndef E2PA_CONSTANTS_HPP
#define E2PA_CONSTANTS_HPP

// Physical constants and unit conversions. All internal computation is CGS
// plus seconds so that 1 GM = 1e-50 cm^4 s needs no further scaling.

#include <cmath>
#include <numbers>

namespace e2pa::constants {

inline constexpr double avogadro = 6.02214076e23;   // mol^-1
inline constexpr double planck = 6.62607015e-34;    // J s
inline constexpr double speed_of_light = 2.99792458e8; // m s^-1
inline constexpr double speed_of_light_nm_per_fs = 299.792458;
inline constexpr double goeppert_mayer = 1e-50;     // cm^4 s photon^-1

inline constexpr double ln2 = std::numbers::ln2;
inline constexpr double pi = std::numbers::pi;

// Gaussian FWHM = fwhm_per_sigma * standard deviation.
inline const double fwhm_per_sigma = 2.0 * std::sqrt(2.0 * ln2);

} // namespace e2pa::constants

namespace e2pa::units {

inline constexpr double um_to_cm = 1e-4;
inline constexpr double mm_to_cm = 0.1;
inline constexpr double nm_to_m = 1e-9;
inline constexpr double fs_to_s = 1e-15;
inline constexpr double ns_to_s = 1e-9;
inline constexpr double um2_to_cm2 = 1e-8;
inline constexpr double cm2_to_um2 = 1e8;
inline constexpr double uW_to_W = 1e-6;
inline constexpr double umol_to_mol = 1e-6;

inline constexpr double gm_to_cgs(double gm) { return gm * constants::goeppert_mayer; }
inline constexpr double cgs_to_gm(double cgs) { return cgs / constants::goeppert_mayer; }

inline double photon_energy_J(double wavelength_nm) {
    return constants::planck * constants::speed_of_light / (wavelength_nm * nm_to_m);
}

/// Angular frequency (rad/fs) of a vacuum wavelength in nm.
inline double wavelength_to_omega(double wavelength_nm) {
    return 2.0 * constants::pi * constants::speed_of_light_nm_per_fs / wavelength_nm;
}

inline double omega_to_wavelength(double omega_rad_per_fs) {
    return 2.0 * constants::pi * constants::speed_of_light_nm_per_fs / omega_rad_per_fs;
}

/// Linearized bandwidth conversion around a center wavelength.
inline double bandwidth_nm_to_omega(double fwhm_nm, double center_nm) {
    return 2.0 * constants::pi * constants::speed_of_light_nm_per_fs * fwhm_nm /
           (center_nm * center_nm);
}

} // namespace e2pa::units

#endif
