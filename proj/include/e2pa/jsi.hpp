#ifndef E2PA_JSI_HPP
#define E2PA_JSI_HPP

// Joint spectral intensity of a photon pair, quadratic dispersion, the
// transform to joint temporal intensity, and the timing metrics derived
// from it. Frequencies are angular, rad/fs; times are fs.

#include "e2pa/constants.hpp"
#include "e2pa/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

namespace e2pa::jsi {

enum class GridKind { wavelength_nm, omega_rad_per_fs };

/// JSI(s, i) stored row-major: row = signal index, column = idler index.
struct JointSpectrum {
    std::vector<double> grid_s;
    std::vector<double> grid_i;
    GridKind kind = GridKind::omega_rad_per_fs;
    std::vector<double> intensity;
    double pump_half_omega = 0.0;  // omega_P / 2, rad/fs

    std::size_t ns() const { return grid_s.size(); }
    std::size_t ni() const { return grid_i.size(); }
    double at(std::size_t is, std::size_t ii) const { return intensity[is * ni() + ii]; }
    double total() const { return std::accumulate(intensity.begin(), intensity.end(), 0.0); }
};

struct JointTemporal {
    std::vector<double> grid_ts;
    std::vector<double> grid_ti;
    std::vector<double> intensity;  // row-major as JointSpectrum

    std::size_t ns() const { return grid_ts.size(); }
    std::size_t ni() const { return grid_ti.size(); }
    double dt() const { return grid_ts[1] - grid_ts[0]; }
    double at(std::size_t is, std::size_t ii) const { return intensity[is * ni() + ii]; }
    double total() const { return std::accumulate(intensity.begin(), intensity.end(), 0.0); }
};

struct DispersionSpec {
    double gdd_fs2 = 0.0;
};

inline void validate(const JointSpectrum& j) {
    if (j.grid_s.size() < 2 || j.grid_i.size() < 2) throw DomainError("jsi: need at least two grid points per axis");
    if (j.intensity.size() != j.ns() * j.ni()) throw DomainError("jsi: intensity size does not match the grids");
    auto ascending = [](const std::vector<double>& g) {
        for (std::size_t k = 1; k < g.size(); ++k)
            if (!(g[k] > g[k - 1])) return false;
        return true;
    };
    if (!ascending(j.grid_s) || !ascending(j.grid_i)) throw DomainError("jsi: grids must be strictly ascending");
    for (double v : j.intensity)
        if (!(v >= 0.0)) throw DomainError("jsi: intensity must be non-negative and finite");
}

/// Wavelength from a fiber time-of-flight delay: ref + delay / (D L).
inline double tof_wavelength_map(double delay_ns, double dispersion_ns_per_nm_km, double length_km,
                                 double ref_wavelength_nm) {
    if (dispersion_ns_per_nm_km == 0.0 || length_km == 0.0)
        throw DomainError("tof_wavelength_map: dispersion times length must be nonzero");
    return ref_wavelength_nm + delay_ns / (dispersion_ns_per_nm_km * length_km);
}

/// FWHM of a sampled peak with linear interpolation between the samples that
/// bracket half maximum on each side of the global maximum.
inline double fwhm_linear(std::span<const double> y, double spacing) {
    if (y.size() < 3) throw NumericError("fwhm: profile too short");
    const auto imax = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    const double half = 0.5 * y[imax];
    if (!(half > 0.0)) throw NumericError("fwhm: profile has no positive peak");
    std::size_t l = imax;
    while (l > 0 && y[l - 1] > half) --l;
    std::size_t r = imax;
    while (r + 1 < y.size() && y[r + 1] > half) ++r;
    if (l == 0 || r + 1 == y.size()) throw NumericError("fwhm: profile never falls to half maximum");
    const double xl = static_cast<double>(l - 1) + (half - y[l - 1]) / (y[l] - y[l - 1]);
    const double xr = static_cast<double>(r) + (y[r] - half) / (y[r] - y[r + 1]);
    return (xr - xl) * spacing;
}

inline bool is_uniform(const std::vector<double>& g, double rel_tol = 1e-6) {
    const double d = (g.back() - g.front()) / static_cast<double>(g.size() - 1);
    for (std::size_t k = 1; k < g.size(); ++k)
        if (std::abs((g[k] - g[k - 1]) - d) > rel_tol * std::abs(d)) return false;
    return true;
}

inline std::vector<double> marginal_signal(const JointSpectrum& j) {
    std::vector<double> m(j.ns(), 0.0);
    for (std::size_t s = 0; s < j.ns(); ++s)
        for (std::size_t i = 0; i < j.ni(); ++i) m[s] += j.at(s, i);
    return m;
}

inline std::vector<double> marginal_idler(const JointSpectrum& j) {
    std::vector<double> m(j.ni(), 0.0);
    for (std::size_t s = 0; s < j.ns(); ++s)
        for (std::size_t i = 0; i < j.ni(); ++i) m[i] += j.at(s, i);
    return m;
}

/// Projection onto the sum index s + i. Meaningful on equal-spacing grids.
inline std::vector<double> sum_projection(const JointSpectrum& j) {
    std::vector<double> m(j.ns() + j.ni() - 1, 0.0);
    for (std::size_t s = 0; s < j.ns(); ++s)
        for (std::size_t i = 0; i < j.ni(); ++i) m[s + i] += j.at(s, i);
    return m;
}

struct GridSpec {
    std::size_t n = 512;           // points per axis
    double extent_fwhm = 4.0;      // half-width of each axis in marginal FWHMs
};

/// Correlation that gives a sum-frequency FWHM w_plus for marginal FWHMs
/// ws and wi (all in the same frequency unit).
inline double anticorrelation_for_sum_fwhm(double ws, double wi, double w_plus) {
    const double rho = (ws * ws + wi * wi - w_plus * w_plus) / (2.0 * ws * wi);
    if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("anticorrelation_for_sum_fwhm: sum width not reachable");
    return rho;
}

/// Gaussian JSI on a uniform angular-frequency grid centered on the
/// degenerate frequency, with correlation -rho between signal and idler
/// detunings. At rho = 1 the sum-frequency width is floored at one grid cell.
inline JointSpectrum synthesize_gaussian_jsi(double center_nm, double fwhm_s_nm, double fwhm_i_nm,
                                             double anticorrelation, GridSpec grid = {}) {
    e2pa::detail::require(center_nm > 0.0, "synthesize_gaussian_jsi: center must be positive");
    e2pa::detail::require(fwhm_s_nm > 0.0 && fwhm_i_nm > 0.0, "synthesize_gaussian_jsi: FWHMs must be positive");
    e2pa::detail::require(anticorrelation >= 0.0 && anticorrelation <= 1.0,
                          "synthesize_gaussian_jsi: anticorrelation must lie in [0,1]");
    e2pa::detail::require(grid.n >= 8 && grid.extent_fwhm > 0.0, "synthesize_gaussian_jsi: bad grid");

    const double w0 = units::wavelength_to_omega(center_nm);
    const double ws = units::bandwidth_nm_to_omega(fwhm_s_nm, center_nm);
    const double wi = units::bandwidth_nm_to_omega(fwhm_i_nm, center_nm);
    const double d = 2.0 * grid.extent_fwhm * std::max(ws, wi) / static_cast<double>(grid.n);
    if (std::min(ws, wi) / d < 16.0) {
        std::ostringstream os;
        os << "synthesize_gaussian_jsi: grid resolves the narrower marginal with only " << std::min(ws, wi) / d
           << " points per FWHM (need 16)";
        throw DomainError(os.str());
    }
    if (w0 - d * static_cast<double>(grid.n / 2) <= 0.0)
        throw DomainError("synthesize_gaussian_jsi: grid extends to non-positive frequency");

    const double ss = ws / constants::fwhm_per_sigma, si = wi / constants::fwhm_per_sigma;
    double cxx = ss * ss, cyy = si * si, cxy = -anticorrelation * ss * si;
    // Floor the narrow eigenvalue so the sum-frequency FWHM is at least one cell.
    {
        const double tr = cxx + cyy;
        const double disc = std::sqrt(0.25 * (cxx - cyy) * (cxx - cyy) + cxy * cxy);
        const double lmin = 0.5 * tr - disc;
        const double floor = 0.5 * std::pow(d / constants::fwhm_per_sigma, 2);
        if (lmin < floor) {
            const double lmax = 0.5 * tr + disc;
            // Eigenvector of the small eigenvalue.
            double vx = cxy, vy = lmin - cxx;
            if (std::abs(vx) + std::abs(vy) < 1e-300) {
                vx = cxx <= cyy ? 1.0 : 0.0;
                vy = 1.0 - vx;
            }
            const double nrm = std::hypot(vx, vy);
            vx /= nrm;
            vy /= nrm;
            cxx = floor * vx * vx + lmax * vy * vy;
            cyy = floor * vy * vy + lmax * vx * vx;
            cxy = (floor - lmax) * vx * vy;
        }
    }
    const double det = cxx * cyy - cxy * cxy;
    const double pxx = cyy / det, pyy = cxx / det, pxy = -cxy / det;

    JointSpectrum j;
    j.kind = GridKind::omega_rad_per_fs;
    j.pump_half_omega = w0;
    j.grid_s.resize(grid.n);
    for (std::size_t k = 0; k < grid.n; ++k)
        j.grid_s[k] = w0 + d * (static_cast<double>(k) - static_cast<double>(grid.n / 2));
    j.grid_i = j.grid_s;
    j.intensity.resize(grid.n * grid.n);
    for (std::size_t s = 0; s < grid.n; ++s) {
        const double x = j.grid_s[s] - w0;
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double y = j.grid_i[i] - w0;
            j.intensity[s * grid.n + i] = std::exp(-0.5 * (pxx * x * x + 2.0 * pxy * x * y + pyy * y * y));
        }
    }
    return j;
}

/// Intensity-weighted mean of (omega_s + omega_i)/2.
inline double centroid_half_sum(const JointSpectrum& j) {
    double m = 0.0, w = 0.0;
    for (std::size_t s = 0; s < j.ns(); ++s)
        for (std::size_t i = 0; i < j.ni(); ++i) {
            m += j.at(s, i) * 0.5 * (j.grid_s[s] + j.grid_i[i]);
            w += j.at(s, i);
        }
    if (!(w > 0.0)) throw NumericError("jsi: zero total intensity");
    return m / w;
}

namespace detail {

inline double interp_index(const std::vector<double>& g, double x, std::size_t& k) {
    auto it = std::upper_bound(g.begin(), g.end(), x);
    if (it == g.begin() || it == g.end()) {
        if (x == g.back()) {
            k = g.size() - 2;
            return 1.0;
        }
        k = g.size();
        return 0.0;
    }
    k = static_cast<std::size_t>(it - g.begin()) - 1;
    return (x - g[k]) / (g[k + 1] - g[k]);
}

} // namespace detail

/// Resample a wavelength-gridded JSI to a uniform angular-frequency grid with
/// n points per axis. Intensities carry the Jacobian lambda^2/(2 pi c) per axis.
inline JointSpectrum resample_to_omega(const JointSpectrum& j, std::size_t n = 0) {
    validate(j);
    if (j.kind == GridKind::omega_rad_per_fs) return j;
    if (n == 0) n = std::max(j.ns(), j.ni());
    const double c2pi = 2.0 * constants::pi * constants::speed_of_light_nm_per_fs;

    // Wavelength-space copy with the Jacobian applied, then bilinear in lambda.
    std::vector<double> wl(j.intensity.size());
    for (std::size_t s = 0; s < j.ns(); ++s)
        for (std::size_t i = 0; i < j.ni(); ++i)
            wl[s * j.ni() + i] = j.at(s, i) * (j.grid_s[s] * j.grid_s[s] / c2pi) * (j.grid_i[i] * j.grid_i[i] / c2pi);

    // One axis covering both photons, so sum and difference projections
    // see equal spacings.
    const double lo = units::wavelength_to_omega(std::max(j.grid_s.back(), j.grid_i.back()));
    const double hi = units::wavelength_to_omega(std::min(j.grid_s.front(), j.grid_i.front()));
    std::vector<double> axis(n);
    for (std::size_t k = 0; k < n; ++k) axis[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    JointSpectrum out;
    out.kind = GridKind::omega_rad_per_fs;
    out.grid_s = axis;
    out.grid_i = axis;
    out.intensity.assign(n * n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        std::size_t ks;
        const double fs = detail::interp_index(j.grid_s, units::omega_to_wavelength(out.grid_s[s]), ks);
        if (ks >= j.ns()) continue;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t ki;
            const double fi = detail::interp_index(j.grid_i, units::omega_to_wavelength(out.grid_i[i]), ki);
            if (ki >= j.ni()) continue;
            const auto v = [&](std::size_t a, std::size_t b) { return wl[a * j.ni() + b]; };
            out.intensity[s * n + i] = (1 - fs) * (1 - fi) * v(ks, ki) + fs * (1 - fi) * v(ks + 1, ki) +
                                       (1 - fs) * fi * v(ks, ki + 1) + fs * fi * v(ks + 1, ki + 1);
        }
    }
    out.pump_half_omega = j.pump_half_omega > 0.0 ? j.pump_half_omega : centroid_half_sum(out);
    return out;
}

namespace detail {

inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};

} // namespace detail

/// JSA = sqrt(JSI) exp(i beta/2 [(ws - wp/2)^2 + (wi - wp/2)^2]), zero-padded
/// by pad per axis, 2-D DFT, JTI = |JTA|^2 scaled so total mass is conserved.
/// Time spacing is 2 pi / (N pad d_omega).
inline JointTemporal apply_dispersion_and_transform(const JointSpectrum& jsi, const DispersionSpec& disp,
                                                    std::size_t pad = 2) {
    validate(jsi);
    if (jsi.kind != GridKind::omega_rad_per_fs)
        throw DomainError("apply_dispersion_and_transform: JSI is on a wavelength grid; resample to omega first");
    if (!is_uniform(jsi.grid_s) || !is_uniform(jsi.grid_i))
        throw DomainError("apply_dispersion_and_transform: non-uniform frequency grid; resample first");
    e2pa::detail::require(pad >= 1, "apply_dispersion_and_transform: pad must be >= 1");
    e2pa::detail::require(std::isfinite(disp.gdd_fs2), "apply_dispersion_and_transform: GDD must be finite");

    const std::size_t ns = jsi.ns(), ni = jsi.ni();
    const std::size_t ms = ns * pad, mi = ni * pad;
    const double dws = (jsi.grid_s.back() - jsi.grid_s.front()) / static_cast<double>(ns - 1);
    const double dwi = (jsi.grid_i.back() - jsi.grid_i.front()) / static_cast<double>(ni - 1);

    std::unique_ptr<fftw_complex, detail::FftwFree> buf(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ms * mi)));
    if (!buf) throw NumericError("apply_dispersion_and_transform: out of memory for the DFT buffer");
    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_plan_mutex());
        plan = fftw_plan_dft_2d(static_cast<int>(ms), static_cast<int>(mi), buf.get(), buf.get(), FFTW_FORWARD,
                                FFTW_ESTIMATE);
    }
    if (!plan) throw NumericError("apply_dispersion_and_transform: FFTW planning failed");

    fftw_complex* a = buf.get();
    std::fill_n(reinterpret_cast<double*>(a), 2 * ms * mi, 0.0);
    const double b = disp.gdd_fs2;
    const double wp2 = jsi.pump_half_omega;
    for (std::size_t s = 0; s < ns; ++s) {
        const double xs = jsi.grid_s[s] - wp2;
        for (std::size_t i = 0; i < ni; ++i) {
            const double xi = jsi.grid_i[i] - wp2;
            const double amp = std::sqrt(jsi.at(s, i));
            const double ph = 0.5 * b * (xs * xs + xi * xi);
            a[s * mi + i][0] = amp * std::cos(ph);
            a[s * mi + i][1] = amp * std::sin(ph);
        }
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(detail::fftw_plan_mutex());
        fftw_destroy_plan(plan);
    }

    JointTemporal out;
    const double dts = 2.0 * constants::pi / (static_cast<double>(ms) * dws);
    const double dti = 2.0 * constants::pi / (static_cast<double>(mi) * dwi);
    out.grid_ts.resize(ms);
    out.grid_ti.resize(mi);
    for (std::size_t k = 0; k < ms; ++k) out.grid_ts[k] = dts * (static_cast<double>(k) - static_cast<double>(ms / 2));
    for (std::size_t k = 0; k < mi; ++k) out.grid_ti[k] = dti * (static_cast<double>(k) - static_cast<double>(mi / 2));
    out.intensity.resize(ms * mi);
    const double scale = 1.0 / (static_cast<double>(ms) * static_cast<double>(mi));
    // fftshift while taking |.|^2.
    for (std::size_t s = 0; s < ms; ++s) {
        const std::size_t src_s = (s + ms - ms / 2) % ms;
        for (std::size_t i = 0; i < mi; ++i) {
            const std::size_t src_i = (i + mi - mi / 2) % mi;
            const auto& c = a[src_s * mi + src_i];
            out.intensity[s * mi + i] = (c[0] * c[0] + c[1] * c[1]) * scale;
        }
    }
    return out;
}

/// Projection onto t_s - t_i by index difference; element k is d = k - (ni - 1).
inline std::vector<double> difference_projection(const JointTemporal& j) {
    if (std::abs(j.grid_ts[1] - j.grid_ts[0] - (j.grid_ti[1] - j.grid_ti[0])) > 1e-9 * std::abs(j.dt()))
        throw DomainError("jti: signal and idler time spacings differ");
    std::vector<double> m(j.ns() + j.ni() - 1, 0.0);
    for (std::size_t s = 0; s < j.ns(); ++s) {
        const double* row = &j.intensity[s * j.ni()];
        for (std::size_t i = 0; i < j.ni(); ++i) m[s + (j.ni() - 1) - i] += row[i];
    }
    return m;
}

/// FWHM of the distribution of t_s - t_i, fs.
inline double entanglement_time(const JointTemporal& j) {
    const auto p = difference_projection(j);
    return fwhm_linear(p, j.dt());
}

enum class PhotonAxis { signal, idler };

inline double marginal_pulse_fwhm(const JointTemporal& j, PhotonAxis axis) {
    std::vector<double> m(axis == PhotonAxis::signal ? j.ns() : j.ni(), 0.0);
    for (std::size_t s = 0; s < j.ns(); ++s)
        for (std::size_t i = 0; i < j.ni(); ++i) m[axis == PhotonAxis::signal ? s : i] += j.at(s, i);
    const double dt = axis == PhotonAxis::signal ? j.grid_ts[1] - j.grid_ts[0] : j.grid_ti[1] - j.grid_ti[0];
    return fwhm_linear(m, dt);
}

/// Fraction of the JTI mass with |t_s - t_i| <= delta_t.
inline double coincidence_fraction(const JointTemporal& j, double delta_t_fs) {
    const auto p = difference_projection(j);
    const double dt = j.dt();
    const auto half = static_cast<std::ptrdiff_t>(std::floor(delta_t_fs / dt + 1e-9));
    const auto c = static_cast<std::ptrdiff_t>(j.ni() - 1);
    double in = 0.0;
    for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(0, c - half);
         k <= std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(p.size()) - 1, c + half); ++k)
        in += p[static_cast<std::size_t>(k)];
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    if (!(total > 0.0)) throw NumericError("coincidence_fraction: JTI has zero mass");
    return in / total;
}

/// Coincidences within |t_s - t_i| <= delta_t, reference over dispersed.
inline double coincidence_ratio(const JointTemporal& ref, const JointTemporal& disp, double delta_t_fs) {
    if (ref.grid_ts != disp.grid_ts || ref.grid_ti != disp.grid_ti)
        throw DomainError("coincidence_ratio: JTIs are on different grids");
    if (delta_t_fs < ref.dt() * (1.0 - 1e-9)) {
        std::ostringstream os;
        os << "coincidence_ratio: window " << delta_t_fs << " fs is finer than the grid spacing " << ref.dt() << " fs";
        throw DomainError(os.str());
    }
    const double d = coincidence_fraction(disp, delta_t_fs);
    if (!(d > 0.0)) throw NumericError("coincidence_ratio: dispersed JTI has no mass inside the window");
    return coincidence_fraction(ref, delta_t_fs) / d;
}

} // namespace e2pa::jsi

#endif
