#ifndef E2PA_PHOTON_STATS_HPP
#define E2PA_PHOTON_STATS_HPP

// Photon-number statistics of coherent, thermal and squeezed-vacuum light,
// click detectors with non-paralyzing dead time, and the inversion from a
// measured click rate to a mean photon number per pulse.

#include "e2pa/constants.hpp"
#include "e2pa/error.hpp"

#include <cmath>
#include <numeric>
#include <span>
#include <sstream>
#include <utility>
#include <variant>
#include <vector>

namespace e2pa::photon_stats {

struct Coherent {};
struct Thermal {};
struct SqueezedVacuum {
    double mu = 0.0;  // photons per pulse
};
using LightSource = std::variant<Coherent, Thermal, SqueezedVacuum>;

/// Second-order coherence g2 of the source.
inline double g2_of_source(const LightSource& source) {
    struct Visitor {
        double operator()(Coherent) const { return 1.0; }
        double operator()(Thermal) const { return 2.0; }
        double operator()(SqueezedVacuum s) const {
            if (!(s.mu > 0.0)) throw DomainError("g2_of_source: squeezed vacuum needs mu > 0");
            return 3.0 + 1.0 / s.mu;
        }
    };
    return std::visit(Visitor{}, source);
}

/// Two-photon absorption rate kappa2 mu^2 g2.
inline double tpa_rate(double kappa2_per_s, double mu, double g2) {
    e2pa::detail::require(kappa2_per_s >= 0.0 && mu >= 0.0 && g2 >= 0.0, "tpa_rate: inputs must be non-negative");
    return kappa2_per_s * mu * mu * g2;
}

/// kappa2 = sigma_C / (2 T^2 A^2), in s^-1.
inline double kappa2_from_sigmaC(double sigma_C_GM, double T_eff_fs, double A_eff_cm2) {
    if (!(T_eff_fs > 0.0) || !(A_eff_cm2 > 0.0))
        throw DomainError("kappa2_from_sigmaC: effective duration and area must be positive");
    e2pa::detail::require(sigma_C_GM > 0.0, "kappa2_from_sigmaC: sigma_C must be positive");
    const double T = T_eff_fs * units::fs_to_s;
    return units::gm_to_cgs(sigma_C_GM) / (2.0 * T * T * A_eff_cm2 * A_eff_cm2);
}

/// Photon-number distribution truncated at n_max = probs.size() - 1.
struct PhotonNumberDist {
    std::vector<double> probs;
    double mu = 0.0;
    int modes = 1;

    std::size_t n_max() const { return probs.empty() ? 0 : probs.size() - 1; }
    double total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }
    double tail_mass() const { return std::max(0.0, 1.0 - total()); }
    double mean() const {
        double m = 0.0;
        for (std::size_t n = 0; n < probs.size(); ++n) m += static_cast<double>(n) * probs[n];
        return m;
    }
};

inline constexpr double default_tail_tolerance = 1e-9;

namespace detail {

// P(n+2)/P(n) = (n+1)/(n+2) * mu/(1+mu), starting from P(0) = (1+mu)^-1/2.
inline std::vector<double> smsv_probs(double mu, std::size_t n_max) {
    std::vector<double> p(n_max + 1, 0.0);
    const double x = mu / (1.0 + mu);
    p[0] = 1.0 / std::sqrt(1.0 + mu);
    for (std::size_t n = 0; n + 2 <= n_max; n += 2)
        p[n + 2] = p[n] * static_cast<double>(n + 1) / static_cast<double>(n + 2) * x;
    return p;
}

inline std::vector<double> convolve_truncated(std::span<const double> a, std::span<const double> b,
                                              std::size_t n_max) {
    std::vector<double> out(n_max + 1, 0.0);
    for (std::size_t i = 0; i < a.size() && i <= n_max; ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size() && i + j <= n_max; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

inline std::vector<double> convolve_power(const std::vector<double>& base, int m, std::size_t n_max) {
    std::vector<double> result(n_max + 1, 0.0);
    result[0] = 1.0;
    std::vector<double> sq = base;
    sq.resize(n_max + 1, 0.0);
    // Exponentiation by squaring keeps 100-mode convolutions cheap.
    while (m > 0) {
        if (m & 1) result = convolve_truncated(result, sq, n_max);
        m >>= 1;
        if (m > 0) sq = convolve_truncated(sq, sq, n_max);
    }
    return result;
}

inline void check_tail(const PhotonNumberDist& d, double tol, const char* who) {
    if (d.tail_mass() > tol) {
        std::ostringstream os;
        os << who << ": cutoff n_max=" << d.n_max() << " leaves tail mass " << d.tail_mass()
           << " > " << tol;
        throw NumericError(os.str());
    }
}

} // namespace detail

/// Single-mode squeezed vacuum distribution; odd photon numbers have zero weight.
inline PhotonNumberDist smsv_distribution(double mu, std::size_t n_max,
                                          double tail_tol = default_tail_tolerance) {
    e2pa::detail::require(mu > 0.0, "smsv_distribution: mu must be positive");
    e2pa::detail::require(n_max % 2 == 0, "smsv_distribution: n_max must be even");
    PhotonNumberDist d{detail::smsv_probs(mu, n_max), mu, 1};
    detail::check_tail(d, tail_tol, "smsv_distribution");
    return d;
}

/// Total photon number of M equally populated squeezed-vacuum modes.
inline PhotonNumberDist multimode_distribution(double mu_total, int modes, std::size_t n_max,
                                               double tail_tol = default_tail_tolerance) {
    e2pa::detail::require(mu_total > 0.0, "multimode_distribution: mu must be positive");
    e2pa::detail::require(modes >= 1, "multimode_distribution: need at least one mode");
    const auto single = detail::smsv_probs(mu_total / modes, n_max);
    PhotonNumberDist d{detail::convolve_power(single, modes, n_max), mu_total, modes};
    detail::check_tail(d, tail_tol, "multimode_distribution");
    return d;
}

/// Doubles the cutoff from 16 until the tail mass falls below tol.
inline PhotonNumberDist multimode_distribution_auto(double mu_total, int modes,
                                                    double tail_tol = default_tail_tolerance) {
    std::size_t n_max = 16;
    for (;;) {
        try {
            return multimode_distribution(mu_total, modes, n_max, tail_tol);
        } catch (const NumericError&) {
            if (n_max > (std::size_t{1} << 22)) throw;
            n_max *= 2;
        }
    }
}

inline PhotonNumberDist smsv_distribution_auto(double mu, double tail_tol = default_tail_tolerance) {
    return multimode_distribution_auto(mu, 1, tail_tol);
}

/// Click probability sum_n [1 - (1-eta)^n] P(n) for a single click detector.
inline double click_probability(const PhotonNumberDist& dist, double eta) {
    e2pa::detail::require(eta >= 0.0 && eta <= 1.0, "click_probability: efficiency must lie in [0,1]");
    double p = 0.0;
    double miss = 1.0;  // (1-eta)^n
    for (std::size_t n = 0; n < dist.probs.size(); ++n) {
        p += (1.0 - miss) * dist.probs[n];
        miss *= 1.0 - eta;
    }
    return p;
}

/// Closed form of the same sum through the generating function
/// E[s^n] = (1 + mu/M (1 - s^2))^(-M/2) with s = 1 - eta.
inline double click_probability_multimode(double mu_total, double eta, int modes) {
    e2pa::detail::require(mu_total >= 0.0, "click_probability_multimode: mu must be non-negative");
    e2pa::detail::require(eta >= 0.0 && eta <= 1.0, "click_probability_multimode: efficiency must lie in [0,1]");
    e2pa::detail::require(modes >= 1, "click_probability_multimode: need at least one mode");
    const double s = 1.0 - eta;
    const double m = static_cast<double>(modes);
    return -std::expm1(-0.5 * m * std::log1p(mu_total / m * (1.0 - s * s)));
}

struct DetectorModel {
    double efficiency = 1.0;
    double dead_time_ns = 0.0;
    double rep_rate_hz = 0.0;

    /// Whole laser pulses lost after each click.
    int dead_pulses() const {
        e2pa::detail::require(dead_time_ns >= 0.0 && rep_rate_hz > 0.0, "detector: invalid dead time or rep rate");
        return static_cast<int>(std::floor(dead_time_ns * units::ns_to_s * rep_rate_hz + 1e-9));
    }
};

/// Non-paralyzing dead-time correction P_corr = P_meas / (1 - N_dead P_meas).
inline double dead_time_correct(double p_meas, int dead_pulses) {
    e2pa::detail::require(p_meas >= 0.0 && p_meas <= 1.0, "dead_time_correct: probability must lie in [0,1]");
    e2pa::detail::require(dead_pulses >= 0, "dead_time_correct: N_dead must be >= 0");
    const double denom = 1.0 - dead_pulses * p_meas;
    if (!(denom > 0.0)) {
        std::ostringstream os;
        os << "dead_time_correct: detector saturated (P_meas=" << p_meas << ", N_dead=" << dead_pulses
           << ", limit 1/N_dead=" << 1.0 / dead_pulses << ")";
        throw SaturationError(os.str());
    }
    return p_meas / denom;
}

/// Inverse of dead_time_correct.
inline double dead_time_apply(double p_corr, int dead_pulses) {
    e2pa::detail::require(p_corr >= 0.0 && dead_pulses >= 0, "dead_time_apply: invalid input");
    return p_corr / (1.0 + dead_pulses * p_corr);
}

inline constexpr double invert_mu_lo = 1e-6;
inline constexpr double invert_mu_hi = 1e3;

/// Mean photon number per pulse that produces the given (dead-time corrected)
/// click probability. Bisection on [1e-6, 1e3]; the click probability is
/// strictly increasing in mu so the root is unique.
inline double invert_mu(double p_click_corr, double eta, int modes, double rel_tol = 1e-8) {
    e2pa::detail::require(p_click_corr > 0.0 && p_click_corr < 1.0, "invert_mu: click probability must lie in (0,1)");
    e2pa::detail::require(eta > 0.0 && eta <= 1.0, "invert_mu: efficiency must lie in (0,1]");
    double lo = invert_mu_lo;
    double hi = invert_mu_hi;
    const double p_lo = click_probability_multimode(lo, eta, modes);
    const double p_hi = click_probability_multimode(hi, eta, modes);
    if (p_click_corr >= p_hi) {
        std::ostringstream os;
        os << "invert_mu: click probability " << p_click_corr << " unreachable (maximum " << p_hi
           << " at mu=" << hi << ")";
        throw NumericError(os.str());
    }
    if (p_click_corr <= p_lo) return lo;
    while ((hi - lo) > rel_tol * lo) {
        const double mid = 0.5 * (lo + hi);
        if (click_probability_multimode(mid, eta, modes) < p_click_corr)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double operator()(double x) const { return intercept + slope * x; }
};

/// Ordinary least-squares line through (pump power, mu) pairs, evaluated at target power.
inline LinearFit fit_mu_line(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw DomainError("extrapolate_mu: need at least two points");
    const double n = static_cast<double>(points.size());
    double sx = 0, sy = 0;
    for (auto [x, y] : points) {
        sx += x;
        sy += y;
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (auto [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (!(sxx > 1e-12 * (mx * mx + 1.0))) throw NumericError("extrapolate_mu: singular design (powers not distinct)");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

inline double extrapolate_mu(std::span<const std::pair<double, double>> points, double target_power_uW) {
    return fit_mu_line(points)(target_power_uW);
}

/// Mean photon number delivered after a fractional loss between crystal and sample.
inline double mu_after_loss(double mu_xtal, double loss_fraction) {
    e2pa::detail::require(loss_fraction >= 0.0 && loss_fraction < 1.0, "mu_after_loss: loss must lie in [0,1)");
    return mu_xtal * (1.0 - loss_fraction);
}

} // namespace e2pa::photon_stats

#endif
