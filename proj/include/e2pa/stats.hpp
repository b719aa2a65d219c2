#ifndef E2PA_STATS_HPP
#define E2PA_STATS_HPP

// Chopper background subtraction, power-law fits, the error-bar policy,
// Allan deviation, and first-order uncertainty propagation.

#include "e2pa/error.hpp"
#include "e2pa/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace e2pa {

enum class ChopperPhase { signal, background, transition };

inline const char* to_string(ChopperPhase p) {
    switch (p) {
    case ChopperPhase::signal: return "signal";
    case ChopperPhase::background: return "background";
    case ChopperPhase::transition: return "transition";
    }
    return "?";
}

/// Binned counts with a chopper phase label per bin. A folded histogram
/// (counts summed over fold_count chopper periods) has live time
/// width * fold_count per bin.
struct CountSeries {
    std::vector<double> bin_edges_s;
    std::vector<std::uint64_t> counts;
    std::vector<ChopperPhase> phase;
    std::uint64_t fold_count = 1;
    std::optional<double> power_uW;
    std::optional<std::uint64_t> seed;

    std::size_t size() const { return counts.size(); }
    double width(std::size_t i) const { return bin_edges_s[i + 1] - bin_edges_s[i]; }
    double live_time(std::size_t i) const { return width(i) * static_cast<double>(fold_count); }
    std::uint64_t total_counts() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }
};

inline void validate(const CountSeries& s) {
    if (s.bin_edges_s.size() != s.counts.size() + 1)
        throw DomainError("count series: need one more bin edge than bins");
    if (s.phase.size() != s.counts.size()) throw DomainError("count series: every bin needs a phase label");
    for (std::size_t i = 1; i < s.bin_edges_s.size(); ++i)
        if (!(s.bin_edges_s[i] > s.bin_edges_s[i - 1]))
            throw DomainError("count series: bin edges must be strictly ascending");
    if (s.fold_count == 0) throw DomainError("count series: fold count must be >= 1");
}

namespace stats {

struct SubtractedRate {
    double rate = 0.0;           // cnt/s
    double poisson_sigma = 0.0;  // cnt/s
    std::uint64_t signal_counts = 0;
    std::uint64_t background_counts = 0;
    double signal_time_s = 0.0;
    double background_time_s = 0.0;
    double discarded_fraction = 0.0;
};

/// Relabel bins on each side of every signal/background boundary as
/// transition until the requested fraction of bins is discarded.
inline std::vector<ChopperPhase> mark_transitions(std::span<const ChopperPhase> phase, double fraction) {
    std::vector<ChopperPhase> out(phase.begin(), phase.end());
    const std::size_t n = out.size();
    const auto budget = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    std::vector<std::size_t> boundaries;  // index of first bin after a change
    for (std::size_t i = 1; i < n; ++i)
        if (phase[i] != phase[i - 1]) boundaries.push_back(i);
    if (boundaries.empty() || budget == 0) return out;
    std::size_t dropped = 0;
    for (std::size_t depth = 0; dropped < budget && depth < n; ++depth) {
        bool any = false;
        for (std::size_t b : boundaries) {
            for (std::size_t idx : {b + depth, b >= depth + 1 ? b - depth - 1 : n}) {
                if (dropped >= budget || idx >= n || out[idx] == ChopperPhase::transition) continue;
                out[idx] = ChopperPhase::transition;
                ++dropped;
                any = true;
            }
        }
        if (!any) break;
    }
    return out;
}

/// Label unlabeled bins by rate: above 80% of the way from the closed level
/// to the open level is signal, below 20% is background, the rest transition.
inline std::vector<ChopperPhase> label_by_threshold(const CountSeries& s) {
    std::vector<double> r(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) r[i] = static_cast<double>(s.counts[i]) / s.live_time(i);
    if (r.empty()) throw DomainError("label_by_threshold: empty series");
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    double hi = 0, lo = 0;
    std::size_t nh = 0, nl = 0;
    for (double v : r) {
        if (v > mean) {
            hi += v;
            ++nh;
        } else {
            lo += v;
            ++nl;
        }
    }
    if (nh == 0) throw DomainError("label_by_threshold: series has no open phase");
    hi /= static_cast<double>(nh);
    lo = nl ? lo / static_cast<double>(nl) : 0.0;
    std::vector<ChopperPhase> out(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double f = (r[i] - lo) / (hi - lo);
        out[i] = f >= 0.8 ? ChopperPhase::signal : f <= 0.2 ? ChopperPhase::background : ChopperPhase::transition;
    }
    return out;
}

/// rate = S/t_S - B/t_B with Poisson sigma sqrt(S/t_S^2 + B/t_B^2). When the
/// series carries no transition bins, bins next to phase changes are
/// discarded up to transition_fraction.
inline SubtractedRate background_subtract(const CountSeries& series, double transition_fraction = 0.05) {
    validate(series);
    e2pa::detail::require(transition_fraction >= 0.0 && transition_fraction < 1.0,
                    "background_subtract: transition fraction must lie in [0,1)");
    std::vector<ChopperPhase> phase = series.phase;
    if (std::none_of(phase.begin(), phase.end(), [](ChopperPhase p) { return p == ChopperPhase::transition; }))
        phase = mark_transitions(phase, transition_fraction);

    SubtractedRate out;
    std::size_t discarded = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        switch (phase[i]) {
        case ChopperPhase::signal:
            out.signal_counts += series.counts[i];
            out.signal_time_s += series.live_time(i);
            break;
        case ChopperPhase::background:
            out.background_counts += series.counts[i];
            out.background_time_s += series.live_time(i);
            break;
        case ChopperPhase::transition: ++discarded; break;
        }
    }
    if (out.signal_time_s <= 0.0) throw DomainError("background_subtract: series has no signal-phase bins");
    if (out.background_time_s <= 0.0) throw DomainError("background_subtract: series has no background-phase bins");
    const double S = static_cast<double>(out.signal_counts);
    const double B = static_cast<double>(out.background_counts);
    const double tS = out.signal_time_s, tB = out.background_time_s;
    out.rate = S / tS - B / tB;
    out.poisson_sigma = std::sqrt(S / (tS * tS) + B / (tB * tB));
    out.discarded_fraction = static_cast<double>(discarded) / static_cast<double>(series.size());
    return out;
}

struct PowerPoint {
    double power_uW = 0.0;
    double rate = 0.0;
    double sigma = 0.0;
};

inline constexpr double exponent_gate_lo = 1.95;
inline constexpr double exponent_gate_hi = 2.05;

/// F = a W^b fitted in log-log space.
struct PowerLawFit {
    double amplitude_a = 0.0;
    double exponent_b = 0.0;
    /// Covariance of (a, b).
    std::array<std::array<double, 2>, 2> covariance{};
    /// Covariance of (ln a, b).
    std::array<std::array<double, 2>, 2> log_covariance{};
    std::vector<double> residuals;  // ln(rate) - ln(a W^b), per used point
    std::size_t points_used = 0;
    double chi2 = 0.0;
    std::vector<std::string> warnings;

    double sigma_a() const { return std::sqrt(covariance[0][0]); }
    double sigma_b() const { return std::sqrt(covariance[1][1]); }
    bool accepted() const { return exponent_b >= exponent_gate_lo && exponent_b <= exponent_gate_hi; }
};

namespace detail {

inline std::vector<PowerPoint> usable_points(std::span<const PowerPoint> pts, std::vector<std::string>& warnings) {
    std::vector<PowerPoint> out;
    for (const auto& p : pts) {
        if (!(p.rate > 0.0) || !(p.power_uW > 0.0)) {
            std::ostringstream os;
            os << "excluded point W=" << p.power_uW << " uW rate=" << p.rate << " (non-positive)";
            warnings.push_back(os.str());
            continue;
        }
        if (!(p.sigma > 0.0)) throw DomainError("fit: every point needs a positive sigma");
        out.push_back(p);
    }
    return out;
}

} // namespace detail

/// Weighted least squares of ln(rate) on ln(W), weights (rate/sigma)^2.
/// The covariance is the unscaled inverse normal matrix.
inline PowerLawFit fit_power_law(std::span<const PowerPoint> points) {
    PowerLawFit fit;
    const auto pts = detail::usable_points(points, fit.warnings);
    if (pts.size() < 3) throw DomainError("fit_power_law: fewer than 3 usable points");
    double Sw = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
    for (const auto& p : pts) {
        const double x = std::log(p.power_uW), y = std::log(p.rate);
        const double w = (p.rate / p.sigma) * (p.rate / p.sigma);
        Sw += w;
        Sx += w * x;
        Sy += w * y;
        Sxx += w * x * x;
        Sxy += w * x * y;
    }
    const double det = Sw * Sxx - Sx * Sx;
    if (!(det > 1e-12 * Sw * Sxx)) throw NumericError("fit_power_law: singular design (powers not distinct)");
    const double lna = (Sxx * Sy - Sx * Sxy) / det;
    const double b = (Sw * Sxy - Sx * Sy) / det;
    fit.amplitude_a = std::exp(lna);
    fit.exponent_b = b;
    fit.log_covariance = {{{Sxx / det, -Sx / det}, {-Sx / det, Sw / det}}};
    const double a = fit.amplitude_a;
    fit.covariance = {{{a * a * fit.log_covariance[0][0], a * fit.log_covariance[0][1]},
                       {a * fit.log_covariance[1][0], fit.log_covariance[1][1]}}};
    for (const auto& p : pts) {
        const double r = std::log(p.rate) - (lna + b * std::log(p.power_uW));
        fit.residuals.push_back(r);
        fit.chi2 += r * r * (p.rate / p.sigma) * (p.rate / p.sigma);
    }
    fit.points_used = pts.size();
    return fit;
}

struct SlopeFit {
    double slope = 0.0;  // cnt s^-1 uW^-2
    double sigma = 0.0;
    double chi2 = 0.0;
    std::size_t points_used = 0;
    std::vector<std::string> warnings;
};

/// Slope s of rate = s W^2 with the exponent held at 2; linear weighted
/// least squares with weights 1/sigma^2. Points with non-positive rate are
/// kept here since they carry information about s.
inline SlopeFit fit_quadratic_slope(std::span<const PowerPoint> points) {
    SlopeFit fit;
    double num = 0, den = 0;
    for (const auto& p : points) {
        if (!(p.sigma > 0.0)) throw DomainError("fit_quadratic_slope: every point needs a positive sigma");
        const double x = p.power_uW * p.power_uW;
        const double w = 1.0 / (p.sigma * p.sigma);
        num += w * x * p.rate;
        den += w * x * x;
        ++fit.points_used;
    }
    if (fit.points_used < 1 || !(den > 0.0)) throw DomainError("fit_quadratic_slope: no usable points");
    fit.slope = num / den;
    fit.sigma = 1.0 / std::sqrt(den);
    for (const auto& p : points) {
        const double r = (p.rate - fit.slope * p.power_uW * p.power_uW) / p.sigma;
        fit.chi2 += r * r;
    }
    return fit;
}

/// max(sample standard deviation, sqrt(N)/t) times k.
inline double error_bar(std::span<const double> measurements, std::uint64_t total_counts, double live_time_s,
                        double k = 2.0) {
    if (measurements.empty()) throw DomainError("error_bar: need at least one measurement");
    e2pa::detail::require(live_time_s > 0.0, "error_bar: live time must be positive");
    double sd = 0.0;
    if (measurements.size() > 1) {
        const double n = static_cast<double>(measurements.size());
        const double m = std::accumulate(measurements.begin(), measurements.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : measurements) ss += (v - m) * (v - m);
        sd = std::sqrt(ss / (n - 1.0));
    }
    const double poisson = std::sqrt(static_cast<double>(total_counts)) / live_time_s;
    return k * std::max(sd, poisson);
}

struct AllanPoint {
    double tau_s = 0.0;
    double deviation = 0.0;
    std::size_t clusters = 0;
};

struct AllanResult {
    std::vector<AllanPoint> points;
    std::vector<std::string> warnings;
};

/// Non-overlapping Allan deviation of an evenly spaced rate series sampled
/// every dt seconds. Each tau is rounded to a whole number of samples.
inline AllanResult allan_deviation(std::span<const double> rates, double dt_s, std::span<const double> taus_s) {
    e2pa::detail::require(dt_s > 0.0, "allan_deviation: sample spacing must be positive");
    if (rates.size() < 2) throw DomainError("allan_deviation: need at least two samples");
    AllanResult out;
    const double record = dt_s * static_cast<double>(rates.size());
    for (double tau : taus_s) {
        const auto m = static_cast<std::size_t>(std::llround(tau / dt_s));
        if (m < 1) {
            std::ostringstream os;
            os << "dropped tau=" << tau << " s (shorter than the sample spacing)";
            out.warnings.push_back(os.str());
            continue;
        }
        if (tau > record / 2.0 || 2 * m > rates.size()) {
            std::ostringstream os;
            os << "dropped tau=" << tau << " s (longer than half the record, " << record << " s)";
            out.warnings.push_back(os.str());
            continue;
        }
        const std::size_t k = rates.size() / m;
        std::vector<double> means(k);
        for (std::size_t c = 0; c < k; ++c) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += rates[c * m + j];
            means[c] = s / static_cast<double>(m);
        }
        double acc = 0.0;
        for (std::size_t c = 1; c < k; ++c) acc += (means[c] - means[c - 1]) * (means[c] - means[c - 1]);
        out.points.push_back({static_cast<double>(m) * dt_s, std::sqrt(0.5 * acc / static_cast<double>(k - 1)), k});
    }
    return out;
}

struct PropagationTerm {
    UncertainValue value;
    double power = 1.0;
};

/// Product of v_i^p_i with relative variance sum (p_i u_i / v_i)^2; the
/// coverage factor is attached to the result, not to the inputs.
inline UncertainValue propagate(std::span<const PropagationTerm> terms, double coverage_k = 2.0) {
    double product = 1.0;
    double rel_var = 0.0;
    bool zero = false;
    double zero_abs_u = 0.0;
    std::size_t zero_count = 0;
    for (const auto& t : terms) {
        const double v = t.value.value;
        if (v == 0.0) {
            if (t.power < 0.0) throw DomainError("propagate: zero value raised to a negative power");
            if (t.power == 0.0) continue;
            zero = true;
            ++zero_count;
            zero_abs_u = t.power == 1.0 ? t.value.std_uncertainty : 0.0;
            continue;
        }
        product *= std::pow(v, t.power);
        const double r = t.power * t.value.std_uncertainty / v;
        rel_var += r * r;
    }
    if (zero) return UncertainValue(0.0, zero_count == 1 ? zero_abs_u * std::abs(product) : 0.0, coverage_k);
    return UncertainValue(product, std::abs(product) * std::sqrt(rel_var), coverage_k);
}

inline UncertainValue propagate(std::initializer_list<PropagationTerm> terms, double coverage_k = 2.0) {
    return propagate(std::span<const PropagationTerm>(terms.begin(), terms.size()), coverage_k);
}

/// d ln f / d ln x by central differences.
inline double elasticity(const std::function<double(double)>& f, double x, double h = 1e-4) {
    e2pa::detail::require(x != 0.0, "elasticity: x must be nonzero");
    const double up = f(x * (1.0 + h)), dn = f(x * (1.0 - h));
    if (!(up > 0.0) || !(dn > 0.0)) throw NumericError("elasticity: function must be positive near x");
    return (std::log(up) - std::log(dn)) / (std::log1p(h) - std::log1p(-h));
}

} // namespace stats
} // namespace e2pa

#endif
