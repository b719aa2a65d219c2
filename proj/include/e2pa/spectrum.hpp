#ifndef E2PA_SPECTRUM_HPP
#define E2PA_SPECTRUM_HPP

#include "e2pa/error.hpp"

#include <algorithm>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace e2pa {

enum class SpectrumKind { emission, transmittance, reflectance, quantum_efficiency };

inline const char* to_string(SpectrumKind k) {
    switch (k) {
    case SpectrumKind::emission: return "emission";
    case SpectrumKind::transmittance: return "transmittance";
    case SpectrumKind::reflectance: return "reflectance";
    case SpectrumKind::quantum_efficiency: return "quantum_efficiency";
    }
    return "?";
}

/// Sampled spectrum on an ascending wavelength grid. Linear interpolation
/// inside the grid, zero outside it.
class Spectrum {
public:
    Spectrum(std::vector<double> wavelength_nm, std::vector<double> values, SpectrumKind kind)
        : wavelength_(std::move(wavelength_nm)), values_(std::move(values)), kind_(kind) {
        if (wavelength_.size() != values_.size())
            throw DomainError("spectrum: grid and value lengths differ");
        if (wavelength_.size() < 2) throw DomainError("spectrum: need at least two samples");
        for (std::size_t i = 1; i < wavelength_.size(); ++i)
            if (!(wavelength_[i] > wavelength_[i - 1]))
                throw DomainError("spectrum: wavelength grid must be strictly ascending");
        const bool bounded = kind_ != SpectrumKind::emission;
        for (double v : values_) {
            if (!(v >= 0.0)) throw DomainError("spectrum: values must be non-negative");
            if (bounded && v > 1.0)
                throw DomainError(std::string("spectrum: ") + to_string(kind_) + " values must lie in [0,1]");
        }
    }

    /// Flat spectrum over [lo, hi].
    static Spectrum constant(double lo_nm, double hi_nm, double value, SpectrumKind kind) {
        return Spectrum({lo_nm, hi_nm}, {value, value}, kind);
    }

    std::span<const double> wavelength_nm() const { return wavelength_; }
    std::span<const double> values() const { return values_; }
    SpectrumKind kind() const { return kind_; }
    double lo() const { return wavelength_.front(); }
    double hi() const { return wavelength_.back(); }

    double at(double lambda_nm) const {
        if (lambda_nm < lo() || lambda_nm > hi()) return 0.0;
        auto it = std::upper_bound(wavelength_.begin(), wavelength_.end(), lambda_nm);
        if (it == wavelength_.end()) return values_.back();
        const std::size_t j = static_cast<std::size_t>(it - wavelength_.begin());
        const std::size_t i = j - 1;
        const double f = (lambda_nm - wavelength_[i]) / (wavelength_[j] - wavelength_[i]);
        return values_[i] + f * (values_[j] - values_[i]);
    }

    /// Trapezoidal integral over the whole grid.
    double integral() const {
        double s = 0.0;
        for (std::size_t i = 1; i < wavelength_.size(); ++i)
            s += 0.5 * (values_[i] + values_[i - 1]) * (wavelength_[i] - wavelength_[i - 1]);
        return s;
    }

    Spectrum scaled(double factor) const {
        std::vector<double> v(values_);
        for (double& x : v) x *= factor;
        return Spectrum(wavelength_, std::move(v), kind_);
    }

    /// Resample onto a new ascending grid by linear interpolation.
    Spectrum resampled(std::vector<double> grid_nm) const {
        std::vector<double> v(grid_nm.size());
        std::transform(grid_nm.begin(), grid_nm.end(), v.begin(), [this](double l) { return at(l); });
        return Spectrum(std::move(grid_nm), std::move(v), kind_);
    }

private:
    std::vector<double> wavelength_;
    std::vector<double> values_;
    SpectrumKind kind_;
};

/// Scale a differential emission spectrum so its integral equals the total quantum yield.
inline Spectrum normalize_emission(const Spectrum& emission, double quantum_yield) {
    if (emission.kind() != SpectrumKind::emission)
        throw DomainError("normalize_emission: spectrum is not an emission spectrum");
    const double area = emission.integral();
    if (!(area > 0.0)) throw DomainError("normalize_emission: emission spectrum has zero area");
    return emission.scaled(quantum_yield / area);
}

/// Optical elements between the fluorophore and the detector.
struct CollectionChain {
    std::vector<Spectrum> filters_and_lenses;  // transmittances, multiplied
    std::optional<Spectrum> cuvette;           // transmittance; unity when absent
    Spectrum mirror_reflectance = Spectrum::constant(0.0, 1e6, 1.0, SpectrumKind::reflectance);
    Spectrum quantum_efficiency = Spectrum::constant(0.0, 1e6, 1.0, SpectrumKind::quantum_efficiency);
};

/// gamma(lambda): product of the chain transmittances, the cuvette
/// transmittance and the half-sum of direct and mirror-returned light,
/// times the detector QE.
inline double component_efficiency(const CollectionChain& chain, double lambda_nm) {
    double g = 1.0;
    for (const auto& s : chain.filters_and_lenses) g *= s.at(lambda_nm);
    const double tc = chain.cuvette ? chain.cuvette->at(lambda_nm) : 1.0;
    g *= tc * 0.5 * (1.0 + tc * tc * chain.mirror_reflectance.at(lambda_nm));
    return g * chain.quantum_efficiency.at(lambda_nm);
}

/// Integral of gamma(lambda) Phi(lambda) over [lo, hi] (defaults to the
/// emission grid). The emission spectrum must be normalized to the quantum
/// yield already and must cover the window; chain components are zero
/// outside their own grids.
inline double spectral_overlap(const Spectrum& emission, const CollectionChain& chain,
                               std::optional<double> lo_nm = std::nullopt,
                               std::optional<double> hi_nm = std::nullopt) {
    if (emission.kind() != SpectrumKind::emission)
        throw DomainError("spectral_overlap: first spectrum must be an emission spectrum");
    const double lo = lo_nm.value_or(emission.lo());
    const double hi = hi_nm.value_or(emission.hi());
    if (!(hi > lo)) throw DomainError("spectral_overlap: empty integration window");
    if (lo < emission.lo() || hi > emission.hi()) {
        std::ostringstream os;
        os << "spectral_overlap: emission spectrum does not cover ";
        if (lo < emission.lo()) os << "[" << lo << ", " << emission.lo() << "] nm";
        if (lo < emission.lo() && hi > emission.hi()) os << " and ";
        if (hi > emission.hi()) os << "[" << emission.hi() << ", " << hi << "] nm";
        throw DomainError(os.str());
    }

    // Union of every grid point inside the window.
    std::vector<double> grid{lo, hi};
    auto add = [&](const Spectrum& s) {
        for (double l : s.wavelength_nm())
            if (l > lo && l < hi) grid.push_back(l);
    };
    add(emission);
    for (const auto& s : chain.filters_and_lenses) add(s);
    if (chain.cuvette) add(*chain.cuvette);
    add(chain.mirror_reflectance);
    add(chain.quantum_efficiency);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double sum = 0.0;
    double prev = emission.at(grid[0]) * component_efficiency(chain, grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur = emission.at(grid[i]) * component_efficiency(chain, grid[i]);
        sum += 0.5 * (prev + cur) * (grid[i] - grid[i - 1]);
        prev = cur;
    }
    return sum;
}

} // namespace e2pa

#endif
