#include "e2pa/jsi.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>

using namespace e2pa;
using namespace e2pa::jsi;

namespace {

constexpr double center = 810.0;
constexpr double fwhm_nm = 76.0;
constexpr double sum_fwhm = 0.00425;  // rad/fs
constexpr double beta = 3700.0;       // fs^2

double marginal_omega() { return units::bandwidth_nm_to_omega(fwhm_nm, center); }

double fixture_rho() { return anticorrelation_for_sum_fwhm(marginal_omega(), marginal_omega(), sum_fwhm); }

JointSpectrum fixture(std::size_t n) { return synthesize_gaussian_jsi(center, fwhm_nm, fwhm_nm, fixture_rho(), {n, 4.0}); }

struct Transformed {
    JointSpectrum jsi;
    JointTemporal ref, disp;
};

const Transformed& fixture_1024() {
    static const Transformed t = [] {
        Transformed r{fixture(1024), {}, {}};
        r.ref = apply_dispersion_and_transform(r.jsi, {0.0}, 4);
        r.disp = apply_dispersion_and_transform(r.jsi, {beta}, 4);
        return r;
    }();
    return t;
}

// FWHM of t_s - t_i for a Gaussian JSI with detuning covariance S under
// the phase beta/2 (x^2 + y^2): |JTA|^2 ~ exp(-1/2 t^T Re(M^-1) t) with
// M = S^-1 / 4 - i beta/2.
double chirped_gaussian_Te(double sxx, double syy, double sxy, double b) {
    using C = std::complex<double>;
    const double det = sxx * syy - sxy * sxy;
    const C m11 = syy / det / 4.0 - C(0, b / 2), m22 = sxx / det / 4.0 - C(0, b / 2), m12 = -sxy / det / 4.0;
    const C md = m11 * m22 - m12 * m12;
    const double r11 = (m22 / md).real(), r22 = (m11 / md).real(), r12 = (-m12 / md).real();
    const double rd = r11 * r22 - r12 * r12;
    const double c11 = r22 / rd, c22 = r11 / rd, c12 = -r12 / rd;
    return constants::fwhm_per_sigma * std::sqrt(c11 + c22 - 2 * c12);
}

double fixture_oracle_Te(double b) {
    const double s = marginal_omega() / constants::fwhm_per_sigma;
    return chirped_gaussian_Te(s * s, s * s, -fixture_rho() * s * s, b);
}

} // namespace

TEST(TimeOfFlight, LinearMap) {
    EXPECT_DOUBLE_EQ(tof_wavelength_map(0.0, -0.114, 0.5, 810.0), 810.0);
    EXPECT_NEAR(tof_wavelength_map(-0.57, -0.114, 0.5, 810.0), 820.0, 1e-9);
    EXPECT_THROW(tof_wavelength_map(1.0, 0.0, 0.5, 810.0), DomainError);
}

TEST(Synthesis, SeparableAtZeroCorrelation) {
    const auto j = synthesize_gaussian_jsi(center, 79, 72, 0.0, {256, 4.0});
    const std::size_t c = 128;
    for (std::size_t s : {40u, 100u, 150u})
        for (std::size_t i : {60u, 128u, 200u})
            EXPECT_NEAR(j.at(s, i) * j.at(c, c), j.at(s, c) * j.at(c, i), 1e-12);
}

TEST(Synthesis, MarginalsReproduceInputs) {
    const auto j = synthesize_gaussian_jsi(center, 79, 72, 0.9, {512, 4.0});
    const double d = j.grid_s[1] - j.grid_s[0];
    EXPECT_NEAR(fwhm_linear(marginal_signal(j), d) / units::bandwidth_nm_to_omega(79, center), 1.0, 0.02);
    EXPECT_NEAR(fwhm_linear(marginal_idler(j), d) / units::bandwidth_nm_to_omega(72, center), 1.0, 0.02);
}

TEST(Synthesis, FullAnticorrelationSumWidthWithinTwoCells) {
    const auto j = synthesize_gaussian_jsi(center, 76, 76, 1.0, {256, 4.0});
    EXPECT_LE(fwhm_linear(sum_projection(j), 1.0), 2.0);
}

TEST(Synthesis, UnderResolvedGridRejected) {
    EXPECT_THROW(synthesize_gaussian_jsi(center, 76, 76, 0.5, {64, 4.0}), DomainError);
}

TEST(Synthesis, FixtureSumWidth) {
    // the sum peak is only a few cells wide; its second moment is still exact for a sampled Gaussian
    const auto j = fixture(1024);
    const auto m = sum_projection(j);
    double w = 0, mean = 0, var = 0;
    for (std::size_t k = 0; k < m.size(); ++k) {
        w += m[k];
        mean += m[k] * static_cast<double>(k);
    }
    mean /= w;
    for (std::size_t k = 0; k < m.size(); ++k) var += m[k] * std::pow(static_cast<double>(k) - mean, 2);
    const double d = j.grid_s[1] - j.grid_s[0];
    EXPECT_NEAR(std::sqrt(var / w) * d * constants::fwhm_per_sigma, sum_fwhm, 0.02 * sum_fwhm);
}

TEST(Transform, Parseval) {
    const auto& t = fixture_1024();
    EXPECT_NEAR(t.disp.total() / t.jsi.total(), 1.0, 1e-6);
    EXPECT_NEAR(t.ref.total() / t.jsi.total(), 1.0, 1e-6);
}

TEST(Transform, TransformLimitedSeparablePair) {
    const auto j = synthesize_gaussian_jsi(center, 10, 10, 0.0, {256, 4.0});
    const auto t = apply_dispersion_and_transform(j, {0.0}, 4);
    const double expect = 4 * constants::ln2 / units::bandwidth_nm_to_omega(10, center);
    EXPECT_NEAR(marginal_pulse_fwhm(t, PhotonAxis::signal) / expect, 1.0, 0.01);
    EXPECT_NEAR(marginal_pulse_fwhm(t, PhotonAxis::idler) / expect, 1.0, 0.01);
}

TEST(Transform, RejectsWavelengthAndNonUniformGrids) {
    JointSpectrum j;
    j.grid_s = {800, 805, 811};
    j.grid_i = {800, 805, 811};
    j.intensity.assign(9, 1.0);
    EXPECT_THROW(apply_dispersion_and_transform(j, {0.0}), DomainError);
    j.kind = GridKind::omega_rad_per_fs;
    try {
        apply_dispersion_and_transform(j, {0.0});
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("resample"), std::string::npos);
    }
}

TEST(EntanglementTime, FixtureNearReferenceValue) {
    EXPECT_NEAR(entanglement_time(fixture_1024().disp), 1620.0, 0.10 * 1620.0);
}

TEST(EntanglementTime, MatchesChirpedGaussianClosedForm) {
    const auto& t = fixture_1024();
    EXPECT_NEAR(entanglement_time(t.disp) / fixture_oracle_Te(beta), 1.0, 0.03);
    // chirp-dominated limit: beta times the difference-frequency FWHM
    const double s = marginal_omega() / constants::fwhm_per_sigma;
    const double diff_fwhm = constants::fwhm_per_sigma * s * std::sqrt(2 * (1 + fixture_rho()));
    EXPECT_NEAR(entanglement_time(t.disp) / (beta * diff_fwhm), 1.0, 0.05);
}

TEST(EntanglementTime, TransformLimitedBranchMatchesClosedForm) {
    const auto& t = fixture_1024();
    const double te0 = entanglement_time(t.ref);
    EXPECT_LT(te0, 50.0);
    // the zero-chirp peak spans a few DFT cells, so the check is at 10%
    EXPECT_NEAR(te0 / fixture_oracle_Te(0.0), 1.0, 0.10);
}

TEST(EntanglementTime, TimeReversalInvariant) {
    auto r = fixture_1024().disp;
    std::reverse(r.intensity.begin(), r.intensity.end());
    EXPECT_NEAR(entanglement_time(r), entanglement_time(fixture_1024().disp), 1e-9);
}

TEST(EntanglementTime, GridConvergence) {
    // half the frequency step doubles the time window
    const auto fine = synthesize_gaussian_jsi(center, fwhm_nm, fwhm_nm, fixture_rho(), {1024, 2.0});
    const auto t = apply_dispersion_and_transform(fine, {beta}, 4);
    EXPECT_NEAR(entanglement_time(t) / entanglement_time(fixture_1024().disp), 1.0, 0.02);
}

TEST(MarginalPulse, NearReferenceDuration) {
    const auto& t = fixture_1024();
    const double ts = marginal_pulse_fwhm(t.disp, PhotonAxis::signal);
    const double ti = marginal_pulse_fwhm(t.disp, PhotonAxis::idler);
    EXPECT_NEAR(ts, 1040.0, 0.15 * 1040.0);
    EXPECT_NEAR(ts, ti, t.disp.dt());
}

TEST(CoincidenceRatio, MonotoneAndApproachesOne) {
    const auto& t = fixture_1024();
    double prev = INFINITY;
    for (double w : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0, 5000.0}) {
        const double r = coincidence_ratio(t.ref, t.disp, w);
        EXPECT_LE(r, prev * (1 + 1e-12)) << w;
        prev = r;
    }
    EXPECT_NEAR(prev, 1.0, 1e-3);
}

TEST(CoincidenceRatio, OneFemtosecondWindowOrderOfMagnitude) {
    const auto& t = fixture_1024();
    const double r = coincidence_ratio(t.ref, t.disp, 1.0);
    EXPECT_GT(r, 95.0 / 2);
    EXPECT_LT(r, 95.0 * 2);
}

TEST(CoincidenceRatio, IdentityAndErrors) {
    const auto j = synthesize_gaussian_jsi(center, 76, 76, 0.9, {128, 4.0});
    const auto a = apply_dispersion_and_transform(j, {500.0}, 2);
    for (double w : {a.dt(), 10.0, 100.0}) EXPECT_DOUBLE_EQ(coincidence_ratio(a, a, w), 1.0);
    EXPECT_THROW(coincidence_ratio(a, a, 0.5 * a.dt()), DomainError);
    const auto b = apply_dispersion_and_transform(j, {500.0}, 4);
    EXPECT_THROW(coincidence_ratio(a, b, 100.0), DomainError);
}

TEST(Fwhm, DegenerateProfiles) {
    const std::vector<double> flat(10, 1.0);
    EXPECT_THROW(fwhm_linear(flat, 1.0), NumericError);
    const std::vector<double> zero(10, 0.0);
    EXPECT_THROW(fwhm_linear(zero, 1.0), NumericError);
    const std::vector<double> tri{0, 1, 2, 1, 0};
    EXPECT_DOUBLE_EQ(fwhm_linear(tri, 0.5), 1.0);
}

TEST(Resample, ConservesMassAndMarginalWidth) {
    // Gaussian in omega written out on a wavelength grid
    const double w0 = units::wavelength_to_omega(center);
    const double s = units::bandwidth_nm_to_omega(40, center) / constants::fwhm_per_sigma;
    JointSpectrum j;
    j.kind = GridKind::wavelength_nm;
    for (double l = 700.0; l <= 940.0; l += 0.5) j.grid_s.push_back(l);
    j.grid_i = j.grid_s;
    const double c2pi = 2 * constants::pi * constants::speed_of_light_nm_per_fs;
    for (double ls : j.grid_s)
        for (double li : j.grid_i) {
            const double x = units::wavelength_to_omega(ls) - w0, y = units::wavelength_to_omega(li) - w0;
            // I(lambda) = I(omega) d omega / d lambda
            j.intensity.push_back(std::exp(-0.5 * (x * x + y * y) / (s * s)) * (c2pi / (ls * ls)) * (c2pi / (li * li)));
        }
    const auto o = resample_to_omega(j, 512);
    const double dl = 0.5, dw = o.grid_s[1] - o.grid_s[0];
    EXPECT_NEAR(o.total() * dw * dw / (j.total() * dl * dl), 1.0, 2e-3);
    EXPECT_NEAR(fwhm_linear(marginal_signal(o), dw) / (s * constants::fwhm_per_sigma), 1.0, 0.01);
    EXPECT_NEAR(o.pump_half_omega, w0, 1e-3 * s);
}
