#include "e2pa/xsection.hpp"
#include "reference_inputs.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace e2pa;
using namespace e2pa::xsection;
namespace tp = e2pa::fixtures;

namespace {

UncertaintyBudget representative_budget() {
    UncertaintyBudget u;
    u.F_LB = 0.07;
    u.transmittance = 0.03;
    u.photon_rate = 0.04;
    u.concentration = 0.02;
    u.overlap = 0.04;
    u.kappa_max = 0.04;
    u.alpha = 0.02;
    u.z0 = 0.02;
    u.rayleigh_spdc = 0.04;
    u.rayleigh_laser = 0.04;
    u.beam_fwhm_laser = 0.03;
    u.tau_laser = 0.03;
    u.power = 0.05;
    return u;
}

} // namespace

TEST(E2paRate, LinearAndQuadraticTerms) {
    EXPECT_DOUBLE_EQ(e2pa_rate(0.0, 0.0, 1e20), 0.0);
    EXPECT_NEAR(e2pa_rate(1e-20, 0.0, 1e18), 0.5e-2, 1e-15);
    EXPECT_NEAR(e2pa_rate(0.0, 10.0, 1e20), 1.5 * 1e-49 * 1e40, 1e-22);
    const double phi = crossover_flux(3e-21, 10.0);
    EXPECT_NEAR(e2pa_rate(3e-21, 0.0, phi), e2pa_rate(0.0, 10.0, phi), 1e-12 * e2pa_rate(3e-21, 0.0, phi));
}

TEST(LossScaling, UnitTransmittanceMatchesRate) {
    const auto r = loss_scaled_rate(1e-21, 50.0, 1.0, 2e18);
    EXPECT_NEAR(r.total(), e2pa_rate(1e-21, 50.0, 2e18), 1e-12 * r.total());
}

TEST(LossScaling, LinearTermScalesAsTransmittanceSquared) {
    // phi_sample = T phi_xtal, so the linear term goes as T^2 at fixed crystal flux
    const double phi_xtal = 1e18;
    const auto a = loss_scaled_rate(1e-21, 0.0, 1.0, phi_xtal);
    const auto b = loss_scaled_rate(1e-21, 0.0, 0.5, 0.5 * phi_xtal);
    EXPECT_NEAR(b.linear / a.linear, 0.25, 1e-12);
}

TEST(C2pef, ZeroPowerAndMissingSigma) {
    EXPECT_DOUBLE_EQ(c2pef_forward(tp::af455(), tp::apparatus(), tp::laser(), 0.0), 0.0);
    auto s = tp::af455();
    s.sigma_C_GM.reset();
    EXPECT_THROW(c2pef_forward(s, tp::apparatus(), tp::laser(), 1.0), DomainError);
}

TEST(C2pef, Af455AtDetectionLimitFlux) {
    const double W = power_for_peak_flux(tp::laser(), 8.5e20);
    EXPECT_NEAR(c2pef_forward(tp::af455(), tp::apparatus(), tp::laser(), W), 0.22, 0.25 * 0.22);
}

TEST(ExtractSigmaC, RoundTripIsExact) {
    const auto s = tp::rh6g();
    const auto a = tp::apparatus();
    const auto l = tp::laser();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(1.0, 1e5);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        auto t = s;
        t.sigma_C_GM = u(rng);
        const double slope = c2pef_forward(t, a, l, 1.0);
        const auto r = extract_sigma_C(UncertainValue(slope, 0.0), s, a, l);
        worst = std::max(worst, std::abs(r.sigma_C_GM.value / *t.sigma_C_GM - 1.0));
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(ExtractSigmaC, LinearInSlope) {
    const auto a = extract_sigma_C(UncertainValue(1.0, 0.0), tp::rh6g(), tp::apparatus(), tp::laser());
    const auto b = extract_sigma_C(UncertainValue(2.0, 0.0), tp::rh6g(), tp::apparatus(), tp::laser());
    EXPECT_NEAR(b.sigma_C_GM.value, 2 * a.sigma_C_GM.value, 1e-12 * a.sigma_C_GM.value);
}

TEST(ExtractSigmaC, ExpandedUncertaintyFromBudget) {
    const auto r = extract_sigma_C(UncertainValue(10.0, 0.0), tp::rh6g(), tp::apparatus(), tp::laser(),
                                   representative_budget());
    const double rel = *r.sigma_C_GM.relative_expanded();
    EXPECT_GT(rel, 0.15);
    EXPECT_LT(rel, 0.40);
}

TEST(ExtractSigmaC, ExponentGate) {
    const auto ok = extract_sigma_C(UncertainValue(1.0), tp::rh6g(), tp::apparatus(), tp::laser(), {}, 2.01);
    const auto bad = extract_sigma_C(UncertainValue(1.0), tp::rh6g(), tp::apparatus(), tp::laser(), {}, 1.2);
    EXPECT_TRUE(ok.exponent_accepted());
    EXPECT_FALSE(bad.exponent_accepted());
}

TEST(UpperBound, ReferenceRowsWithinFifteenPercent) {
    for (const auto& row : tp::reference_rows())
        EXPECT_NEAR(sigma_E_upper_bound(row.sample, tp::apparatus()) / row.sigma_E_UB, 1.0, 0.15) << row.sample.name;
}

TEST(UpperBound, ExpectedRateAtBoundIsDetectionLimit) {
    for (const auto& row : tp::reference_rows()) {
        const double ub = sigma_E_upper_bound(row.sample, tp::apparatus());
        EXPECT_NEAR(expected_e2pef(ub, row.sample, tp::apparatus()), 0.22, 1e-12);
    }
}

TEST(UpperBound, ZeroFactorNamed) {
    auto a = tp::apparatus();
    a.photon_rate_per_s.reset();
    try {
        sigma_E_upper_bound(tp::fluorescein(), a);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("photon rate"), std::string::npos) << e.what();
    }
}

TEST(UpperBound, ExpandedUncertaintyNearTwentyFourPercent) {
    const auto v = sigma_E_upper_bound_uncertain(tp::fluorescein(), tp::apparatus(), representative_budget());
    EXPECT_NEAR(*v.relative_expanded(), 0.24, 0.03);
}

TEST(Estimate, ReferenceRowsWithinFivePercent) {
    for (const auto& row : tp::reference_rows())
        EXPECT_NEAR(sigma_E_estimate(*row.sample.sigma_C_GM, tp::Te_fs, tp::Ae_cm2) / row.sigma_E_est, 1.0, 0.05)
            << row.sample.name;
    EXPECT_THROW(sigma_E_estimate(13, 0.0, tp::Ae_cm2), DomainError);
}

TEST(EntanglementArea, LiteratureInversion) {
    EXPECT_NEAR(required_entanglement_area(9.9, 0.0099e-19, 140) * 1e9, 72.0, 0.05 * 72.0);
    EXPECT_NEAR(required_entanglement_area(9.9, 0.019e-19, 140) * 1e9, 38.0, 0.05 * 38.0);
    EXPECT_NEAR(required_entanglement_area(27.9, 2.02e-19, 100) * 1e9, 1.4, 0.05 * 1.4);
    EXPECT_NEAR(required_entanglement_area(27.9, 2.69e-19, 100) * 1e9, 1.0, 0.05 * 1.0);
}

TEST(EntanglementArea, InverseOfEstimate) {
    const double se = sigma_E_estimate(51.0, 1620.0, 2.1e-8);
    EXPECT_NEAR(required_entanglement_area(51.0, se, 1620.0), 2.1, 1e-12);
}

TEST(QuantumAdvantage, ReferenceRows) {
    const double phi = peak_flux(spdc_beam(tp::apparatus()));
    for (const auto& row : tp::reference_rows()) {
        const auto q = quantum_advantage_UB(row.sample, tp::apparatus(), tp::laser(), phi);
        EXPECT_NEAR(q.value / row.qa_UB, 1.0, 0.35) << row.sample.name;
        EXPECT_NEAR(c2pef_forward(row.sample, tp::apparatus(), tp::laser(), q.W_min_uW), 0.22, 1e-12);
    }
}

TEST(ExpectedE2pef, LiteratureCrossSections) {
    EXPECT_NEAR(expected_e2pef(2.4e-19, tp::r9s(), tp::apparatus()), 2.6e4, 0.2 * 2.6e4);
    EXPECT_NEAR(expected_e2pef(1.5e-21, tp::rh6g(), tp::apparatus()), 2.7e3, 0.2 * 2.7e3);
    EXPECT_DOUBLE_EQ(expected_e2pef(0.0, tp::rh6g(), tp::apparatus()), 0.0);
}

TEST(Diagonal, UnitSlopeOnLogLog) {
    const auto d = e2pef_diagonal(1e-21, tp::rh6g(), tp::apparatus(), {1, 10, 100});
    ASSERT_EQ(d.size(), 3u);
    EXPECT_NEAR(d[1].rate / d[0].rate, 10.0, 1e-9);
    EXPECT_NEAR(d[2].flux / d[1].flux, 10.0, 1e-9);
}
