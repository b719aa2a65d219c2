#include "e2pa/sim.hpp"
#include "reference_inputs.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace e2pa;
namespace tp = e2pa::fixtures;

namespace {

sim::SimPlan rh6g_plan(double background, std::uint64_t seed) {
    sim::SimPlan p;
    p.sample = tp::rh6g();
    p.apparatus = tp::apparatus();
    p.beam = tp::laser();
    p.powers_uW = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    p.integration_s = 30.0;
    p.chopper_hz = 10.0;
    p.background_rate = background;
    p.rng_seed = seed;
    return p;
}

// signal-phase share of the period for the default 40 bins with 2 transition bins
constexpr double signal_share = 19.0 / 40.0;

} // namespace

TEST(SimPlan, Validation) {
    auto p = rh6g_plan(0.0, 1);
    p.integration_s = 0.0;
    EXPECT_THROW(sim::validate(p), DomainError);
    p = rh6g_plan(0.0, 1);
    p.bins_per_period = 7;
    EXPECT_THROW(sim::validate(p), DomainError);
    p = rh6g_plan(0.0, 1);
    p.integration_s = 0.01;
    EXPECT_THROW(sim::validate(p), DomainError);
}

TEST(SimPlan, FingerprintTracksSeed) {
    EXPECT_EQ(sim::plan_fingerprint(rh6g_plan(5, 1)), sim::plan_fingerprint(rh6g_plan(5, 1)));
    EXPECT_NE(sim::plan_fingerprint(rh6g_plan(5, 1)), sim::plan_fingerprint(rh6g_plan(5, 2)));
    EXPECT_EQ(sim::plan_fingerprint(rh6g_plan(5, 1)).size(), 16u);
}

TEST(SimulateC2pef, Deterministic) {
    const auto a = sim::simulate_c2pef_run(rh6g_plan(5, 7));
    const auto b = sim::simulate_c2pef_run(rh6g_plan(5, 7));
    const auto c = sim::simulate_c2pef_run(rh6g_plan(5, 8));
    ASSERT_EQ(a.size(), 10u);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].counts, b[k].counts);
    EXPECT_NE(a[9].counts, c[9].counts);
}

TEST(SimulateC2pef, ZeroBackgroundZeroPowerIsEmpty) {
    auto p = rh6g_plan(0.0, 3);
    p.powers_uW = {0.0};
    const auto s = sim::simulate_c2pef_run(p);
    ASSERT_EQ(s.size(), 1u);
    for (auto c : s[0].counts) EXPECT_EQ(c, 0u);
}

TEST(SimulateC2pef, PhaseLayout) {
    const auto s = sim::simulate_c2pef_run(rh6g_plan(5, 1))[0];
    ASSERT_EQ(s.size(), 40u);
    EXPECT_EQ(s.phase[0], ChopperPhase::transition);
    EXPECT_EQ(s.phase[1], ChopperPhase::signal);
    EXPECT_EQ(s.phase[20], ChopperPhase::transition);
    EXPECT_EQ(s.phase[21], ChopperPhase::background);
    EXPECT_EQ(s.fold_count, 300u);
    EXPECT_NEAR(s.bin_edges_s.back(), 0.1, 1e-12);
}

TEST(SimulateC2pef, FitRecoversQuadraticExponent) {
    const auto plan = rh6g_plan(0.0, 11);
    const auto a = sim::analyze_c2pef(sim::simulate_c2pef_run(plan), plan.sample, plan.apparatus, plan.beam);
    ASSERT_TRUE(a.power_law.has_value());
    EXPECT_NEAR(a.power_law->exponent_b, 2.0, 0.03);
    EXPECT_TRUE(a.result.exponent_accepted());
}

TEST(SimulateC2pef, EndToEndCalibration) {
    // planted 51 GM; the interval is statistical only (no systematic budget)
    int within_two_expanded = 0, within_one_std = 0;
    const int seeds = 100;
    for (int k = 0; k < seeds; ++k) {
        const auto plan = rh6g_plan(5.0, 1000 + static_cast<std::uint64_t>(k));
        const auto a = sim::analyze_c2pef(sim::simulate_c2pef_run(plan), plan.sample, plan.apparatus, plan.beam);
        const auto& v = a.result.sigma_C_GM;
        const double d = std::abs(v.value - 51.0);
        if (d <= 2.0 * v.expanded()) ++within_two_expanded;
        if (d <= v.std_uncertainty) ++within_one_std;
    }
    EXPECT_GE(within_two_expanded, 95);
    EXPECT_GE(within_one_std, 55);
    EXPECT_LE(within_one_std, 82);
}

TEST(SimulateE2pef, NullMeanIsZero) {
    auto plan = rh6g_plan(5.0, 21);
    plan.integration_s = 2700.0;
    std::vector<double> z;
    for (std::uint64_t b = 0; b < 200; ++b) {
        const auto r = stats::background_subtract(sim::simulate_e2pef_run(plan, 0.0, b));
        z.push_back(r.rate / r.poisson_sigma);
    }
    const double mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
    double var = 0.0;
    for (double x : z) var += (x - mean) * (x - mean);
    var /= static_cast<double>(z.size() - 1);
    EXPECT_NEAR(mean, 0.0, 3.0 / std::sqrt(200.0));
    EXPECT_NEAR(var, 1.0, 0.25);
}

TEST(SimulateE2pef, BlocksAreIndependent) {
    const auto plan = rh6g_plan(5.0, 21);
    EXPECT_NE(sim::simulate_e2pef_run(plan, 0.0, 0).counts, sim::simulate_e2pef_run(plan, 0.0, 1).counts);
    EXPECT_EQ(sim::simulate_e2pef_run(plan, 0.0, 1).counts, sim::simulate_e2pef_run(plan, 0.0, 1).counts);
}

TEST(SimulateE2pef, PowerAnalysisAtUpperBound) {
    // 45 minute run at the bound with a 1 cnt/s dark rate
    auto plan = rh6g_plan(1.0, 0);
    plan.sample = tp::fluorescein();
    plan.integration_s = 45 * 60.0;
    const double ub = xsection::sigma_E_upper_bound(plan.sample, plan.apparatus);
    int detected = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        plan.rng_seed = seed;
        const auto r = stats::background_subtract(sim::simulate_e2pef_run(plan, ub));
        if (r.rate > 2.0 * r.poisson_sigma) ++detected;
    }
    EXPECT_GE(detected, 90);
}

TEST(SimulateE2pef, NullRunBoundMatchesLowerBound) {
    // dark rate for which nine 45 minute blocks give sigma = 0.11 cnt/s on the mean
    const double T = 405 * 60.0;
    const double dark = 0.11 * 0.11 * signal_share * T / 2.0;
    auto plan = rh6g_plan(dark, 0);
    plan.sample = tp::fluorescein();
    plan.integration_s = 45 * 60.0;
    double bound_sum = 0.0, mean_sum = 0.0;
    const int seeds = 40;
    for (int s = 0; s < seeds; ++s) {
        plan.rng_seed = 500 + static_cast<std::uint64_t>(s);
        std::vector<double> rates;
        for (std::uint64_t b = 0; b < 9; ++b)
            rates.push_back(stats::background_subtract(sim::simulate_e2pef_run(plan, 0.0, b)).rate);
        const double m = std::accumulate(rates.begin(), rates.end(), 0.0) / 9.0;
        double v = 0.0;
        for (double r : rates) v += (r - m) * (r - m);
        bound_sum += 2.0 * std::sqrt(v / 8.0) / 3.0;
        mean_sum += m;
    }
    EXPECT_NEAR(bound_sum / seeds, 0.22, 0.022);
    EXPECT_NEAR(mean_sum / seeds, 0.0, 3 * 0.11 / std::sqrt(seeds));
}

TEST(SimulateE2pef, LiteratureCrossSectionIsUnmissable) {
    auto plan = rh6g_plan(5.0, 4);
    plan.sample = tp::r9s();
    plan.integration_s = 60.0;
    const double expect = xsection::expected_e2pef(2.4e-19, plan.sample, plan.apparatus);
    const auto r = stats::background_subtract(sim::simulate_e2pef_run(plan, 2.4e-19));
    EXPECT_NEAR(r.rate, expect, 5 * r.poisson_sigma);
    EXPECT_NEAR(r.rate, 2.6e4, 0.2 * 2.6e4);
    EXPECT_GT(r.rate / r.poisson_sigma, 100.0);
    const auto small = stats::background_subtract(sim::simulate_e2pef_run(plan, 1e-19));
    EXPECT_GT(small.rate / small.poisson_sigma, 100.0);
}
