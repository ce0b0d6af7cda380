#include <gtest/gtest.h>

#include <cmath>

#include "reqc/cavity.h"

using namespace reqc;
using namespace reqc::cavity;

TEST(Cavity, IdealPurcellGoldenValues) {
    EXPECT_NEAR(ideal_purcell({.quality_factor = 1.2e5, .mode_volume = 9.0}), 1013.2, 0.1);
    EXPECT_NEAR(ideal_purcell({.quality_factor = 9e4, .mode_volume = 4.6}), 1486.8, 0.1);
    EXPECT_NEAR(ideal_purcell({.quality_factor = 4 * kPi * kPi / 3, .mode_volume = 1.0}), 1.0, 1e-12);
}

TEST(Cavity, IdealPurcellRejectsNonPositive) {
    EXPECT_THROW(ideal_purcell({.quality_factor = 0.0, .mode_volume = 1.0}), DomainError);
    EXPECT_THROW(ideal_purcell({.quality_factor = 1.0, .mode_volume = -1.0}), DomainError);
}

TEST(Cavity, EffectivePurcellScalesWithBranching) {
    // Q chosen so the ideal factor is exactly 1500.
    const double q = 1500.0 * 4 * kPi * kPi / 3;
    EXPECT_NEAR(effective_purcell({.quality_factor = q, .mode_volume = 1.0, .branching_ratio = 0.2}), 300.0, 1e-9);
    EXPECT_NEAR(effective_purcell({.quality_factor = q, .mode_volume = 1.0, .branching_ratio = 1.0}), 1500.0, 1e-9);
    const double q1000 = 1000.0 * 4 * kPi * kPi / 3;
    EXPECT_NEAR(effective_purcell({.quality_factor = q1000, .mode_volume = 1.0, .branching_ratio = 0.01}), 10.0, 1e-9);
    EXPECT_THROW(effective_purcell({.quality_factor = q, .mode_volume = 1.0, .branching_ratio = 0.0}), DomainError);
}

TEST(Cavity, EnhancedRate) {
    EXPECT_DOUBLE_EQ(enhanced_rate(0.0, {.lifetime_s = 1e-3}), 1000.0);
    EXPECT_DOUBLE_EQ(enhanced_rate(59.0, {.lifetime_s = 2e-3}), 60.0 * 500.0);
    EXPECT_DOUBLE_EQ(enhanced_rate(699.0, {.lifetime_s = 1.0}), 700.0);
    EXPECT_THROW(enhanced_rate(-1.0, {.lifetime_s = 1.0}), DomainError);
}

TEST(Cavity, BetaFactor) {
    EXPECT_DOUBLE_EQ(beta_factor(0.0), 0.0);
    EXPECT_DOUBLE_EQ(beta_factor(1.0), 0.5);
    EXPECT_DOUBLE_EQ(beta_factor(999.0), 0.999);
}

TEST(Cavity, TotalDephasing) {
    EXPECT_DOUBLE_EQ(total_dephasing({.lifetime_s = 3e-3}), 6e-3);
    EXPECT_DOUBLE_EQ(total_dephasing({.lifetime_s = kInf, .pure_dephasing_s = 4e-6}), 4e-6);
    EXPECT_DOUBLE_EQ(total_dephasing({.lifetime_s = 1.0, .pure_dephasing_s = 2.0}), 1.0);
}

TEST(Cavity, IndistinguishabilityAndCooperativity) {
    EXPECT_DOUBLE_EQ(indistinguishability(2e-3, 1e-3), 1.0);
    EXPECT_NEAR(indistinguishability(1e-5, 1e-3), 5e-3, 1e-15);
    // Enough Purcell enhancement to reach the Fourier limit.
    const double t1 = 2e-3, t2 = 1e-5;
    const double fp = 2 * t1 / t2 - 1;
    EXPECT_NEAR(indistinguishability(t2, 1.0 / enhanced_rate(fp, {.lifetime_s = t1})), 1.0, 1e-12);

    EXPECT_DOUBLE_EQ(cooperativity(1.0, 2.0), 1.0);
    EXPECT_DOUBLE_EQ(cooperativity(5e-3, 1000.0), 2.5);
    EXPECT_DOUBLE_EQ(cooperativity(0.0, 123.0), 0.0);
    EXPECT_THROW(cooperativity(1.5, 1.0), DomainError);
}

TEST(Cavity, FourierLimitCheckIsStrict) {
    const double t1 = 1e-3, gh = 100.0;
    EXPECT_FALSE(fourier_limit_check(2 * kPi * t1 * gh, t1, gh));
    EXPECT_TRUE(fourier_limit_check(10.0, 1e-3, 100.0));
    EXPECT_FALSE(fourier_limit_check(0.1, 10e-3, 1e6));
}

TEST(Cavity, PhotonBudget) {
    const std::vector<BudgetStage> stages{{"extraction", 0.3}, {"lens", 0.7}, {"detector", 0.6}};
    EXPECT_NEAR(photon_budget({6e3, stages}), 756.0, 1e-9);
    EXPECT_NEAR(photon_budget({12e3, stages}), 1512.0, 1e-9);
    EXPECT_NEAR(photon_budget({1e7, {{"collection", 0.1}}}), 1e6, 1e-6);
    EXPECT_DOUBLE_EQ(photon_budget({42.0, {}}), 42.0);
    EXPECT_THROW(photon_budget({1.0, {{"bad", 1.5}}}), DomainError);
}

TEST(Cavity, PhotonBudgetIsMonotoneInEveryStage) {
    const std::vector<BudgetStage> base{{"a", 0.3}, {"b", 0.7}, {"c", 0.6}};
    const double ref = photon_budget({1e4, base});
    for (std::size_t i = 0; i < base.size(); ++i) {
        auto more = base;
        more[i].efficiency += 0.1;
        EXPECT_GT(photon_budget({1e4, more}), ref);
    }
}

TEST(Cavity, HomogeneousLinewidthAndModeVolume) {
    EXPECT_NEAR(homogeneous_linewidth(1.0 / kPi), 1.0, 1e-12);
    const double lambda = 580e-9, n = 1.8;
    const double cube = std::pow(lambda / n, 3);
    EXPECT_NEAR(mode_volume_in_cubic_wavelengths(2.5 * cube, lambda, n), 2.5, 1e-12);
}
