#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>

#include "bubble/errors.hpp"
#include "bubble/harness.hpp"

using namespace bubble;

TEST(ParallelFor, ResultsIndependentOfJobs) {
    std::vector<double> a(100), b(100);
    parallel_for(100, 1, [&](int i) { a[i] = std::sin(i); });
    parallel_for(100, 7, [&](int i) { b[i] = std::sin(i); });
    EXPECT_EQ(a, b);
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
    try {
        parallel_for(50, 4, [](int i) {
            if (i == 13 || i == 40) throw std::runtime_error(std::to_string(i));
        });
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "13");
    }
}

TEST(Scan, SignChanges) {
    EXPECT_EQ(sign_changes({1.0, 2.0, -1.0, -3.0, 0.5}), (std::vector<int>{1, 3}));
    EXPECT_EQ(sign_changes({1.0, 0.0, -1.0, 2.0}), (std::vector<int>{1, 2}));
    EXPECT_TRUE(sign_changes({1.0, 1.0, 1.0}).empty());
}

TEST(Scan, PeriodicExtrema) {
    const auto th = theta_grid(8);
    std::vector<double> v;
    for (double t : th) v.push_back(std::cos(t));
    const auto ex = periodic_extrema(th, v);
    ASSERT_EQ(ex.size(), 2u);
    EXPECT_EQ(ex[0].index, 0);
    EXPECT_EQ(ex[0].kind, "max");
    EXPECT_EQ(ex[1].index, 4);
    EXPECT_EQ(ex[1].kind, "min");
    EXPECT_TRUE(periodic_extrema(th, std::vector<double>(8, 1.0)).empty());
}

TEST(Scan, AngularDistance) {
    EXPECT_NEAR(angular_distance(0.1, two_pi - 0.1), 0.2, 1e-15);
    EXPECT_NEAR(angular_distance(pi, 0.0), pi, 1e-15);
}

TEST(Scan, TooFewPointsRejected) {
    EXPECT_THROW(xi_scan(CurvatureField::constant(1.0, 1.0), 0.05, 1.0, 16, {}), Error);
}

TEST(PowerLaw, RecoversExponent) {
    const auto f = fit_power_law({0.1, 0.05, 0.025}, {3e-2, 7.5e-3, 1.875e-3});
    EXPECT_TRUE(f.ok);
    EXPECT_NEAR(f.exponent, 2.0, 1e-12);
    EXPECT_NEAR(f.prefactor, 3.0, 1e-11);
    EXPECT_FALSE(fit_power_law({0.1, 0.05}, {0.0, 1.0}).ok);
}

TEST(Energy, ScalingIdentity) {
    const auto f = CurvatureField::constant(1.0, 1.0);
    const auto r = make_energy_report(-3.0, f, {0.0, 1.0, 0.05});
    EXPECT_NEAR(r.E_scaled - r.E_tilde, 4 * pi * std::log(0.05), 1e-13);
    EXPECT_NEAR(r.gap, r.E_scaled - r.E_predicted, 1e-13);
}

TEST(Expansion, RejectsUnorderedEpsilons) {
    const auto f = CurvatureField::constant(1.0, 1.0);
    EXPECT_THROW(expansion_study(f, 0.0, {1.0}, {0.05, 0.1}, {}, 1), Error);
    EXPECT_THROW(expansion_study(f, 0.0, {1.0}, {0.05}, {}, 1), Error);
}
