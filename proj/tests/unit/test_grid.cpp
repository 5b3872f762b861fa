#include <gtest/gtest.h>

#include "bubble/errors.hpp"
#include "bubble/grid.hpp"

using namespace bubble;

TEST(Grid, ChecksPass) {
    for (auto [nt, nr] : {std::pair{64, 48}, std::pair{128, 64}}) {
        for (ChartSpec c : {ChartSpec{}, ChartSpec{0.3, 0.2}, ChartSpec{2.5, 0.5}}) {
            SolverGrid g(nt, nr, c);
            for (const auto& k : grid_checks(g)) EXPECT_TRUE(k.pass()) << nt << " " << c.beta << " " << k.name << " " << k.error;
        }
    }
}

TEST(Grid, UnderResolvedChartIsRejected) {
    EXPECT_THROW(build_grid(64, 48, {0.0, 0.094}), Error);
    EXPECT_NO_THROW(build_grid(128, 48, {0.0, 0.094}));
}

TEST(Grid, ChartInverse) {
    SolverGrid g(64, 48, {1.3, 0.25});
    for (int k = 0; k < g.n_r(); k += 7)
        for (int l = 0; l < g.n_theta(); l += 5) EXPECT_LT(std::abs(g.chart_of(g.zeta(k, l)) - g.z(k, l)), 1e-13);
}

TEST(Grid, FocusSitsAtTheta0) {
    for (double th : {0.0, 1.0, 4.0}) {
        SolverGrid g(64, 48, {th, 0.3});
        EXPECT_NEAR(std::abs(wrap_signed(g.theta_boundary(0) - th)), 0.0, 1e-13);
        EXPECT_NEAR(g.fp(0, 0), 0.3, 1e-13);
    }
}

TEST(Grid, RotatingTheChartRotatesTheNodes) {
    SolverGrid a(64, 48, {0.0, 0.3}), b(64, 48, {0.77, 0.3});
    const cplx rot = std::polar(1.0, 0.77);
    for (int k = 0; k < 48; k += 5)
        for (int l = 0; l < 64; l += 3) {
            EXPECT_LT(std::abs(b.zeta(k, l) - rot * a.zeta(k, l)), 1e-14);
            EXPECT_NEAR(a.area_weights()(k, l), b.area_weights()(k, l), 1e-15);
        }
}

TEST(Grid, SpectralLaplacianOfHarmonicFunction) {
    SolverGrid g(64, 48);
    Field u(g.n_r(), g.n_theta());
    for (int k = 0; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l) u(k, l) = std::real(std::pow(g.z(k, l), 3));
    const Field L = g.laplacian(u);
    EXPECT_LT(L.bottomRows(g.n_r() - 1).cwiseAbs().maxCoeff(), 1e-8);
    const Field dr = g.d_r(u);
    for (int l = 0; l < g.n_theta(); ++l) EXPECT_NEAR(dr(0, l), 3 * std::cos(3 * g.phi(l)), 1e-10);
}

TEST(Grid, InterpolationReproducesSmoothData) {
    SolverGrid g(64, 48);
    Field u(g.n_r(), g.n_theta());
    auto f = [](cplx z) { return std::exp(z.real()) * std::cos(z.imag()); };
    for (int k = 0; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l) u(k, l) = f(g.z(k, l));
    for (cplx z : {cplx{0.1, 0.2}, cplx{-0.5, 0.7}, cplx{0.0, 0.0}, std::polar(1.0, 0.3)})
        EXPECT_NEAR(g.interpolate(u, z), f(z), 1e-11);
}
