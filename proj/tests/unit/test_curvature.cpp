#include <gtest/gtest.h>

#include <cmath>

#include "bubble/curvature.hpp"
#include "bubble/errors.hpp"

using namespace bubble;

namespace {

CurvatureField kappa_cos() { return CurvatureField(Poly2::constant(1.0), Fourier1({2.0, 1.0}, {0.0, 0.0})); }

CurvatureField mixed() {
    Poly2 K = Poly2::constant(2.0);
    K.add_term(1, 0, 0.3);
    K.add_term(0, 2, -0.2);
    return CurvatureField(K, Fourier1({1.5, 0.2, -0.3}, {0.0, 0.4, 0.1}));
}

// phi_red straight from its definition
double phi_brute(const CurvatureField& f, double th) {
    const Vec2 x{std::sin(th), 1.0 - std::cos(th)};
    const double K = f.K_spec()(x), k = f.kappa(th);
    return k + std::sqrt(K + k * k);
}

}  // namespace

TEST(Poly2, EvaluatesAndDifferentiates) {
    Poly2 p;
    p.add_term(2, 1, 3.0);
    p.add_term(0, 0, -1.0);
    const Vec2 x{0.7, -0.4};
    EXPECT_NEAR(p(x), 3.0 * 0.49 * -0.4 - 1.0, 1e-15);
    const double h = 1e-6;
    const Vec2 g = p.gradient(x);
    EXPECT_NEAR(g.x1, (p({x.x1 + h, x.x2}) - p({x.x1 - h, x.x2})) / (2 * h), 1e-8);
    EXPECT_NEAR(g.x2, (p({x.x1, x.x2 + h}) - p({x.x1, x.x2 - h})) / (2 * h), 1e-8);
    EXPECT_EQ(p.degree(), 3);
}

TEST(Poly2, RejectsBadTerms) {
    Poly2 p;
    EXPECT_THROW(p.add_term(5, 4, 1.0), Error);
    EXPECT_THROW(p.add_term(-1, 0, 1.0), Error);
}

TEST(Curvature, NonpositiveDataRejected) {
    EXPECT_THROW(CurvatureField(Poly2::constant(1.0), Fourier1({0.5, 1.0}, {0.0, 0.0})), Error);
    EXPECT_THROW(CurvatureField::constant(-1.0, 1.0), Error);
}

TEST(Curvature, ReducedDerivativeMatchesFiniteDifference) {
    for (const auto& f : {kappa_cos(), mixed()})
        for (double th = 0.05; th < two_pi; th += 0.37) {
            const double h = 1e-5;
            const double fd = (phi_brute(f, th + h) - phi_brute(f, th - h)) / (2 * h);
            EXPECT_NEAR(reduced_derivative(f, th), fd, 1e-8) << th;
            EXPECT_NEAR(eval_reduced(f, th).phi_red, phi_brute(f, th), 1e-14);
        }
}

TEST(Curvature, ExtremaAgreeWithBruteScan) {
    for (const auto& f : {kappa_cos(), mixed()}) {
        const int n = 1000000;
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = phi_brute(f, two_pi * i / n);
        std::vector<double> brute;
        for (int i = 0; i < n; ++i) {
            const double a = v[(i + n - 1) % n], b = v[(i + 1) % n];
            if ((v[i] > a && v[i] > b) || (v[i] < a && v[i] < b)) brute.push_back(two_pi * i / n);
        }
        const auto ex = find_extremum_reduced(f);
        ASSERT_EQ(ex.size(), brute.size());
        for (size_t i = 0; i < ex.size(); ++i) {
            double best = 10.0;
            for (double t : brute) best = std::min(best, std::abs(wrap_signed(ex[i].theta - t)));
            EXPECT_LT(best, 2e-5);
            EXPECT_NEAR(reduced_derivative(f, ex[i].theta), 0.0, 1e-8);
        }
    }
}

TEST(Curvature, KappaCosExtremaAtZeroAndPi) {
    const auto ex = find_extremum_reduced(kappa_cos());
    ASSERT_EQ(ex.size(), 2u);
    for (const auto& e : ex) {
        if (e.kind == ExtremumKind::max) EXPECT_NEAR(std::abs(wrap_signed(e.theta)), 0.0, 1e-10);
        else EXPECT_NEAR(e.theta, pi, 1e-10);
    }
}

TEST(Curvature, ConstantDataHaveNoExtremum) {
    const auto f = CurvatureField::constant(1.0, 1.0);
    EXPECT_TRUE(find_extremum_reduced(f).empty());
    EXPECT_THROW(require_extremum(f), Error);
}

TEST(Curvature, RotationEquivariance) {
    const auto f = mixed();
    for (double beta : {0.4, 2.1, -1.3}) {
        const auto g = f.rotated(beta);
        for (double th = 0.0; th < two_pi; th += 0.5) {
            EXPECT_NEAR(eval_reduced(g, th + beta).phi_red, eval_reduced(f, th).phi_red, 1e-12);
            EXPECT_NEAR(D_ratio(g, th + beta), D_ratio(f, th), 1e-12);
        }
    }
}
