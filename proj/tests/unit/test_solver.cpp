#include <gtest/gtest.h>

#include <cmath>

#include "bubble/errors.hpp"
#include "bubble/harness.hpp"
#include "bubble/solver.hpp"

using namespace bubble;

namespace {

const CurvatureField unit = CurvatureField::constant(1.0, 1.0);
const CurvatureField kcos(Poly2::constant(1.0), Fourier1({2.0, 1.0}, {0.0, 0.0}));

}  // namespace

TEST(Newton, ConvergesFromAnsatzAndSatisfiesMass) {
    const BubbleParams p{0.0, 1.0, 0.05};
    const auto a = assemble_ansatz(unit, p);
    const auto g = build_grid(64, 32, bubble_chart(a.frame));
    const auto u = newton_solve(seed_from_ansatz(a, g), unit, p.epsilon, {1e-10, 30, 20});
    EXPECT_LE(u.diagnostics.iterations, 8);
    EXPECT_LE(u.diagnostics.residual, 1e-10);
    EXPECT_LE(std::abs(mass_identity(u, unit) - two_pi), 1e-4 * two_pi);
    EXPECT_LE(u.trace_consistency(), 1e-9);
    const auto b = extract_blowup_point(u);
    EXPECT_LT(std::abs(wrap_signed(b.theta)), two_pi / 64);
}

// constant data are bordered: the plain residual keeps the phase-condition multiplier part
TEST(Newton, ReportedResidualMatchesDiscreteResidual) {
    const BubbleParams p{0.0, 1.0, 0.05};
    const auto a = assemble_ansatz(unit, p);
    const auto g = build_grid(64, 32, bubble_chart(a.frame));
    const auto u = newton_solve(seed_from_ansatz(a, g), unit, p.epsilon, {1e-10, 30, 20});
    const double plain = discrete_residual(u, unit).cwiseAbs().maxCoeff();
    EXPECT_NEAR(plain, u.diagnostics.unbordered_residual, 1e-9 * (1 + plain));
    EXPECT_TRUE(u.diagnostics.gauge);
    const auto s = seed_from_ansatz(a, g);
    EXPECT_GT(discrete_residual(s, unit).cwiseAbs().maxCoeff(), 10 * plain);
}

TEST(Linearization, ExpansionNearTheBubble) {
    const BubbleParams p{0.0, 1.0, 0.025};
    const auto a = assemble_ansatz(unit, p);
    const auto g = build_grid(64, 48, bubble_chart(a.frame));
    const auto op = assemble_linearization(a, unit, g);
    const auto chk = linearization_expansion_check(op, a, unit);
    EXPECT_GT(chk.n_interior, 0);
    EXPECT_LT(chk.W1_dev, 0.2);
    EXPECT_LT(chk.W2_dev, 0.2);
}

class Projected : public ::testing::Test {
protected:
    void SetUp() override {
        a_ = std::make_unique<AnsatzField>(assemble_ansatz(kcos, {0.5, 1.0, 0.05}));
        g_ = build_grid(64, 48, bubble_chart(a_->frame));
        op_ = assemble_linearization(*a_, kcos, g_);
        s_ = std::make_unique<ProjectedSolver>(op_, a_->frame);
    }
    std::unique_ptr<AnsatzField> a_;
    std::shared_ptr<const SolverGrid> g_;
    LinearizedOperator op_;
    std::unique_ptr<ProjectedSolver> s_;
};

TEST_F(Projected, KernelForcingIsAbsorbedByMultiplier) {
    const Field f = s_->basis().chiZ1;
    const auto r = s_->solve(f, std::vector<double>(g_->n_theta(), 0.0));
    EXPECT_NEAR(r.c1, -1.0, 1e-8);
    EXPECT_NEAR(r.c0, 0.0, 1e-8);
    EXPECT_LT(r.phi.values.cwiseAbs().maxCoeff(), 1e-8);
}

TEST_F(Projected, ZeroForcingGivesZero) {
    const Field f = Field::Zero(g_->n_r(), g_->n_theta());
    const auto r = s_->solve(f, std::vector<double>(g_->n_theta(), 0.0));
    EXPECT_EQ(r.c0, 0.0);
    EXPECT_EQ(r.c1, 0.0);
    EXPECT_EQ(r.phi.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST_F(Projected, Linearity) {
    Field f1(g_->n_r(), g_->n_theta()), f2(g_->n_r(), g_->n_theta());
    std::vector<double> h1(g_->n_theta()), h2(g_->n_theta());
    for (int k = 0; k < g_->n_r(); ++k)
        for (int l = 0; l < g_->n_theta(); ++l) {
            f1(k, l) = std::sin(0.3 * k + l) * 1e-3;
            f2(k, l) = std::cos(0.7 * k - 2.0 * l) * 1e-3;
        }
    for (int l = 0; l < g_->n_theta(); ++l) {
        h1[l] = std::cos(g_->phi(l)) * 1e-3;
        h2[l] = std::sin(3 * g_->phi(l)) * 1e-3;
    }
    std::vector<double> h3(h1);
    for (int l = 0; l < g_->n_theta(); ++l) h3[l] += 2 * h2[l];
    const auto r1 = s_->solve(f1, h1), r2 = s_->solve(f2, h2), r3 = s_->solve(f1 + 2 * f2, h3);
    EXPECT_NEAR(r3.c1, r1.c1 + 2 * r2.c1, 1e-10 * (1 + std::abs(r3.c1)));
    EXPECT_NEAR(r3.c0, r1.c0 + 2 * r2.c0, 1e-10 * (1 + std::abs(r3.c0)));
    const double scale = 1 + r3.phi.values.cwiseAbs().maxCoeff();
    EXPECT_LT((r3.phi.values - r1.phi.values - 2 * r2.phi.values).cwiseAbs().maxCoeff(), 1e-9 * scale);
    EXPECT_LE(r1.orthogonality_residual, 1e-9);
}

TEST(NonlinearProjected, ConstantCurvatureMultiplierIsRotationInvariant) {
    std::vector<double> c1;
    for (double th : {0.0, 1.3, 4.0}) {
        const auto r = nonlinear_projected_solve(unit, {th, 1.0, 0.05});
        c1.push_back(r.result.c1);
        EXPECT_LE(r.result.orthogonality_residual, 1e-9);
    }
    EXPECT_NEAR(c1[0], c1[1], 1e-10);
    EXPECT_NEAR(c1[0], c1[2], 1e-10);
}

TEST(Energy, ClosedFormsOnConstantFields) {
    const auto g = build_grid(64, 48);
    const double e = 0.1;
    const auto zero = make_solution(g, Field::Zero(g->n_r(), g->n_theta()), e);
    EXPECT_NEAR(energy_functional(zero, unit), -e * e * pi / 2 - two_pi * e, 1e-12);
    const double c = 0.7;
    const auto cst = make_solution(g, Field::Constant(g->n_r(), g->n_theta(), c), e);
    EXPECT_NEAR(energy_functional(cst, unit), -0.5 * e * e * std::exp(2 * c) * pi + two_pi * c - two_pi * e * std::exp(c),
                1e-12);
}

TEST(Energy, HarmonicDirichletEnergy) {
    // U = Re zeta^2 has int |grad U|^2 = 2 pi and zero boundary mean
    const auto g = build_grid(64, 48, {0.4, 0.5});
    Field u(g->n_r(), g->n_theta());
    for (int k = 0; k < g->n_r(); ++k)
        for (int l = 0; l < g->n_theta(); ++l) u(k, l) = std::real(g->zeta(k, l) * g->zeta(k, l));
    const auto s = make_solution(g, u, 1e-8);
    const CurvatureField tiny = CurvatureField::constant(1.0, 1.0);
    EXPECT_NEAR(energy_functional(s, tiny), pi, 1e-6);
}

TEST(Energy, PredictedEnergyFormula) {
    const double e = 0.05;
    const double phi = 3.0 + std::sqrt(1.0 + 9.0);
    EXPECT_NEAR(predicted_energy(kcos, 0.0, e), two_pi * std::log(e) - two_pi + two_pi * std::log(2.0) - two_pi * std::log(phi),
                1e-13);
}
