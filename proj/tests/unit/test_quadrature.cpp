#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "bubble/errors.hpp"
#include "bubble/geometry.hpp"
#include "bubble/quadrature.hpp"

using namespace bubble;
namespace bq = boost::math::quadrature;

namespace {

// half-plane integral of g(|z + D e2|^2) reduced to the slab {w2 > D}, nested double-exponential rules
double oracle_2d(AppendixLemmaId id, double D, double l) {
    bq::exp_sinh<double> outer;
    bq::sinh_sinh<double> inner;
    auto row = [&](double w2) {
        return inner.integrate([&](double w1) { return lemma_integrand_2d(id, 0.0, l, w1, w2); }, 1e-13);
    };
    return outer.integrate([&](double s) { return row(D + s); }, 1e-12);
}

double oracle_line(AppendixLemmaId id, double D, double l) {
    bq::sinh_sinh<double> q;
    return q.integrate([&](double t) { return lemma_integrand_line(id, D, l, t); }, 1e-13);
}

// int_0^{2pi} ln(A + B - B cos t) dt = 2 pi ln((A + B + sqrt(A^2 + 2AB))/2)
double a5_exact(double D, double l, double e) {
    const double A = l * l * (1 + D * D), B = 2.0 / (e * e) + 2.0 * D * l / e;
    return two_pi * std::log(0.5 * (A + B + std::sqrt(A * A + 2 * A * B)));
}

}  // namespace

TEST(Appendix, A1ReducesToOneDimension) {
    for (double D : {0.0, 0.5, 2.0}) {
        bq::exp_sinh<double> q;
        const double one_d = q.integrate([&](double s) { return two_pi * std::pow(1 + (D + s) * (D + s), -1.5); }, 1e-14);
        EXPECT_NEAR(closed_form(AppendixLemmaId::A1, D, 1.0, 0.1), one_d, 1e-12);
        EXPECT_NEAR(verify_lemma(AppendixLemmaId::A1, D, 1.0, 0.1).numeric, one_d, 1e-8);
    }
}

TEST(Appendix, TwoDimensionalLemmasAgainstIndependentRule) {
    for (double D : {0.0, 1.0})
        for (double l : {0.5, 2.0}) {
            const double o = oracle_2d(AppendixLemmaId::A2, D, l);
            EXPECT_NEAR(closed_form(AppendixLemmaId::A2, D, l, 0.1), o, 1e-7 * (1 + std::abs(o)));
            EXPECT_NEAR(verify_lemma(AppendixLemmaId::A2, D, l, 0.1).numeric, o, 1e-7 * (1 + std::abs(o)));
        }
}

TEST(Appendix, LineLemmasAgainstIndependentRule) {
    for (double D : {0.5, 2.0})
        for (double l : {0.5, 1.0, 2.0})
            for (auto id : {AppendixLemmaId::A3, AppendixLemmaId::A4}) {
                const double o = oracle_line(id, D, l);
                EXPECT_NEAR(closed_form(id, D, l, 0.1), o, 1e-9 * (1 + std::abs(o)));
                EXPECT_NEAR(verify_lemma(id, D, l, 0.1).numeric, o, 1e-8 * (1 + std::abs(o)));
            }
}

TEST(Appendix, A5ExactIntegralAndLinearRemainder) {
    for (double D : {0.0, 1.0})
        for (double l : {0.5, 2.0}) {
            std::vector<double> rem;
            for (double e : {0.1, 0.05, 0.025, 0.0125}) {
                const auto r = verify_lemma(AppendixLemmaId::A5, D, l, e);
                EXPECT_NEAR(r.numeric, a5_exact(D, l, e), 1e-9 * std::abs(r.numeric));
                rem.push_back(a5_exact(D, l, e) - closed_form(AppendixLemmaId::A5, D, l, e));
            }
            for (size_t i = 1; i < rem.size(); ++i) EXPECT_NEAR(rem[i - 1] / rem[i], 2.0, 0.1);
        }
}

TEST(Appendix, A5IntegrandIsTheCircleIntegrand) {
    bq::tanh_sinh<double> q;
    const double v = q.integrate([](double t) { return lemma_a5_integrand(0.5, 1.0, 0.05, t); }, -pi, pi, 1e-14);
    EXPECT_NEAR(v, a5_exact(0.5, 1.0, 0.05), 1e-10);
}

TEST(Appendix, RejectsBadParameters) {
    EXPECT_THROW(verify_lemma(AppendixLemmaId::A1, -1.0, 1.0, 0.1), Error);
    EXPECT_THROW(verify_lemma(AppendixLemmaId::A1, 0.0, 1.0, 0.1, 1e-12), Error);
    EXPECT_THROW(lemma_from_string("A9"), Error);
    for (auto id : all_lemmas()) EXPECT_EQ(lemma_from_string(to_string(id)), id);
}

TEST(Integrators, KnownIntegrals) {
    EXPECT_NEAR(integrate_interval([](double x) { return x * x; }, 0.0, 1.0, 1e-12), 1.0 / 3.0, 1e-14);
    EXPECT_NEAR(integrate_line([](double t) { return 1.0 / (1.0 + t * t); },
                               [](double T) { return power_log_tail_line(1.0, 2.0, 0, T); }, 1e-10),
                pi, 1e-10);
    EXPECT_NEAR(integrate_half_plane([](double a, double b) { return std::exp(-(a * a + b * b)); },
                                     [](double T) { return 0.5 * pi * std::exp(-T * T); }, 1e-10),
                0.5 * pi, 1e-10);
    for (const auto& c : calibrate_integrators()) EXPECT_LE(c.abs_err, 1e-10) << c.name;
}

TEST(Integrators, TailBoundsDominateTails) {
    bq::exp_sinh<double> q;
    for (double T : {4.0, 16.0}) {
        const double tail = 2.0 * q.integrate([&](double s) { return std::log(T + s) / std::pow(T + s, 2.0); }, 1e-13);
        EXPECT_GE(power_log_tail_line(1.0, 2.0, 1, T), tail * (1 - 1e-12));
    }
}
