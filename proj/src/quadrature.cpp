#include "bubble/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "bubble/errors.hpp"
#include "bubble/geometry.hpp"

namespace bubble {

namespace {

constexpr unsigned gk_depth = 18;
constexpr double T_max = 1e16;

}  // namespace

double integrate_interval(const Fn1& f, double a, double b, double rel_tol, QuadStats* st) {
    long count = 0;
    auto g = [&](double t) {
        ++count;
        return f(t);
    };
    double err = 0.0, l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, a, b, gk_depth, rel_tol, &err, &l1);
    if (st) st->n_evals += count;
    return v;
}

double power_log_tail_line(double c, double p, int q, double T) {
    const double m = p - 1.0;
    const double L = std::log(T);
    double base = std::pow(T, -m) / m;
    if (q == 1) base = std::pow(T, -m) * (L / m + 1.0 / (m * m));
    return 2.0 * c * base;
}

double power_log_tail_half_plane(double c, double p, int q, double T) {
    const double m = p - 2.0;
    const double L = std::log(T);
    double base = std::pow(T, -m) / m;
    if (q == 1) base = std::pow(T, -m) * (L / m + 1.0 / (m * m));
    return pi * c * base;
}

double integrate_line(const Fn1& f, const Fn1& tail_bound, double tol, QuadStats* st, double T0) {
    QuadStats local;
    const double rel = 1e-13;
    double sum = integrate_interval(f, -T0, T0, rel, &local);
    double T = T0;
    double prev_tail = tail_bound(T);
    while (prev_tail >= tol / 10.0) {
        sum += integrate_interval(f, T, 2.0 * T, rel, &local);
        sum += integrate_interval(f, -2.0 * T, -T, rel, &local);
        T *= 2.0;
        const double tb = tail_bound(T);
        if (!(tb < prev_tail) || T > T_max)
            throw numerical_error("TailNotConvergent", "line tail bound stagnates before reaching tolerance");
        prev_tail = tb;
    }
    local.T_final = T;
    local.tail_bound = prev_tail;
    if (st) {
        st->n_evals += local.n_evals;
        st->T_final = local.T_final;
        st->tail_bound = local.tail_bound;
    }
    return sum;
}

namespace {

double integrate_rect(const Fn2& f, double a, double b, double c, double d, QuadStats* st) {
    auto inner = [&](double z1) {
        return integrate_interval([&](double z2) { return f(z1, z2); }, c, d, 1e-13, st);
    };
    return integrate_interval(inner, a, b, 1e-12, nullptr);
}

}  // namespace

double integrate_half_plane(const Fn2& f, const Fn1& tail_bound, double tol, QuadStats* st, double T0) {
    QuadStats local;
    double sum = integrate_rect(f, -T0, T0, 0.0, T0, &local);
    double T = T0;
    double prev_tail = tail_bound(T);
    while (prev_tail >= tol / 10.0) {
        const double T2 = 2.0 * T;
        sum += integrate_rect(f, -T2, -T, 0.0, T2, &local);
        sum += integrate_rect(f, T, T2, 0.0, T2, &local);
        sum += integrate_rect(f, -T, T, T, T2, &local);
        T = T2;
        const double tb = tail_bound(T);
        if (!(tb < prev_tail) || T > T_max)
            throw numerical_error("TailNotConvergent", "half-plane tail bound stagnates before reaching tolerance");
        prev_tail = tb;
    }
    local.T_final = T;
    local.tail_bound = prev_tail;
    if (st) {
        st->n_evals += local.n_evals;
        st->T_final = local.T_final;
        st->tail_bound = local.tail_bound;
    }
    return sum;
}

const char* to_string(AppendixLemmaId id) {
    switch (id) {
        case AppendixLemmaId::A1: return "A1";
        case AppendixLemmaId::A2: return "A2";
        case AppendixLemmaId::A3: return "A3";
        case AppendixLemmaId::A4: return "A4";
        case AppendixLemmaId::A5: return "A5";
    }
    return "?";
}

AppendixLemmaId lemma_from_string(const std::string& s) {
    for (auto id : all_lemmas())
        if (s == to_string(id)) return id;
    throw validation_error("LemmaIdInvalid", "unknown appendix lemma id " + s);
}

std::vector<AppendixLemmaId> all_lemmas() {
    return {AppendixLemmaId::A1, AppendixLemmaId::A2, AppendixLemmaId::A3, AppendixLemmaId::A4, AppendixLemmaId::A5};
}

double closed_form(AppendixLemmaId id, double D, double lambda, double epsilon) {
    const double s = std::sqrt(1.0 + D * D);
    const double asinhD = std::log(D + s);
    const double r = D / s;
    switch (id) {
        case AppendixLemmaId::A1: return two_pi * (1.0 - r);
        case AppendixLemmaId::A2:
            return -two_pi * (2.0 * asinhD + 1.0 + 2.0 * std::log(lambda) -
                              r * (1.0 + 2.0 * std::log(2.0 * lambda) + std::log(1.0 + D * D)));
        case AppendixLemmaId::A3: return two_pi * r;
        case AppendixLemmaId::A4:
            return -two_pi * r * (std::log(4.0) + std::log(1.0 + D * D) + 2.0 * std::log(lambda));
        case AppendixLemmaId::A5: return -4.0 * pi * std::log(epsilon);
    }
    return 0.0;
}

double lemma_integrand_2d(AppendixLemmaId id, double D, double lambda, double z1, double z2) {
    const double w2 = z1 * z1 + (z2 + D) * (z2 + D);
    const double base = 4.0 / ((1.0 + w2) * (1.0 + w2));
    if (id == AppendixLemmaId::A1) return base;
    return base * (-std::log1p(w2) - 2.0 * std::log(lambda));
}

double lemma_integrand_line(AppendixLemmaId id, double D, double lambda, double t) {
    const double q = 1.0 + t * t + D * D;
    const double base = 2.0 * D / q;
    if (id == AppendixLemmaId::A3) return base;
    return base * (-std::log(q) - 2.0 * std::log(lambda));
}

double lemma_a5_integrand(double D, double lambda, double epsilon, double t) {
    // lambda^2 + |(xi(t) - xi(0))/eps - D lambda n(0)|^2 = lambda^2(1+D^2) + 2B sin^2(t/2)
    const double B = 2.0 / (epsilon * epsilon) + 2.0 * D * lambda / epsilon;
    const double s = std::sin(0.5 * t);
    return std::log(lambda * lambda * (1.0 + D * D) + 2.0 * B * s * s);
}

QuadratureResult verify_lemma(AppendixLemmaId id, double D, double lambda, double epsilon, double tol) {
    if (!(D >= 0.0) || !(lambda > 0.0) || !(epsilon > 0.0 && epsilon < 1.0))
        throw validation_error("LemmaParamsInvalid", "verify_lemma needs D >= 0, lambda > 0, 0 < eps < 1");
    if (!(tol >= 1e-10 * (1.0 - 1e-12))) throw validation_error("LemmaParamsInvalid", "tol must be >= 1e-10");
    QuadStats st;
    QuadratureResult r;
    const double ll = std::abs(std::log(lambda));
    switch (id) {
        case AppendixLemmaId::A1:
            r.numeric = integrate_half_plane([&](double a, double b) { return lemma_integrand_2d(id, D, lambda, a, b); },
                                             [](double T) { return power_log_tail_half_plane(4.0, 4.0, 0, T); }, tol, &st,
                                             8.0 + D);
            break;
        case AppendixLemmaId::A2:
            r.numeric = integrate_half_plane(
                [&](double a, double b) { return lemma_integrand_2d(id, D, lambda, a, b); },
                [&](double T) {
                    return power_log_tail_half_plane(8.0 * (std::log(2.0) + ll), 4.0, 0, T) +
                           power_log_tail_half_plane(8.0, 4.0, 1, T);
                },
                tol, &st, 8.0 + D);
            break;
        case AppendixLemmaId::A3:
            r.numeric = integrate_line([&](double t) { return lemma_integrand_line(id, D, lambda, t); },
                                       [&](double T) { return power_log_tail_line(2.0 * D, 2.0, 0, T); }, tol, &st,
                                       8.0 + D);
            break;
        case AppendixLemmaId::A4:
            r.numeric = integrate_line(
                [&](double t) { return lemma_integrand_line(id, D, lambda, t); },
                [&](double T) {
                    return power_log_tail_line(4.0 * D * (std::log(2.0) + ll), 2.0, 0, T) +
                           power_log_tail_line(4.0 * D, 2.0, 1, T);
                },
                tol, &st, 8.0 + D);
            break;
        case AppendixLemmaId::A5: {
            auto f = [&](double t) { return lemma_a5_integrand(D, lambda, epsilon, t); };
            r.numeric = integrate_interval(f, -pi, 0.0, 1e-14, &st) + integrate_interval(f, 0.0, pi, 1e-14, &st);
            break;
        }
    }
    r.closed_form = closed_form(id, D, lambda, epsilon);
    r.abs_err = std::abs(r.numeric - r.closed_form);
    r.rel_err = r.closed_form != 0.0 ? r.abs_err / std::abs(r.closed_form) : r.abs_err;
    r.n_evals = st.n_evals;
    return r;
}

std::vector<CalibrationCase> calibrate_integrators(double tol) {
    std::vector<CalibrationCase> out;
    auto push = [&](std::string name, double num, double exact) {
        out.push_back({std::move(name), num, exact, std::abs(num - exact)});
    };
    push("gaussian_half_plane",
         integrate_half_plane([](double a, double b) { return std::exp(-(a * a + b * b)); },
                              [](double T) { return 0.5 * pi * std::exp(-T * T); }, tol),
         0.5 * pi);
    push("cauchy_half_plane",
         integrate_half_plane(
             [](double a, double b) {
                 const double q = 1.0 + a * a + b * b;
                 return 4.0 / (q * q);
             },
             [](double T) { return power_log_tail_half_plane(4.0, 4.0, 0, T); }, tol),
         two_pi);
    push("log_cauchy_half_plane",
         integrate_half_plane(
             [](double a, double b) {
                 const double q = 1.0 + a * a + b * b;
                 return std::log(q) / (q * q);
             },
             [](double T) {
                 return power_log_tail_half_plane(std::log(2.0), 4.0, 0, T) + power_log_tail_half_plane(2.0, 4.0, 1, T);
             },
             tol),
         0.5 * pi);
    push("cauchy_line", integrate_line([](double t) { return 1.0 / (1.0 + t * t); },
                                       [](double T) { return power_log_tail_line(1.0, 2.0, 0, T); }, tol),
         pi);
    const double c = 2.0;
    push("log_cauchy_line",
         integrate_line([&](double t) { return std::log(c * c + t * t) / (c * c + t * t); },
                        [](double T) { return power_log_tail_line(std::log(2.0), 2.0, 0, T) + power_log_tail_line(2.0, 2.0, 1, T); },
                        tol, nullptr, 8.0),
         two_pi / c * std::log(2.0 * c));
    return out;
}

}  // namespace bubble
