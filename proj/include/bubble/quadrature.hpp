#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bubble {

struct QuadStats {
    long n_evals = 0;
    double T_final = 0.0;
    double tail_bound = 0.0;
};

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

// Adaptive Gauss-Kronrod (15 point) on a finite interval; tol is relative to the L1 norm.
double integrate_interval(const Fn1& f, double a, double b, double rel_tol, QuadStats* st = nullptr);

// Integral over the real line: [-T0, T0] plus doubling annuli until tail_bound(T) < tol/10.
// tail_bound(T) must bound the integral of |f| over |t| > T.
double integrate_line(const Fn1& f, const Fn1& tail_bound, double tol, QuadStats* st = nullptr, double T0 = 8.0);

// Integral over the upper half-plane {z2 > 0}: box [-T,T]x[0,T] grown by doubling.
// tail_bound(T) must bound the integral of |f| outside the half-disc of radius T.
double integrate_half_plane(const Fn2& f, const Fn1& tail_bound, double tol, QuadStats* st = nullptr,
                            double T0 = 8.0);

// Tail of c * rho^{-p} (ln rho)^q over rho > T; line version counts both sides,
// half-plane version integrates over a half annulus (factor pi rho).
double power_log_tail_line(double c, double p, int q, double T);
double power_log_tail_half_plane(double c, double p, int q, double T);

enum class AppendixLemmaId { A1, A2, A3, A4, A5 };

const char* to_string(AppendixLemmaId id);
AppendixLemmaId lemma_from_string(const std::string& s);
std::vector<AppendixLemmaId> all_lemmas();

struct QuadratureResult {
    double numeric = 0.0;
    double closed_form = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;
    long n_evals = 0;
};

double closed_form(AppendixLemmaId id, double D, double lambda, double epsilon);

// Integrands in the rescaled variables z = (x - xi)/(lambda eps), half-plane {z2 > 0}.
double lemma_integrand_2d(AppendixLemmaId id, double D, double lambda, double z1, double z2);
double lemma_integrand_line(AppendixLemmaId id, double D, double lambda, double t);
// Exact rescaled circle integrand of A5 at boundary angle t (relative to xi).
double lemma_a5_integrand(double D, double lambda, double epsilon, double t);

QuadratureResult verify_lemma(AppendixLemmaId id, double D, double lambda, double epsilon, double tol = 1e-10);

struct CalibrationCase {
    std::string name;
    double numeric = 0.0;
    double exact = 0.0;
    double abs_err = 0.0;
};

std::vector<CalibrationCase> calibrate_integrators(double tol = 1e-10);

}  // namespace bubble
