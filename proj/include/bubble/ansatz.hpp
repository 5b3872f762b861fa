#pragma once

#include <functional>
#include <vector>

#include "bubble/bubble.hpp"
#include "bubble/curvature.hpp"
#include "bubble/grid.hpp"

namespace bubble {

// Boundary flux pieces at angle t = theta - theta_xi.
struct FluxPoint {
    double I1 = 0.0;
    double I2 = 0.0;
    double mollifier = 0.0;
};

FluxPoint flux_point(double t, double D, double lambda, double epsilon);

// Samples live on the stretched trapezoid nodes theta[j] with weights weight[j] (sum 2 pi).
struct FluxDecomposition {
    double theta_xi = 0.0;
    double D = 0.0;
    double lambda = 1.0;
    double epsilon = 0.1;
    int n_quad = 0;
    double stretch = 1.0;
    std::vector<double> theta, weight;
    std::vector<double> I1, I2, mollifier;
    double int_I1 = 0.0, int_I2 = 0.0, int_mollifier = 0.0, int_abs_I1 = 0.0;
    double d = 0.0;
    double d_refined = 0.0;  // same at 2 n_quad
    double compatibility = 0.0;  // integral of I1 + I2 - d mollifier

    // Neumann data g = I1 + I2 - d mollifier at any boundary angle.
    double g(double theta) const;
};

// Throws QuadratureNotConverged when d at n_quad and 2 n_quad differ by more than 1e-8.
FluxDecomposition compute_flux(const CurvatureField& field, const BubbleParams& p, int n_quad = 512);

// H(r, theta) = sum_n r^n (a_n cos n theta + b_n sin n theta)/n, i.e. Re F(zeta) with
// F = sum (a_n - i b_n) zeta^n / n. Index 0 of a, b is unused.
struct HarmonicCorrection {
    std::vector<double> a, b;
    int n_modes = 0;
    double mean = 0.0;        // mean of the Neumann data that was dropped
    double tail_ratio = 0.0;  // largest coefficient in the top quarter of modes over the largest overall
    bool tail_ok = true;

    double value(cplx zeta) const;
    cplx derivative(cplx zeta) const;  // F'
    double value_x(Vec2 x) const { return value(to_zeta(x)); }
    Vec2 gradient_x(Vec2 x) const;
    double normal_derivative(double theta) const;
};

// Neumann problem with data g on the unit circle; n_modes doubles (up to max_modes) until the tail
// criterion holds. Throws FluxNotCompatible if the mean of g exceeds 1e-8.
// Samples are taken at origin + 2 pi j / M.
HarmonicCorrection solve_harmonic_neumann(const std::function<double(double)>& g, int n_modes,
                                          int max_modes = 16384, double origin = 0.0);
HarmonicCorrection solve_H0(const FluxDecomposition& flux, int n_modes = 256);

struct AnsatzOptions {
    int n_quad = 512;
    int n_modes = 256;
    bool zero_H0 = false;
};

struct AnsatzField {
    BubbleParams bubble;
    DiscBubbleFrame frame;
    FluxDecomposition flux;
    HarmonicCorrection correction;
    bool H0_zeroed = false;

    // x-variables: U = U0 + H0.
    double U(Vec2 x) const;
    Vec2 grad_U(Vec2 x) const;
    double H0(Vec2 x) const { return H0_zeroed ? 0.0 : correction.value_x(x); }
};

AnsatzField assemble_ansatz(const CurvatureField& field, const BubbleParams& p, const AnsatzOptions& opt = {});

// V(y) = U(eps y) + 2 ln eps.
double eval_ansatz(const AnsatzField& a, Vec2 y);

// Chart focused at xi with magnification sqrt(lambda eps sqrt(1 + D^2)), capped at 1.
ChartSpec bubble_chart(const DiscBubbleFrame& fr);

// U at the grid nodes.
Field ansatz_on_grid(const AnsatzField& a, const SolverGrid& g);

struct ErrorReport {
    std::vector<Sample> R1, R2;  // y-variable samples
    WeightedNormReport norms;
    double R1_max = 0.0, R2_max = 0.0;
    double R1_far = 0.0, R2_far = 0.0;  // outside |x - xi| >= far_radius
    double far_radius = 0.5;
};

// R1 = Lap V + K e^{2V}, R2 = -dV/dn - eps + kappa e^V on the grid nodes plus log-spaced samples
// along the boundary and the inward normal at xi.
ErrorReport eval_errors(const AnsatzField& a, const CurvatureField& field, const SolverGrid& g, double alpha = 0.9);
ErrorReport eval_errors(const AnsatzField& a, const CurvatureField& field, double alpha = 0.9);

}  // namespace bubble
