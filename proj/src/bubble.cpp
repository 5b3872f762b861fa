#include "bubble/bubble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bubble/errors.hpp"

namespace bubble {

void HalfPlaneBubbleParams::validate() const {
    if (!(a > 0.0)) throw validation_error("BubbleParamsInvalid", "half-plane bubble needs a > 0");
    if (!(b > 0.0)) throw validation_error("BubbleParamsInvalid", "half-plane bubble needs b > 0");
    if (!(lambda > 0.0)) throw validation_error("BubbleParamsInvalid", "half-plane bubble needs lambda > 0");
}

double HalfPlaneBubbleParams::c() const { return b / std::sqrt(a); }

double eval_half_plane_bubble(const HalfPlaneBubbleParams& p, Vec2 x) {
    const double X = x.x1 - p.s, Y = x.x2 + p.c() * p.lambda;
    return std::log(2.0 * p.lambda / (std::sqrt(p.a) * (p.lambda * p.lambda + X * X + Y * Y)));
}

Jet2 half_plane_bubble_jet(const HalfPlaneBubbleParams& p, Vec2 x) {
    const double X = x.x1 - p.s, Y = x.x2 + p.c() * p.lambda;
    const double Q = p.lambda * p.lambda + X * X + Y * Y;
    Jet2 j;
    j.v = std::log(2.0 * p.lambda / (std::sqrt(p.a) * Q));
    j.d1 = -2.0 * X / Q;
    j.d2 = -2.0 * Y / Q;
    j.d11 = -2.0 / Q + 4.0 * X * X / (Q * Q);
    j.d22 = -2.0 / Q + 4.0 * Y * Y / (Q * Q);
    j.d12 = 4.0 * X * Y / (Q * Q);
    return j;
}

ResidualReport half_plane_residual(const HalfPlaneBubbleParams& p, const std::vector<Vec2>& interior,
                                   const std::vector<double>& boundary_x1) {
    p.validate();
    ResidualReport r;
    for (const Vec2& x : interior) {
        const Jet2 j = half_plane_bubble_jet(p, x);
        r.interior = std::max(r.interior, std::abs(-j.laplacian() - p.a * std::exp(2.0 * j.v)));
    }
    for (double x1 : boundary_x1) {
        const Jet2 j = half_plane_bubble_jet(p, {x1, 0.0});
        r.boundary = std::max(r.boundary, std::abs(-j.d2 - p.b * std::exp(j.v)));
    }
    return r;
}

void BubbleParams::validate() const {
    if (!(lambda > 0.0)) throw validation_error("BubbleParamsInvalid", "lambda must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw validation_error("BubbleParamsInvalid", "epsilon must lie in (0,1)");
    if (!std::isfinite(theta_xi)) throw validation_error("BubbleParamsInvalid", "theta_xi not finite");
}

DiscBubbleFrame::DiscBubbleFrame(const BubbleParams& p, const CurvatureField& f)
    : theta(wrap_angle(p.theta_xi)), lambda(p.lambda), epsilon(p.epsilon) {
    p.validate();
    xi = boundary_point(theta);
    n = outward_normal(theta);
    K_xi = f.K(xi);
    kappa_xi = f.kappa(theta);
    D = kappa_xi / std::sqrt(K_xi);
    center = xi + (D * lambda * epsilon) * n;
}

double eval_disc_bubble(const BubbleParams& p, const CurvatureField& f, Vec2 x) {
    const DiscBubbleFrame fr(p, f);
    return std::log(2.0 * fr.lambda / (std::sqrt(fr.K_xi) * fr.Q(x)));
}

Jet2 disc_bubble_jet(const DiscBubbleFrame& fr, Vec2 x) {
    const Vec2 X = x - fr.center;
    const double Q = fr.Q(x);
    Jet2 j;
    j.v = std::log(2.0 * fr.lambda / (std::sqrt(fr.K_xi) * Q));
    j.d1 = -2.0 * X.x1 / Q;
    j.d2 = -2.0 * X.x2 / Q;
    j.d11 = -2.0 / Q + 4.0 * X.x1 * X.x1 / (Q * Q);
    j.d22 = -2.0 / Q + 4.0 * X.x2 * X.x2 / (Q * Q);
    j.d12 = 4.0 * X.x1 * X.x2 / (Q * Q);
    return j;
}

double disc_bubble_dlambda(const DiscBubbleFrame& fr, Vec2 x) {
    const double e = fr.epsilon;
    const double dQ = 2.0 * fr.lambda * e * e - 2.0 * dot(x - fr.center, (fr.D * e) * fr.n);
    return 1.0 / fr.lambda - dQ / fr.Q(x);
}

double disc_bubble_dtheta(const DiscBubbleFrame& fr, const CurvatureField& f, Vec2 x) {
    const Vec2 t = boundary_tangent(fr.theta);
    const double Kt = dot(f.grad_K(fr.xi), t);
    const double kt = f.kappa_prime(fr.theta);
    const double sK = std::sqrt(fr.K_xi);
    const double Dt = kt / sK - 0.5 * fr.kappa_xi * Kt / (fr.K_xi * sK);
    const double le = fr.lambda * fr.epsilon;
    const Vec2 dp = t + le * (Dt * fr.n + fr.D * t);
    const double dQ = -2.0 * dot(x - fr.center, dp);
    return -0.5 * Kt / fr.K_xi - dQ / fr.Q(x);
}

double eval_kernel(int index, const HalfPlaneBubbleParams& p, Vec2 x) { return kernel_jet(index, p, x).v; }

Jet2 kernel_jet(int index, const HalfPlaneBubbleParams& p, Vec2 x) {
    if (index != 0 && index != 1) throw validation_error("KernelIndexInvalid", "kernel index must be 0 or 1");
    const double c = p.c(), l = p.lambda;
    const double X = x.x1, Y = x.x2 + c * l;
    const double Q = l * l + X * X + Y * Y;
    const double Q2 = Q * Q, Q3 = Q2 * Q;
    Jet2 j;
    if (index == 1) {
        j.v = X / Q;
        j.d1 = 1.0 / Q - 2.0 * X * X / Q2;
        j.d2 = -2.0 * X * Y / Q2;
        j.d11 = -6.0 * X / Q2 + 8.0 * X * X * X / Q3;
        j.d22 = -2.0 * X / Q2 + 8.0 * X * Y * Y / Q3;
        j.d12 = -2.0 * Y / Q2 + 8.0 * X * X * Y / Q3;
    } else {
        const double N = l + c * Y;
        j.v = 1.0 / (2.0 * l) - N / Q;
        j.d1 = 2.0 * X * N / Q2;
        j.d2 = -c / Q + 2.0 * N * Y / Q2;
        j.d11 = 2.0 * N / Q2 - 8.0 * X * X * N / Q3;
        j.d22 = 4.0 * c * Y / Q2 + 2.0 * N / Q2 - 8.0 * N * Y * Y / Q3;
        j.d12 = 2.0 * c * X / Q2 - 8.0 * X * N * Y / Q3;
    }
    return j;
}

double linearized_interior(const HalfPlaneBubbleParams& p, Vec2 x, const Jet2& phi) {
    const double Y = x.x2 + p.c() * p.lambda;
    const double Q = p.lambda * p.lambda + x.x1 * x.x1 + Y * Y;
    return phi.laplacian() + 8.0 * p.lambda * p.lambda / (Q * Q) * phi.v;
}

double linearized_boundary(const HalfPlaneBubbleParams& p, double x1, const Jet2& phi) {
    const double c = p.c();
    const double Q0 = p.lambda * p.lambda + x1 * x1 + c * c * p.lambda * p.lambda;
    return -phi.d2 - 2.0 * c * p.lambda / Q0 * phi.v;
}

ResidualReport kernel_annihilation(int index, const HalfPlaneBubbleParams& p, const std::vector<Vec2>& interior,
                                   const std::vector<double>& boundary_x1) {
    p.validate();
    HalfPlaneBubbleParams q = p;
    q.s = 0.0;
    ResidualReport r;
    for (const Vec2& x : interior)
        r.interior = std::max(r.interior, std::abs(linearized_interior(q, x, kernel_jet(index, q, x))));
    for (double x1 : boundary_x1)
        r.boundary = std::max(r.boundary, std::abs(linearized_boundary(q, x1, kernel_jet(index, q, {x1, 0.0}))));
    return r;
}

double interior_weight(double r) { return 1.0 + r * r * std::pow(std::log1p(r), 3); }
double boundary_weight(double r) { return 1.0 + r * std::pow(std::log1p(r), 3); }

WeightedNormReport weighted_norms(const std::vector<Sample>& interior, const std::vector<Sample>& boundary,
                                  Vec2 xi_prime, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw validation_error("AlphaInvalid", "alpha must lie in (0,1)");
    WeightedNormReport w;
    w.alpha_used = alpha;
    for (const Sample& s : interior) {
        const double r = std::sqrt(norm2(s.y - xi_prime));
        w.interior_norm = std::max(w.interior_norm, std::abs(s.value) * interior_weight(r));
    }
    for (const Sample& s : boundary) {
        const double r = std::sqrt(norm2(s.y - xi_prime));
        w.boundary_norm = std::max(w.boundary_norm, std::abs(s.value) * boundary_weight(r));
    }
    return w;
}

}  // namespace bubble
