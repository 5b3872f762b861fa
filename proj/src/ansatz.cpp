#include "bubble/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/FFT>

#include "bubble/errors.hpp"

namespace bubble {

FluxPoint flux_point(double t, double D, double lambda, double epsilon) {
    const double le = lambda * epsilon;
    const double delta = D * le;
    const double s = std::sin(0.5 * t);
    const double s2 = s * s;
    const double Qx = le * le + delta * delta + 4.0 * (1.0 + delta) * s2;
    FluxPoint f;
    // (x - xi).n(x) = 2 s^2 and 1 - n(xi).n(x) = 2 s^2 on the unit circle
    f.I1 = 4.0 * s2 / Qx - 1.0;
    f.I2 = 2.0 * delta * 2.0 * s2 / Qx;
    f.mollifier = le * le / (le * le + 4.0 * s2);
    return f;
}

namespace {

struct FluxLevel {
    std::vector<double> theta, weight, I1, I2, moll;
    double i1 = 0.0, i2 = 0.0, im = 0.0, a1 = 0.0;
};

FluxLevel flux_level(double theta_xi, double D, double lambda, double epsilon, double beta, int n) {
    FluxLevel L;
    L.theta.resize(n);
    L.weight.resize(n);
    L.I1.resize(n);
    L.I2.resize(n);
    L.moll.resize(n);
    const double h = two_pi / n;
    for (int j = 0; j < n; ++j) {
        const double ph = -pi + h * j;
        const double c = std::cos(0.5 * ph), s = std::sin(0.5 * ph);
        const double t = 2.0 * std::atan2(beta * s, c);
        const double w = h * beta / (c * c + beta * beta * s * s);
        const FluxPoint f = flux_point(t, D, lambda, epsilon);
        L.theta[j] = wrap_angle(theta_xi + t);
        L.weight[j] = w;
        L.I1[j] = f.I1;
        L.I2[j] = f.I2;
        L.moll[j] = f.mollifier;
        L.i1 += w * f.I1;
        L.i2 += w * f.I2;
        L.im += w * f.mollifier;
        L.a1 += w * std::abs(f.I1);
    }
    return L;
}

}  // namespace

double FluxDecomposition::g(double th) const {
    const FluxPoint f = flux_point(th - theta_xi, D, lambda, epsilon);
    return f.I1 + f.I2 - d * f.mollifier;
}

FluxDecomposition compute_flux(const CurvatureField& field, const BubbleParams& p, int n_quad) {
    if (n_quad < 512) throw validation_error("QuadratureSizeInvalid", "n_quad must be >= 512");
    const DiscBubbleFrame fr(p, field);
    FluxDecomposition F;
    F.theta_xi = fr.theta;
    F.D = fr.D;
    F.lambda = fr.lambda;
    F.epsilon = fr.epsilon;
    F.n_quad = n_quad;
    F.stretch = std::min(1.0, std::sqrt(fr.lambda * fr.epsilon * std::sqrt(1.0 + fr.D * fr.D)));

    FluxLevel L = flux_level(F.theta_xi, F.D, F.lambda, F.epsilon, F.stretch, n_quad);
    const FluxLevel L2 = flux_level(F.theta_xi, F.D, F.lambda, F.epsilon, F.stretch, 2 * n_quad);
    F.d = (L.i1 + L.i2) / L.im;
    F.d_refined = (L2.i1 + L2.i2) / L2.im;
    if (!(std::abs(F.d - F.d_refined) <= 1e-8))
        throw numerical_error("QuadratureNotConverged", "flux constant d moves by more than 1e-8 under node doubling");
    F.theta = std::move(L.theta);
    F.weight = std::move(L.weight);
    F.I1 = std::move(L.I1);
    F.I2 = std::move(L.I2);
    F.mollifier = std::move(L.moll);
    F.int_I1 = L.i1;
    F.int_I2 = L.i2;
    F.int_mollifier = L.im;
    F.int_abs_I1 = L.a1;
    F.compatibility = L.i1 + L.i2 - F.d * L.im;
    return F;
}

double HarmonicCorrection::value(cplx zeta) const {
    cplx acc = 0.0;
    for (int n = n_modes; n >= 1; --n) acc = acc * zeta + cplx(a[n], -b[n]) / double(n);
    return (acc * zeta).real();
}

cplx HarmonicCorrection::derivative(cplx zeta) const {
    cplx acc = 0.0;
    for (int n = n_modes; n >= 1; --n) acc = acc * zeta + cplx(a[n], -b[n]);
    return acc;
}

Vec2 HarmonicCorrection::gradient_x(Vec2 x) const {
    const cplx d = derivative(to_zeta(x));
    return grad_from_zeta(d.real(), -d.imag());
}

double HarmonicCorrection::normal_derivative(double theta) const {
    double s = 0.0;
    for (int n = 1; n <= n_modes; ++n) s += a[n] * std::cos(n * theta) + b[n] * std::sin(n * theta);
    return s;
}

HarmonicCorrection solve_harmonic_neumann(const std::function<double(double)>& g, int n_modes, int max_modes,
                                          double origin) {
    if (n_modes < 1) throw validation_error("ModeCountInvalid", "n_modes must be positive");
    Eigen::FFT<double> fft;
    HarmonicCorrection H;
    int N = n_modes;
    while (true) {
        const int M = 4 * N;
        std::vector<double> samples(M);
        for (int j = 0; j < M; ++j) samples[j] = g(origin + two_pi * j / M);
        std::vector<cplx> X;
        fft.fwd(X, samples);
        H.a.assign(N + 1, 0.0);
        H.b.assign(N + 1, 0.0);
        double big = 0.0, tail = 0.0;
        for (int n = 1; n <= N; ++n) {
            // coefficients about origin, rotated back to absolute angle
            const double ar = 2.0 * X[n].real() / M, br = -2.0 * X[n].imag() / M;
            const double c = std::cos(n * origin), sn = std::sin(n * origin);
            H.a[n] = ar * c - br * sn;
            H.b[n] = ar * sn + br * c;
            const double m = std::hypot(H.a[n], H.b[n]);
            big = std::max(big, m);
            if (4 * n > 3 * N) tail = std::max(tail, m);
        }
        H.n_modes = N;
        H.mean = X[0].real() / M;
        H.tail_ratio = big > 0.0 ? tail / big : 0.0;
        H.tail_ok = H.tail_ratio < 1e-8;
        if (H.tail_ok || 2 * N > max_modes) break;
        N *= 2;
    }
    if (!(std::abs(H.mean) <= 1e-8))
        throw numerical_error("FluxNotCompatible", "Neumann data has nonzero mean " + std::to_string(H.mean));
    return H;
}

HarmonicCorrection solve_H0(const FluxDecomposition& flux, int n_modes) {
    return solve_harmonic_neumann([&](double th) { return flux.g(th); }, n_modes, 16384, flux.theta_xi);
}

double AnsatzField::U(Vec2 x) const {
    return std::log(2.0 * frame.lambda / (std::sqrt(frame.K_xi) * frame.Q(x))) + H0(x);
}

Vec2 AnsatzField::grad_U(Vec2 x) const {
    const Jet2 j = disc_bubble_jet(frame, x);
    Vec2 gr{j.d1, j.d2};
    if (!H0_zeroed) gr = gr + correction.gradient_x(x);
    return gr;
}

AnsatzField assemble_ansatz(const CurvatureField& field, const BubbleParams& p, const AnsatzOptions& opt) {
    FluxDecomposition flux = compute_flux(field, p, opt.n_quad);
    HarmonicCorrection H = solve_H0(flux, opt.n_modes);
    return AnsatzField{p, DiscBubbleFrame(p, field), std::move(flux), std::move(H), opt.zero_H0};
}

double eval_ansatz(const AnsatzField& a, Vec2 y) {
    const double e = a.frame.epsilon;
    return a.U(e * y) + 2.0 * std::log(e);
}

ChartSpec bubble_chart(const DiscBubbleFrame& fr) {
    const double beta = std::min(1.0, std::sqrt(fr.lambda * fr.epsilon * std::sqrt(1.0 + fr.D * fr.D)));
    return {fr.theta, beta};
}

Field ansatz_on_grid(const AnsatzField& a, const SolverGrid& g) {
    Field u(g.n_r(), g.n_theta());
    for (int k = 0; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l) u(k, l) = a.U(g.x(k, l));
    return u;
}

namespace {

double R1_at(const AnsatzField& a, const CurvatureField& f, Vec2 x) {
    const double e = a.frame.epsilon;
    const double U0 = std::log(2.0 * a.frame.lambda / (std::sqrt(a.frame.K_xi) * a.frame.Q(x)));
    const double U = U0 + a.H0(x);
    return e * e * e * e * (f.K(x) * std::exp(2.0 * U) - a.frame.K_xi * std::exp(2.0 * U0));
}

double R2_at(const AnsatzField& a, const CurvatureField& f, double theta) {
    const double e = a.frame.epsilon;
    const Vec2 x = boundary_point(theta);
    const double dn = dot(a.grad_U(x), outward_normal(theta));
    return e * (-dn - 1.0 + e * f.kappa(theta) * std::exp(a.U(x)));
}

}  // namespace

ErrorReport eval_errors(const AnsatzField& a, const CurvatureField& field, const SolverGrid& g, double alpha) {
    ErrorReport r;
    const double e = a.frame.epsilon;
    const Vec2 xi = a.frame.xi;
    auto add_int = [&](Vec2 x) {
        const double v = R1_at(a, field, x);
        r.R1.push_back({(1.0 / e) * x, v});
        r.R1_max = std::max(r.R1_max, std::abs(v));
        if (std::sqrt(norm2(x - xi)) >= r.far_radius) r.R1_far = std::max(r.R1_far, std::abs(v));
    };
    auto add_bdy = [&](double th) {
        const Vec2 x = boundary_point(th);
        const double v = R2_at(a, field, th);
        r.R2.push_back({(1.0 / e) * x, v});
        r.R2_max = std::max(r.R2_max, std::abs(v));
        if (std::sqrt(norm2(x - xi)) >= r.far_radius) r.R2_far = std::max(r.R2_far, std::abs(v));
    };
    for (int k = 1; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l) add_int(g.x(k, l));
    for (int l = 0; l < g.n_theta(); ++l) add_bdy(g.theta_boundary(l));

    const int n_log = 200;
    const double s_lo = std::log(1e-2), s_hi = std::log(pi / e);
    for (int i = 0; i < n_log; ++i) {
        const double s = std::exp(s_lo + (s_hi - s_lo) * i / (n_log - 1));
        add_bdy(a.frame.theta + e * s);
        add_bdy(a.frame.theta - e * s);
        for (double ang : {0.0, 0.25 * pi, -0.25 * pi, 0.45 * pi, -0.45 * pi}) {
            // rays into the disc from xi
            const Vec2 dir = std::cos(ang) * (-1.0 * a.frame.n) + std::sin(ang) * boundary_tangent(a.frame.theta);
            const Vec2 x = xi + (e * s) * dir;
            if (norm2(x - disc_center) < 1.0) add_int(x);
        }
    }
    r.norms = weighted_norms(r.R1, r.R2, (1.0 / e) * xi, alpha);
    return r;
}

ErrorReport eval_errors(const AnsatzField& a, const CurvatureField& field, double alpha) {
    const SolverGrid g(128, 48, bubble_chart(a.frame));
    return eval_errors(a, field, g, alpha);
}

}  // namespace bubble
