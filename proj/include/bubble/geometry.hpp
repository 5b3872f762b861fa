#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace bubble {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
inline double dot(Vec2 a, Vec2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double norm2(Vec2 a) { return dot(a, a); }

// Angle in [0, 2pi).
inline double wrap_angle(double theta) {
    double t = std::fmod(theta, two_pi);
    if (t < 0.0) t += two_pi;
    if (t >= two_pi) t -= two_pi;
    return t;
}

// Angle in (-pi, pi].
inline double wrap_signed(double theta) {
    double t = wrap_angle(theta);
    return t > pi ? t - two_pi : t;
}

// The disc has center (0,1) and radius 1.
inline constexpr Vec2 disc_center{0.0, 1.0};

inline Vec2 boundary_point(double theta) { return {std::sin(theta), 1.0 - std::cos(theta)}; }
inline Vec2 outward_normal(double theta) { return {std::sin(theta), -std::cos(theta)}; }
inline Vec2 boundary_tangent(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Complex coordinate centered at the disc center, rotated so that arg(zeta) is the boundary angle.
inline cplx to_zeta(Vec2 x) { return {disc_center.x2 - x.x2, x.x1 - disc_center.x1}; }
inline Vec2 from_zeta(cplx z) { return {disc_center.x1 + z.imag(), disc_center.x2 - z.real()}; }

// Physical gradient from the zeta-plane gradient (d/dRe, d/dIm).
inline Vec2 grad_from_zeta(double d_re, double d_im) { return {d_im, -d_re}; }

// Rotation about the disc center taking xi(theta) to xi(theta + beta).
inline Vec2 rotate_about_center(Vec2 x, double beta) {
    const double c = std::cos(beta), s = std::sin(beta);
    const Vec2 d = x - disc_center;
    return disc_center + Vec2{c * d.x1 - s * d.x2, s * d.x1 + c * d.x2};
}

}  // namespace bubble
