#include "bubble/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bubble/errors.hpp"

namespace bubble {

Poly2 Poly2::constant(double c) {
    Poly2 p;
    p.add_term(0, 0, c);
    return p;
}

void Poly2::add_term(int i, int j, double c) {
    if (i < 0 || j < 0 || i + j > max_degree) {
        std::ostringstream os;
        os << "K term x1^" << i << " x2^" << j << " outside degree cap " << max_degree;
        throw validation_error("CurvatureSpecInvalid", os.str());
    }
    if (!std::isfinite(c)) throw validation_error("CurvatureSpecInvalid", "K coefficient not finite");
    c_[{i, j}] += c;
}

double Poly2::operator()(Vec2 x) const {
    double s = 0.0;
    for (const auto& [e, c] : c_) s += c * std::pow(x.x1, e.first) * std::pow(x.x2, e.second);
    return s;
}

Vec2 Poly2::gradient(Vec2 x) const {
    Vec2 g;
    for (const auto& [e, c] : c_) {
        const auto [i, j] = e;
        if (i > 0) g.x1 += c * i * std::pow(x.x1, i - 1) * std::pow(x.x2, j);
        if (j > 0) g.x2 += c * j * std::pow(x.x1, i) * std::pow(x.x2, j - 1);
    }
    return g;
}

int Poly2::degree() const {
    int d = 0;
    for (const auto& [e, c] : c_)
        if (c != 0.0) d = std::max(d, e.first + e.second);
    return d;
}

bool Poly2::is_constant() const {
    for (const auto& [e, c] : c_)
        if ((e.first + e.second) > 0 && c != 0.0) return false;
    return true;
}

std::vector<std::pair<std::pair<int, int>, double>> Poly2::terms() const {
    return {c_.begin(), c_.end()};
}

Poly2 Poly2::operator+(const Poly2& o) const {
    Poly2 r = *this;
    for (const auto& [e, c] : o.c_) r.c_[e] += c;
    return r;
}

Poly2 Poly2::operator*(const Poly2& o) const {
    Poly2 r;
    for (const auto& [e1, c1] : c_)
        for (const auto& [e2, c2] : o.c_) r.c_[{e1.first + e2.first, e1.second + e2.second}] += c1 * c2;
    return r;
}

Poly2 Poly2::scaled(double s) const {
    Poly2 r = *this;
    for (auto& kv : r.c_) kv.second *= s;
    return r;
}

Poly2 Poly2::rotated(double beta) const {
    // x -> c + R_{-beta}(x - c), c = (0,1):
    // y1 = cos(b) x1 + sin(b) (x2 - 1), y2 = 1 - sin(b) x1 + cos(b) (x2 - 1)
    const double cb = std::cos(beta), sb = std::sin(beta);
    Poly2 y1, y2;
    y1.c_[{1, 0}] = cb;
    y1.c_[{0, 1}] = sb;
    y1.c_[{0, 0}] = -sb;
    y2.c_[{1, 0}] = -sb;
    y2.c_[{0, 1}] = cb;
    y2.c_[{0, 0}] = 1.0 - cb;
    Poly2 out;
    for (const auto& [e, c] : c_) {
        Poly2 t = Poly2::constant(c);
        for (int k = 0; k < e.first; ++k) t = t * y1;
        for (int k = 0; k < e.second; ++k) t = t * y2;
        out = out + t;
    }
    return out;
}

Fourier1::Fourier1(std::vector<double> a, std::vector<double> b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.empty()) a_.push_back(0.0);
    const std::size_t n = std::max(a_.size(), b_.size());
    a_.resize(n, 0.0);
    b_.resize(n, 0.0);
    b_[0] = 0.0;
    if (static_cast<int>(n) - 1 > max_modes)
        throw validation_error("CurvatureSpecInvalid", "kappa has more than 32 Fourier modes");
    for (std::size_t k = 0; k < n; ++k)
        if (!std::isfinite(a_[k]) || !std::isfinite(b_[k]))
            throw validation_error("CurvatureSpecInvalid", "kappa coefficient not finite");
}

double Fourier1::operator()(double theta) const {
    double s = a_[0];
    for (std::size_t k = 1; k < a_.size(); ++k)
        s += a_[k] * std::cos(k * theta) + b_[k] * std::sin(k * theta);
    return s;
}

double Fourier1::derivative(double theta) const {
    double s = 0.0;
    for (std::size_t k = 1; k < a_.size(); ++k)
        s += k * (-a_[k] * std::sin(k * theta) + b_[k] * std::cos(k * theta));
    return s;
}

bool Fourier1::is_constant() const {
    for (std::size_t k = 1; k < a_.size(); ++k)
        if (a_[k] != 0.0 || b_[k] != 0.0) return false;
    return true;
}

Fourier1 Fourier1::rotated(double beta) const {
    std::vector<double> a = a_, b = b_;
    for (std::size_t k = 1; k < a_.size(); ++k) {
        const double c = std::cos(k * beta), s = std::sin(k * beta);
        a[k] = a_[k] * c - b_[k] * s;
        b[k] = a_[k] * s + b_[k] * c;
    }
    return Fourier1(a, b);
}

namespace {

constexpr double positivity_floor = 1e-3;

void check_K_positive(const Poly2& K, int n) {
    const int nr = std::max(8, static_cast<int>(std::sqrt(static_cast<double>(n))));
    const int nt = std::max(8, n / nr);
    for (int i = 0; i <= nr; ++i) {
        const double r = static_cast<double>(i) / nr;
        for (int j = 0; j < nt; ++j) {
            const double t = two_pi * j / nt;
            const Vec2 x = from_zeta(std::polar(r, t));
            const double v = K(x);
            if (v <= 0.0 || !std::isfinite(v)) {
                std::ostringstream os;
                os << "K not positive at x = (" << x.x1 << ", " << x.x2 << "): " << v;
                throw validation_error("CurvatureNotPositive", os.str());
            }
            if (v < positivity_floor) {
                // local refinement around the low sample
                const double hr = 1.0 / nr, ht = two_pi / nt;
                for (int a = -8; a <= 8; ++a)
                    for (int b = -8; b <= 8; ++b) {
                        const double rr = std::clamp(r + a * hr / 8.0, 0.0, 1.0);
                        const double w = K(from_zeta(std::polar(rr, t + b * ht / 8.0)));
                        if (w <= 0.0)
                            throw validation_error("CurvatureNotPositive",
                                                   "K not positive near a low validation sample");
                    }
            }
        }
    }
}

void check_kappa_positive(const Fourier1& k, int n) {
    for (int j = 0; j < n; ++j) {
        const double t = two_pi * j / n;
        const double v = k(t);
        if (v <= 0.0 || !std::isfinite(v)) {
            std::ostringstream os;
            os << "kappa not positive at theta = " << t << ": " << v;
            throw validation_error("CurvatureNotPositive", os.str());
        }
        if (v < positivity_floor) {
            for (int b = -16; b <= 16; ++b)
                if (k(t + b * two_pi / n / 16.0) <= 0.0)
                    throw validation_error("CurvatureNotPositive",
                                           "kappa not positive near a low validation sample");
        }
    }
}

}  // namespace

CurvatureField::CurvatureField(Poly2 K, Fourier1 kappa, int validation_grid_size)
    : K_(std::move(K)), kappa_(std::move(kappa)), n_valid_(validation_grid_size) {
    if (n_valid_ < 64) throw validation_error("CurvatureSpecInvalid", "validation grid below 64 points");
    check_K_positive(K_, n_valid_);
    check_kappa_positive(kappa_, n_valid_);
}

CurvatureField CurvatureField::rotated(double beta) const {
    return CurvatureField(K_.rotated(beta), kappa_.rotated(beta), n_valid_);
}

CurvaturePair eval_curvatures(const CurvatureField& f, double theta) {
    return {f.K(boundary_point(theta)), f.kappa(theta)};
}

ReducedValue eval_reduced(const CurvatureField& f, double theta) {
    const auto [K, k] = eval_curvatures(f, theta);
    return {k + std::sqrt(K + k * k), k / std::sqrt(K)};
}

double D_ratio(const CurvatureField& f, double theta) { return eval_reduced(f, theta).D_ratio; }

double reduced_derivative(const CurvatureField& f, double theta) {
    const Vec2 x = boundary_point(theta);
    const double K = f.K(x), k = f.kappa(theta);
    const double Kt = dot(f.grad_K(x), boundary_tangent(theta));
    const double kt = f.kappa_prime(theta);
    return kt + (Kt + 2.0 * k * kt) / (2.0 * std::sqrt(K + k * k));
}

const char* to_string(ExtremumKind k) { return k == ExtremumKind::max ? "max" : "min"; }

namespace {

double phi(const CurvatureField& f, double t) { return eval_reduced(f, t).phi_red; }

// Golden section on [a, b] for a max (sign = 1) or min (sign = -1), then bisection on phi'.
double refine(const CurvatureField& f, double a, double b, double sign) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = sign * phi(f, c), fd = sign * phi(f, d);
    while (b - a > 1e-6) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = sign * phi(f, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = sign * phi(f, d);
        }
    }
    double lo = a - 1e-6, hi = b + 1e-6;
    double dlo = sign * reduced_derivative(f, lo), dhi = sign * reduced_derivative(f, hi);
    if (!(dlo > 0.0 && dhi < 0.0)) return 0.5 * (a + b);
    while (hi - lo > 1e-12) {
        const double m = 0.5 * (lo + hi);
        const double dm = sign * reduced_derivative(f, m);
        if (dm > 0.0)
            lo = m;
        else
            hi = m;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<Extremum> find_extremum_reduced(const CurvatureField& f, int n_scan) {
    if (n_scan < 64) throw validation_error("ScanTooCoarse", "find_extremum_reduced needs n_scan >= 64");
    std::vector<double> v(n_scan);
    for (int i = 0; i < n_scan; ++i) v[i] = phi(f, two_pi * i / n_scan);
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    if (*mx - *mn < 1e-12) return {};
    std::vector<Extremum> out;
    const double h = two_pi / n_scan;
    for (int i = 0; i < n_scan; ++i) {
        const double l = v[(i + n_scan - 1) % n_scan], c = v[i], r = v[(i + 1) % n_scan];
        int kind = 0;
        if (c > l && c >= r) kind = 1;
        if (c < l && c <= r) kind = -1;
        if (kind == 0) continue;
        const double t0 = h * i;
        const double t = wrap_angle(refine(f, t0 - h, t0 + h, kind));
        out.push_back({t, kind > 0 ? ExtremumKind::max : ExtremumKind::min, phi(f, t)});
    }
    std::sort(out.begin(), out.end(), [](const Extremum& a, const Extremum& b) { return a.theta < b.theta; });
    return out;
}

std::vector<Extremum> require_extremum(const CurvatureField& f, int n_scan) {
    auto e = find_extremum_reduced(f, n_scan);
    if (e.empty())
        throw validation_error("ConstantReducedFunctional",
                               "phi_red is constant; no boundary extremum to locate");
    return e;
}

}  // namespace bubble
