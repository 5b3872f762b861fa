#pragma once

#include <map>
#include <utility>
#include <vector>

#include "bubble/geometry.hpp"

namespace bubble {

// Bivariate polynomial sum c_ij x1^i x2^j with i + j <= max_degree.
class Poly2 {
public:
    static constexpr int max_degree = 8;

    Poly2() = default;
    static Poly2 constant(double c);
    // Throws ValidationError when a term exceeds max_degree or has negative exponent.
    void add_term(int i, int j, double c);

    double operator()(Vec2 x) const;
    Vec2 gradient(Vec2 x) const;
    int degree() const;
    bool is_constant() const;
    std::vector<std::pair<std::pair<int, int>, double>> terms() const;

    Poly2 operator+(const Poly2& o) const;
    Poly2 operator*(const Poly2& o) const;
    Poly2 scaled(double s) const;
    // p(c + R_{-beta}(x - c)), so values at xi(theta) move to xi(theta + beta).
    Poly2 rotated(double beta) const;

private:
    std::map<std::pair<int, int>, double> c_;
};

// a0 + sum_k (a_k cos k theta + b_k sin k theta); a[0] is the mean, b[0] is ignored.
class Fourier1 {
public:
    static constexpr int max_modes = 32;

    Fourier1() = default;
    Fourier1(std::vector<double> a, std::vector<double> b);
    static Fourier1 constant(double c) { return Fourier1({c}, {0.0}); }

    double operator()(double theta) const;
    double derivative(double theta) const;
    bool is_constant() const;
    int modes() const { return static_cast<int>(a_.size()) - 1; }
    const std::vector<double>& cos_coeffs() const { return a_; }
    const std::vector<double>& sin_coeffs() const { return b_; }
    // f(theta - beta).
    Fourier1 rotated(double beta) const;

private:
    std::vector<double> a_{0.0};
    std::vector<double> b_{0.0};
};

struct ReducedValue {
    double phi_red = 0.0;
    double D_ratio = 0.0;
};

struct CurvaturePair {
    double K = 0.0;
    double kappa = 0.0;
};

// Validated positive curvature data; construction fails on nonpositive samples.
class CurvatureField {
public:
    CurvatureField(Poly2 K, Fourier1 kappa, int validation_grid_size = 4096);

    static CurvatureField constant(double K, double kappa) {
        return CurvatureField(Poly2::constant(K), Fourier1::constant(kappa));
    }

    double K(Vec2 x) const { return K_(x); }
    Vec2 grad_K(Vec2 x) const { return K_.gradient(x); }
    double kappa(double theta) const { return kappa_(theta); }
    double kappa_prime(double theta) const { return kappa_.derivative(theta); }
    const Poly2& K_spec() const { return K_; }
    const Fourier1& kappa_spec() const { return kappa_; }
    int validation_grid_size() const { return n_valid_; }
    bool is_constant() const { return K_.is_constant() && kappa_.is_constant(); }

    CurvatureField rotated(double beta) const;

private:
    Poly2 K_;
    Fourier1 kappa_;
    int n_valid_;
};

CurvaturePair eval_curvatures(const CurvatureField& f, double theta);
ReducedValue eval_reduced(const CurvatureField& f, double theta);
double D_ratio(const CurvatureField& f, double theta);
// d phi_red / d theta from exact derivatives of the specs.
double reduced_derivative(const CurvatureField& f, double theta);

enum class ExtremumKind { max, min };

struct Extremum {
    double theta = 0.0;
    ExtremumKind kind = ExtremumKind::max;
    double phi_red = 0.0;
};

// Strict local extrema of phi_red, refined to |dtheta| <= 1e-10; empty when phi_red is constant.
std::vector<Extremum> find_extremum_reduced(const CurvatureField& f, int n_scan = 256);
// Same, but throws ConstantReducedFunctional for constant phi_red.
std::vector<Extremum> require_extremum(const CurvatureField& f, int n_scan = 256);

const char* to_string(ExtremumKind k);

}  // namespace bubble
