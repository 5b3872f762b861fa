#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "bubble/geometry.hpp"

namespace bubble {

// Node arrays are n_r x n_theta, row k = radial node (k = 0 is the boundary), column l = angle.
using Field = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Moebius chart zeta = e^{i theta0} (z + rho)/(1 + rho z), rho = (1-beta)/(1+beta).
// |f'| equals beta at z = 1, so beta < 1 magnifies the neighbourhood of the boundary point theta0.
// The node set rotates with theta0.
struct ChartSpec {
    double theta0 = 0.0;
    double beta = 1.0;
};

class SolverGrid {
public:
    SolverGrid(int n_theta, int n_r, ChartSpec chart = {});

    int n_theta() const { return nt_; }
    int n_r() const { return nr_; }
    int size() const { return nt_ * nr_; }
    int index(int k, int l) const { return k * nt_ + l; }
    const ChartSpec& chart() const { return chart_; }

    double r(int k) const { return r_(k); }
    double phi(int l) const { return two_pi * l / nt_; }
    cplx z(int k, int l) const { return std::polar(r_(k), phi(l)); }
    cplx zeta(int k, int l) const { return zeta_(k, l); }
    Vec2 x(int k, int l) const { return from_zeta(zeta_(k, l)); }
    // ln|f'| and |f'| at the node.
    double L(int k, int l) const { return L_(k, l); }
    double fp(int k, int l) const { return fp_(k, l); }
    const Field& L() const { return L_; }
    const Field& fp() const { return fp_; }
    // Boundary angle of boundary node l.
    double theta_boundary(int l) const;

    // Area weights in the chart variable (sum = pi) and arc weights on |z| = 1.
    const Field& area_weights() const { return wA_; }
    double arc_weight() const { return two_pi / nt_; }

    // Chart derivatives applied to a node array.
    Field laplacian(const Field& u) const;
    Field d_r(const Field& u) const;
    Field d_phi(const Field& u) const;

    // Adds the discrete chart Laplacian (scaled) into rows of a dense n x n matrix; boundary rows untouched.
    void add_laplacian(Eigen::Ref<Eigen::MatrixXd> J, double scale) const;
    // Sets row index(0,l) to the discrete d/dr at boundary node l (scaled), all other entries untouched.
    void add_boundary_dr(Eigen::Ref<Eigen::MatrixXd> J, double scale) const;

    // Spectral interpolation of a node array at chart point z, |z| <= 1.
    double interpolate(const Field& u, cplx z) const;
    // Chart point of physical zeta.
    cplx chart_of(cplx zeta) const;

    const Eigen::MatrixXd& D1() const { return D1_; }
    const Eigen::MatrixXd& D2() const { return D2_; }
    const Eigen::MatrixXd& E1() const { return E1_; }
    const Eigen::MatrixXd& E2() const { return E2_; }
    const Eigen::MatrixXd& Dt() const { return Dt_; }
    const Eigen::MatrixXd& Dtt() const { return Dtt_; }

private:
    int nt_, nr_;
    ChartSpec chart_;
    Eigen::VectorXd r_;
    Eigen::VectorXd x_full_;  // all 2 n_r Chebyshev nodes
    Eigen::MatrixXd D1_, D2_, E1_, E2_, Dt_, Dtt_;
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> zeta_;
    Field L_, fp_, wA_;

    Field shifted(const Field& u) const;  // u(k, l + n_theta/2)
};

struct GridCheck {
    std::string name;
    double error = 0.0;
    double tolerance = 0.0;
    bool pass() const { return error <= tolerance; }
};

// Harmonic reproduction, normal derivative and area checks; all tolerances fixed.
std::vector<GridCheck> grid_checks(const SolverGrid& g);

// Builds and validates; throws GridValidationFailed naming the failing check.
std::shared_ptr<const SolverGrid> build_grid(int n_theta, int n_r, ChartSpec chart = {});

}  // namespace bubble
