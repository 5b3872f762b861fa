#include "bubble/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bubble/errors.hpp"

namespace bubble {

namespace {

// Chebyshev first and second derivative matrices on x_j = cos(pi j / N); trig differences,
// negative-sum diagonals.
void cheb(int N, Eigen::MatrixXd& D, Eigen::MatrixXd& DD, Eigen::VectorXd& x) {
    x.resize(N + 1);
    for (int j = 0; j <= N; ++j) x(j) = std::sin(pi * (N - 2.0 * j) / (2.0 * N));
    Eigen::VectorXd c(N + 1);
    for (int j = 0; j <= N; ++j) c(j) = ((j == 0 || j == N) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
    Eigen::MatrixXd dx(N + 1, N + 1);
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j) dx(i, j) = 2.0 * std::sin(pi * (i + j) / (2.0 * N)) * std::sin(pi * (j - i) / (2.0 * N));
    D.setZero(N + 1, N + 1);
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j)
            if (i != j) D(i, j) = (c(i) / c(j)) / dx(i, j);
    for (int i = 0; i <= N; ++i) D(i, i) = -D.row(i).sum();
    DD.setZero(N + 1, N + 1);
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j)
            if (i != j) DD(i, j) = 2.0 * (D(i, i) * D(i, j) - D(i, j) / dx(i, j));
    for (int i = 0; i <= N; ++i) DD(i, i) = -DD.row(i).sum();
}

}  // namespace

SolverGrid::SolverGrid(int n_theta, int n_r, ChartSpec chart) : nt_(n_theta), nr_(n_r), chart_(chart) {
    if (nt_ < 16 || nt_ % 2 != 0) throw validation_error("GridSizeInvalid", "n_theta must be even and >= 16");
    if (nr_ < 16) throw validation_error("GridSizeInvalid", "n_r must be >= 16");
    if (!(chart_.beta > 0.0 && chart_.beta <= 1.0)) throw validation_error("GridSizeInvalid", "chart beta must lie in (0,1]");

    const int N = 2 * nr_ - 1;
    Eigen::MatrixXd D, DD;
    cheb(N, D, DD, x_full_);
    r_ = x_full_.head(nr_);
    D1_ = D.topLeftCorner(nr_, nr_);
    E1_ = DD.topLeftCorner(nr_, nr_);
    D2_.resize(nr_, nr_);
    E2_.resize(nr_, nr_);
    for (int k = 0; k < nr_; ++k)
        for (int j = 0; j < nr_; ++j) {
            D2_(k, j) = D(k, N - j);
            E2_(k, j) = DD(k, N - j);
        }

    const double h = two_pi / nt_;
    Dt_.setZero(nt_, nt_);
    Dtt_.setZero(nt_, nt_);
    for (int i = 0; i < nt_; ++i)
        for (int j = 0; j < nt_; ++j) {
            const int m = ((i - j) % nt_ + nt_) % nt_;
            if (m == 0) {
                Dtt_(i, j) = -pi * pi / (3.0 * h * h) - 1.0 / 6.0;
            } else {
                const double sg = (m % 2) ? -1.0 : 1.0;
                Dt_(i, j) = 0.5 * sg / std::tan(0.5 * h * m);
                const double s = std::sin(0.5 * h * m);
                Dtt_(i, j) = -0.5 * sg / (s * s);
            }
        }

    const double beta = chart_.beta;
    const double rho = (1.0 - beta) / (1.0 + beta);
    const cplx rot = std::polar(1.0, chart_.theta0);
    zeta_.resize(nr_, nt_);
    L_.resize(nr_, nt_);
    fp_.resize(nr_, nt_);
    for (int k = 0; k < nr_; ++k)
        for (int l = 0; l < nt_; ++l) {
            const cplx zp = z(k, l);
            zeta_(k, l) = rot * (zp + rho) / (1.0 + rho * zp);
            fp_(k, l) = (1.0 - rho * rho) / std::norm(1.0 + rho * zp);
            L_(k, l) = std::log(fp_(k, l));
        }

    // Radial weights: exact for polynomials in s = r^2 of degree < n_r, with measure r dr.
    Eigen::MatrixXd T(nr_, nr_);
    Eigen::VectorXd mom = Eigen::VectorXd::Zero(nr_);
    for (int q = 0; q < nr_; ++q) {
        for (int k = 0; k < nr_; ++k) T(q, k) = std::cos(2.0 * q * std::acos(std::clamp(r_(k), -1.0, 1.0)));
        if (q % 2 == 0) mom(q) = 0.25 * 2.0 / (1.0 - 1.0 * q * q);
    }
    const Eigen::VectorXd wr = T.colPivHouseholderQr().solve(mom);
    wA_.resize(nr_, nt_);
    for (int k = 0; k < nr_; ++k) wA_.row(k).setConstant(wr(k) * h);
}

double SolverGrid::theta_boundary(int l) const { return wrap_angle(std::arg(zeta_(0, l))); }

Field SolverGrid::shifted(const Field& u) const {
    Field s(nr_, nt_);
    const int half = nt_ / 2;
    for (int l = 0; l < nt_; ++l) s.col(l) = u.col((l + half) % nt_);
    return s;
}

Field SolverGrid::laplacian(const Field& u) const {
    const Field us = shifted(u);
    Field radial = E1_ * u + E2_ * us;
    const Field first = D1_ * u + D2_ * us;
    // subtracting a per-ring constant keeps 1/r^2 from amplifying roundoff near the centre
    const Field ang = (u.colwise() - u.col(0)) * Dtt_.transpose();
    for (int k = 0; k < nr_; ++k) {
        const double ir = 1.0 / r_(k);
        radial.row(k) += ir * first.row(k) + ir * ir * ang.row(k);
    }
    return radial;
}

Field SolverGrid::d_r(const Field& u) const { return D1_ * u + D2_ * shifted(u); }

Field SolverGrid::d_phi(const Field& u) const { return u * Dt_.transpose(); }

void SolverGrid::add_laplacian(Eigen::Ref<Eigen::MatrixXd> J, double scale) const {
    const int half = nt_ / 2;
    for (int k = 1; k < nr_; ++k) {
        const double ir = 1.0 / r_(k);
        for (int l = 0; l < nt_; ++l) {
            const int row = index(k, l);
            const int ls = (l + half) % nt_;
            for (int kk = 0; kk < nr_; ++kk) {
                J(row, index(kk, l)) += scale * (E1_(k, kk) + ir * D1_(k, kk));
                J(row, index(kk, ls)) += scale * (E2_(k, kk) + ir * D2_(k, kk));
            }
            for (int ll = 0; ll < nt_; ++ll) J(row, index(k, ll)) += scale * ir * ir * Dtt_(l, ll);
        }
    }
}

void SolverGrid::add_boundary_dr(Eigen::Ref<Eigen::MatrixXd> J, double scale) const {
    const int half = nt_ / 2;
    for (int l = 0; l < nt_; ++l) {
        const int row = index(0, l);
        const int ls = (l + half) % nt_;
        for (int kk = 0; kk < nr_; ++kk) {
            J(row, index(kk, l)) += scale * D1_(0, kk);
            J(row, index(kk, ls)) += scale * D2_(0, kk);
        }
    }
}

cplx SolverGrid::chart_of(cplx zeta) const {
    const double beta = chart_.beta;
    const double rho = (1.0 - beta) / (1.0 + beta);
    const cplx rot = std::polar(1.0, chart_.theta0);
    const cplx zp = zeta / rot;
    return (zp - rho) / (1.0 - rho * zp);
}

double SolverGrid::interpolate(const Field& u, cplx zq) const {
    const int N = 2 * nr_ - 1;
    const double rq = std::abs(zq);
    const double pq = std::arg(zq);
    const int half = nt_ / 2;
    // trig interpolation along each full-diameter radial line, then barycentric Chebyshev in r
    Eigen::VectorXd line(N + 1);
    const double h = two_pi / nt_;
    Eigen::VectorXd wt(nt_);
    bool exact = false;
    int exact_l = 0;
    for (int l = 0; l < nt_; ++l) {
        const double d = pq - l * h;
        const double s = std::sin(0.5 * d);
        if (std::abs(s) < 1e-14) {
            exact = true;
            exact_l = l;
            break;
        }
        // periodic sinc for even n: sin(n d/2) cot(d/2) / n
        wt(l) = std::sin(0.5 * nt_ * d) * std::cos(0.5 * d) / (nt_ * s);
    }
    for (int k = 0; k < nr_; ++k) {
        double a = 0.0, b = 0.0;
        if (exact) {
            a = u(k, exact_l);
            b = u(k, (exact_l + half) % nt_);
        } else {
            for (int l = 0; l < nt_; ++l) {
                a += wt(l) * u(k, l);
                b += wt(l) * u(k, (l + half) % nt_);
            }
        }
        line(k) = a;
        line(N - k) = b;
    }
    double num = 0.0, den = 0.0;
    for (int j = 0; j <= N; ++j) {
        const double d = rq - x_full_(j);
        if (std::abs(d) < 1e-15) return line(j);
        const double w = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == N) ? 0.5 : 1.0) / d;
        num += w * line(j);
        den += w;
    }
    return num / den;
}

std::vector<GridCheck> grid_checks(const SolverGrid& g) {
    std::vector<GridCheck> out;
    const int nr = g.n_r(), nt = g.n_theta();
    double worst = 0.0;
    for (int n = 0; n <= nt / 4; ++n) {
        Field u(nr, nt);
        for (int k = 0; k < nr; ++k)
            for (int l = 0; l < nt; ++l) u(k, l) = std::pow(g.r(k), n) * std::cos(n * g.phi(l));
        const Field lap = g.laplacian(u);
        worst = std::max(worst, lap.bottomRows(nr - 1).cwiseAbs().maxCoeff());
    }
    // collocated second derivatives carry roundoff ~ eps_mach * (largest radial row sum)
    double S = 0.0;
    for (int k = 1; k < nr; ++k) S = std::max(S, g.E1().row(k).cwiseAbs().sum() + g.E2().row(k).cwiseAbs().sum());
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * S;
    out.push_back({"harmonic_reproduction", worst, std::max(1e-8, floor)});

    Field u(nr, nt);
    for (int k = 0; k < nr; ++k)
        for (int l = 0; l < nt; ++l) u(k, l) = g.r(k) * std::cos(g.phi(l));
    const Field dr = g.d_r(u);
    double e = 0.0;
    for (int l = 0; l < nt; ++l) e = std::max(e, std::abs(dr(0, l) - std::cos(g.phi(l))));
    out.push_back({"normal_derivative", e, 1e-10});

    out.push_back({"area", std::abs(g.area_weights().sum() - pi), 1e-10});

    double phys = 0.0;
    for (int k = 0; k < nr; ++k)
        for (int l = 0; l < nt; ++l) phys += g.area_weights()(k, l) * g.fp(k, l) * g.fp(k, l);
    out.push_back({"chart_area", std::abs(phys - pi), 1e-8});
    return out;
}

std::shared_ptr<const SolverGrid> build_grid(int n_theta, int n_r, ChartSpec chart) {
    auto g = std::make_shared<const SolverGrid>(n_theta, n_r, chart);
    for (const auto& c : grid_checks(*g)) {
        if (!c.pass()) {
            std::ostringstream os;
            os << "grid check " << c.name << " failed: error " << c.error << " > " << c.tolerance;
            throw numerical_error("GridValidationFailed", os.str());
        }
    }
    return g;
}

}  // namespace bubble
