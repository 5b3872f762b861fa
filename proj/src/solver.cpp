#include "bubble/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bubble/errors.hpp"

namespace bubble {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

Eigen::Map<const Vec> flat(const Field& f) { return Eigen::Map<const Vec>(f.data(), f.size()); }
Eigen::Map<Vec> flat(Field& f) { return Eigen::Map<Vec>(f.data(), f.size()); }

struct NodeData {
    Field K;                    // K at every node
    std::vector<double> kappa;  // kappa at boundary nodes
};

NodeData node_data(const SolverGrid& g, const CurvatureField& f) {
    NodeData nd;
    nd.K.resize(g.n_r(), g.n_theta());
    for (int k = 0; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l) nd.K(k, l) = f.K(g.x(k, l));
    nd.kappa.resize(g.n_theta());
    for (int l = 0; l < g.n_theta(); ++l) nd.kappa[l] = f.kappa(g.theta_boundary(l));
    return nd;
}

// Analytic reference r = U + L of an ansatz: Lap_z r = -eps^2 K(xi) e^{2(U0 + L)}, and on the circle
// dr/dr = |f'| (dU/dn + 1) - 1. Differencing against it keeps large values out of the spectral operators.
struct Reference {
    bool active = false;
    Field v, lap;
    std::vector<double> dr;
};

Reference make_reference(const SolverGrid& g, const CurvatureField& field, const std::optional<BubbleParams>& anchor,
                         double eps) {
    Reference ref;
    ref.v = Field::Zero(g.n_r(), g.n_theta());
    ref.lap = Field::Zero(g.n_r(), g.n_theta());
    ref.dr.assign(g.n_theta(), 0.0);
    if (!anchor) return ref;
    BubbleParams p = *anchor;
    p.epsilon = eps;
    const AnsatzField a = assemble_ansatz(field, p);
    const DiscBubbleFrame& fr = a.frame;
    ref.active = true;
    for (int k = 0; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l) {
            const Vec2 x = g.x(k, l);
            const double U0 = std::log(2.0 * fr.lambda / (std::sqrt(fr.K_xi) * fr.Q(x)));
            ref.v(k, l) = U0 + a.H0(x) + g.L(k, l);
            ref.lap(k, l) = -eps * eps * fr.K_xi * std::exp(2.0 * (U0 + g.L(k, l)));
        }
    for (int l = 0; l < g.n_theta(); ++l) {
        const double th = g.theta_boundary(l);
        const Vec2 x = boundary_point(th);
        ref.dr[l] = g.fp(0, l) * (dot(a.grad_U(x), outward_normal(th)) + 1.0) - 1.0;
    }
    return ref;
}

// Residual in terms of the offset w = v - ref.v.
Field chart_residual(const SolverGrid& g, const NodeData& nd, double eps, const Field& w, const Reference& ref) {
    Field R = g.laplacian(w) + ref.lap;
    const Field dr = g.d_r(w);
    for (int k = 1; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l)
            R(k, l) += eps * eps * nd.K(k, l) * std::exp(2.0 * (ref.v(k, l) + w(k, l)));
    for (int l = 0; l < g.n_theta(); ++l)
        R(0, l) = dr(0, l) + ref.dr[l] + 1.0 - eps * nd.kappa[l] * std::exp(ref.v(0, l) + w(0, l));
    return R;
}

void chart_jacobian(const SolverGrid& g, const NodeData& nd, double eps, const Field& v, Eigen::Ref<Mat> J) {
    J.setZero();
    g.add_laplacian(J, 1.0);
    g.add_boundary_dr(J, 1.0);
    for (int k = 1; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l) {
            const int i = g.index(k, l);
            J(i, i) += 2.0 * eps * eps * nd.K(k, l) * std::exp(2.0 * v(k, l));
        }
    for (int l = 0; l < g.n_theta(); ++l) {
        const int i = g.index(0, l);
        J(i, i) -= eps * nd.kappa[l] * std::exp(v(0, l));
    }
}

double max_abs(const Field& f) { return f.cwiseAbs().maxCoeff(); }

// Solves M x = b in place; M is overwritten by its LU factors.
Vec solve_in_place(Mat& M, const Vec& b) {
    Eigen::PartialPivLU<Eigen::Ref<Mat>> lu(M);
    const double rc = lu.rcond();
    if (!(rc > 1e-17)) {
        std::ostringstream os;
        os << "bordered Jacobian is numerically singular (rcond " << rc << ")";
        throw numerical_error("JacobianSingular", os.str());
    }
    Vec x = lu.solve(b);
    if (!x.allFinite()) throw numerical_error("JacobianSingular", "linear solve produced non-finite values");
    return x;
}

struct Gauge {
    Vec v_ref;
    Mat A;   // 2 x n constraint rows
    Mat fr;  // n x 2 forcing columns
};

Gauge make_gauge(const SolutionField& seed, const CurvatureField& field, double eps, const NodeData& nd) {
    const SolverGrid& g = *seed.grid;
    const int n = g.size();
    Gauge G;
    G.v_ref.resize(n);
    Mat psi(n, 2);
    if (seed.anchor) {
        BubbleParams p = *seed.anchor;
        p.epsilon = eps;
        const DiscBubbleFrame fr(p, field);
        for (int k = 0; k < g.n_r(); ++k)
            for (int l = 0; l < g.n_theta(); ++l) {
                const Vec2 x = g.x(k, l);
                const int i = g.index(k, l);
                G.v_ref(i) = std::log(2.0 * fr.lambda / (std::sqrt(fr.K_xi) * fr.Q(x))) + g.L(k, l);
                psi(i, 0) = disc_bubble_dlambda(fr, x);
                psi(i, 1) = disc_bubble_dtheta(fr, field, x);
            }
    } else {
        const Field v0 = seed.chart_values();
        for (int k = 0; k < g.n_r(); ++k)
            for (int l = 0; l < g.n_theta(); ++l) {
                const int i = g.index(k, l);
                G.v_ref(i) = v0(k, l);
                psi(i, 0) = g.zeta(k, l).real();
                psi(i, 1) = g.zeta(k, l).imag();
            }
    }
    G.A.resize(2, n);
    G.fr.setZero(n, 2);
    for (int k = 0; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l) {
            const int i = g.index(k, l);
            const double w = eps * eps * nd.K(k, l) * std::exp(2.0 * G.v_ref(i));
            for (int c = 0; c < 2; ++c) {
                G.A(c, i) = g.area_weights()(k, l) * w * psi(i, c);
                if (k > 0) G.fr(i, c) = w * psi(i, c);
            }
        }
    return G;
}

}  // namespace

namespace {

// Offset against the reference; the stored offset is used when present so no rounding enters.
Field offset_from(const SolutionField& u, const Reference& ref) {
    if (ref.active && u.offset.rows() == u.values.rows() && u.offset.cols() == u.values.cols()) return u.offset;
    return u.chart_values() - ref.v;
}

}  // namespace

Field SolutionField::chart_values() const { return values + grid->L(); }

void SolutionField::sync_trace() {
    const int nt = grid->n_theta();
    boundary_trace.resize(nt);
    boundary_theta.resize(nt);
    for (int l = 0; l < nt; ++l) {
        boundary_trace[l] = values(0, l);
        boundary_theta[l] = grid->theta_boundary(l);
    }
}

double SolutionField::trace_consistency() const {
    double e = 0.0;
    for (int l = 0; l < grid->n_theta(); ++l)
        e = std::max(e, std::abs(grid->interpolate(values, grid->z(0, l)) - boundary_trace[l]));
    return e;
}

SolutionField make_solution(std::shared_ptr<const SolverGrid> g, Field values, double epsilon,
                            std::optional<BubbleParams> anchor) {
    SolutionField u;
    u.grid = std::move(g);
    u.values = std::move(values);
    u.epsilon = epsilon;
    u.anchor = anchor;
    u.sync_trace();
    return u;
}

SolutionField seed_from_ansatz(const AnsatzField& a, std::shared_ptr<const SolverGrid> g) {
    Field v = ansatz_on_grid(a, *g);
    return make_solution(std::move(g), std::move(v), a.frame.epsilon, a.bubble);
}

Field transplant(const SolutionField& u, const SolverGrid& g) {
    Field out(g.n_r(), g.n_theta());
    for (int k = 0; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l) {
            cplx z = u.grid->chart_of(g.zeta(k, l));
            if (std::abs(z) > 1.0) z /= std::abs(z);
            out(k, l) = u.grid->interpolate(u.values, z);
        }
    return out;
}

Field discrete_residual(const SolutionField& u, const CurvatureField& field) {
    const NodeData nd = node_data(*u.grid, field);
    const Reference ref = make_reference(*u.grid, field, u.anchor, u.epsilon);
    return chart_residual(*u.grid, nd, u.epsilon, offset_from(u, ref), ref);
}

SolutionField newton_solve(const SolutionField& seed, const CurvatureField& field, double epsilon,
                           const NewtonOptions& opt) {
    if (!(opt.tol >= 1e-10 * (1.0 - 1e-12))) throw validation_error("NewtonTolInvalid", "newton tol must be >= 1e-10");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw validation_error("EpsilonInvalid", "epsilon must lie in (0,1)");
    const SolverGrid& g = *seed.grid;
    const int n = g.size();
    const NodeData nd = node_data(g, field);
    const Reference ref = make_reference(g, field, seed.anchor, epsilon);
    const bool gauge = field.is_constant();
    const int m = gauge ? 2 : 0;
    Gauge G;
    if (gauge) G = make_gauge(seed, field, epsilon, nd);

    Field w = offset_from(seed, ref);
    Vec c = Vec::Zero(m);
    Vec gauge_shift;
    if (gauge) gauge_shift = flat(ref.v) - G.v_ref;

    auto augmented = [&](const Field& ww, const Vec& cc, double* plain) {
        Field R = chart_residual(g, nd, epsilon, ww, ref);
        if (plain) *plain = max_abs(R);
        Vec out(n + m);
        out.head(n) = flat(R);
        if (gauge) {
            out.head(n) -= G.fr * cc;
            out.tail(2) = G.A * (flat(ww) + gauge_shift);
        }
        return out;
    };

    SolveDiagnostics diag;
    diag.gauge = gauge;
    Mat M(n + m, n + m);
    double plain = 0.0;
    Vec R = augmented(w, c, &plain);
    for (int it = 0;; ++it) {
        const double res = R.cwiseAbs().maxCoeff();
        diag.history.push_back(res);
        if (!std::isfinite(res)) throw numerical_error("NewtonDiverged", "residual is not finite");
        if (res <= opt.tol) {
            diag.iterations = it;
            diag.residual = res;
            diag.unbordered_residual = plain;
            break;
        }
        if (it >= opt.max_iter) {
            std::ostringstream os;
            os << "Newton did not reach tol " << opt.tol << " in " << opt.max_iter << " iterations (residual " << res
               << ")";
            throw numerical_error("MaxIterExceeded", os.str());
        }
        chart_jacobian(g, nd, epsilon, ref.v + w, M.topLeftCorner(n, n));
        if (gauge) {
            M.topRightCorner(n, 2) = -G.fr;
            M.bottomLeftCorner(2, n) = G.A;
            M.bottomRightCorner(2, 2).setZero();
        }
        const Vec dx = solve_in_place(M, -R);
        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opt.max_halvings; ++h, t *= 0.5) {
            Field vt = w;
            flat(vt) += t * dx.head(n);
            const Vec ct = c + t * dx.tail(m);
            double pt = 0.0;
            Vec Rt = augmented(vt, ct, &pt);
            if (Rt.cwiseAbs().maxCoeff() < res) {
                w = std::move(vt);
                c = ct;
                R = std::move(Rt);
                plain = pt;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            std::ostringstream os;
            os << "no residual decrease after " << opt.max_halvings << " step halvings (residual " << res << ")";
            throw numerical_error("NewtonDiverged", os.str());
        }
    }
    if (gauge) {
        diag.gauge_c0 = c(0);
        diag.gauge_c1 = c(1);
    }
    SolutionField out = make_solution(seed.grid, ref.v + w - g.L(), epsilon, seed.anchor);
    if (ref.active) out.offset = w;
    out.diagnostics = std::move(diag);
    return out;
}

SolutionField continuation_solve(const CurvatureField& field, const BubbleParams& target,
                                 const ContinuationOptions& opt) {
    target.validate();
    std::vector<double> levels;
    for (double e = opt.eps_start; e > target.epsilon * (1.0 + 1e-9); e *= 0.5) levels.push_back(e);
    levels.push_back(target.epsilon);

    std::optional<SolutionField> prev;
    std::optional<AnsatzField> prev_a;
    for (double e : levels) {
        BubbleParams p = target;
        p.epsilon = e;
        AnsatzField a = assemble_ansatz(field, p, opt.ansatz);
        auto g = build_grid(opt.n_theta, opt.n_r, bubble_chart(a.frame));
        SolutionField seed = seed_from_ansatz(a, g);
        if (prev) {
            // previous solution plus the ansatz change between the two levels
            Field moved = transplant(*prev, *g);
            for (int k = 0; k < g->n_r(); ++k)
                for (int l = 0; l < g->n_theta(); ++l) {
                    const Vec2 x = g->x(k, l);
                    moved(k, l) += a.U(x) - prev_a->U(x);
                }
            seed.values = std::move(moved);
            seed.sync_trace();
        }
        prev = newton_solve(seed, field, e, opt.newton);
        prev_a = std::move(a);
    }
    return *prev;
}

double mass_identity(const SolutionField& u, const CurvatureField& field) {
    const SolverGrid& g = *u.grid;
    const Field v = u.chart_values();
    const double e = u.epsilon;
    double interior = 0.0, boundary = 0.0;
    for (int k = 0; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l)
            interior += g.area_weights()(k, l) * field.K(g.x(k, l)) * std::exp(2.0 * v(k, l));
    for (int l = 0; l < g.n_theta(); ++l) boundary += g.arc_weight() * field.kappa(g.theta_boundary(l)) * std::exp(v(0, l));
    return e * e * interior + e * boundary;
}

BlowupPoint extract_blowup_point(const SolutionField& u) {
    const auto& tr = u.boundary_trace;
    const auto& th = u.boundary_theta;
    const int n = static_cast<int>(tr.size());
    BlowupPoint b;
    const auto mx = std::max_element(tr.begin(), tr.end());
    b.trace_max = *mx;
    b.trace_min = *std::min_element(tr.begin(), tr.end());
    b.flat = b.trace_max - b.trace_min < 1e-6;
    const int i = static_cast<int>(mx - tr.begin());
    const int im = (i + n - 1) % n, ip = (i + 1) % n;
    const double x0 = wrap_signed(th[im] - th[i]), x2 = wrap_signed(th[ip] - th[i]);
    const double f0 = tr[im], f1 = tr[i], f2 = tr[ip];
    const double den = x0 * (f1 - f2) - x2 * (f1 - f0);
    double shift = 0.0;
    if (den != 0.0) shift = 0.5 * (x0 * x0 * (f1 - f2) - x2 * x2 * (f1 - f0)) / den;
    b.theta = wrap_angle(th[i] + shift);
    return b;
}

namespace {

LinearizedOperator potentials(std::shared_ptr<const SolverGrid> g, Field base, const CurvatureField& field,
                              double eps) {
    LinearizedOperator op;
    const SolverGrid& G = *g;
    op.grid = std::move(g);
    op.epsilon = eps;
    op.W1.resize(G.n_r(), G.n_theta());
    op.W2.resize(G.n_theta());
    const double e2 = eps * eps, e4 = e2 * e2;
    for (int k = 0; k < G.n_r(); ++k)
        for (int l = 0; l < G.n_theta(); ++l) op.W1(k, l) = 2.0 * field.K(G.x(k, l)) * e4 * std::exp(2.0 * base(k, l));
    for (int l = 0; l < G.n_theta(); ++l) op.W2[l] = field.kappa(G.theta_boundary(l)) * e2 * std::exp(base(0, l));
    op.base = std::move(base);
    return op;
}

}  // namespace

LinearizedOperator assemble_linearization(const SolutionField& base, const CurvatureField& field, double epsilon) {
    if (!base.values.allFinite()) throw numerical_error("BaseNotFinite", "linearization base has non-finite values");
    return potentials(base.grid, base.values, field, epsilon);
}

LinearizedOperator assemble_linearization(const AnsatzField& a, const CurvatureField& field,
                                          std::shared_ptr<const SolverGrid> g) {
    Field u = ansatz_on_grid(a, *g);
    return potentials(std::move(g), std::move(u), field, a.frame.epsilon);
}

ExpansionCheck linearization_expansion_check(const LinearizedOperator& op, const AnsatzField& a,
                                             const CurvatureField& field, double radius) {
    const SolverGrid& g = *op.grid;
    const DiscBubbleFrame& fr = a.frame;
    const double e = op.epsilon, l2 = fr.lambda * fr.lambda;
    ExpansionCheck c;
    c.radius = radius;
    for (int k = 0; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l) {
            const Vec2 x = g.x(k, l);
            const double ry = std::sqrt(norm2(x - fr.xi)) / e;
            if (ry > radius) continue;
            const double q = l2 + norm2(x - fr.center) / (e * e);  // lambda^2 + |y - xi' - D lambda n|^2
            const double m1 = 2.0 * field.K(x) / fr.K_xi * 4.0 * l2 / (q * q);
            c.W1_dev = std::max(c.W1_dev, std::abs(op.W1(k, l) / m1 - 1.0));
            ++c.n_interior;
            if (k == 0) {
                const double m2 = 2.0 * fr.lambda * fr.D / q;
                c.W2_dev = std::max(c.W2_dev, std::abs(op.W2[l] / m2 - 1.0));
                ++c.n_boundary;
            }
        }
    return c;
}

double cutoff(double rho, double R0) {
    if (rho <= R0) return 1.0;
    if (rho >= R0 + 1.0) return 0.0;
    const double x = rho - R0;
    return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

ProjectionBasis projection_basis(const SolverGrid& g, const DiscBubbleFrame& fr, double R0) {
    ProjectionBasis b;
    b.chiZ0.resize(g.n_r(), g.n_theta());
    b.chiZ1.resize(g.n_r(), g.n_theta());
    HalfPlaneBubbleParams hp{fr.K_xi, fr.kappa_xi, fr.lambda, 0.0};
    for (int k = 0; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l) {
            const cplx z = g.zeta(k, l);
            const double t = wrap_signed(std::arg(z) - fr.theta) / fr.epsilon;
            const double nn = std::max(0.0, 1.0 - std::abs(z)) / fr.epsilon;
            const double chi = cutoff(std::hypot(t, nn), R0);
            b.chiZ0(k, l) = chi == 0.0 ? 0.0 : chi * eval_kernel(0, hp, {t, nn});
            b.chiZ1(k, l) = chi == 0.0 ? 0.0 : chi * eval_kernel(1, hp, {t, nn});
        }
    return b;
}

struct ProjectedSolver::Impl {
    Eigen::PartialPivLU<Mat> lu;
    Mat A;  // unfactored system, for residuals
    Field JA;
    std::vector<double> Js;
    Vec wy;  // y-area weights
};

ProjectedSolver::~ProjectedSolver() = default;

ProjectedSolver::ProjectedSolver(const LinearizedOperator& op, const DiscBubbleFrame& fr, double R0)
    : impl_(std::make_unique<Impl>()), op_(op), basis_(projection_basis(*op.grid, fr, R0)) {
    const SolverGrid& g = *op.grid;
    const int n = g.size();
    const double e = op.epsilon;
    Impl& I = *impl_;
    I.JA = g.fp().cwiseProduct(g.fp()) / (e * e);
    I.Js.resize(g.n_theta());
    for (int l = 0; l < g.n_theta(); ++l) I.Js[l] = g.fp(0, l) / e;
    I.wy.resize(n);
    for (int k = 0; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l) I.wy(g.index(k, l)) = g.area_weights()(k, l) * I.JA(k, l);

    Mat& A = I.A;
    A.setZero(n + 2, n + 2);
    auto J = A.topLeftCorner(n, n);
    g.add_laplacian(J, -1.0);
    g.add_boundary_dr(J, 1.0);
    for (int k = 1; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l) {
            const int i = g.index(k, l);
            A(i, i) -= I.JA(k, l) * op.W1(k, l);
            A(i, n) = -I.JA(k, l) * basis_.chiZ0(k, l);
            A(i, n + 1) = -I.JA(k, l) * basis_.chiZ1(k, l);
        }
    for (int l = 0; l < g.n_theta(); ++l) A(g.index(0, l), g.index(0, l)) -= I.Js[l] * op.W2[l];
    // constraint rows scaled by eps^2 to keep them O(1)
    for (int k = 0; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l) {
            const int i = g.index(k, l);
            A(n, i) = e * e * I.wy(i) * basis_.chiZ0(k, l);
            A(n + 1, i) = e * e * I.wy(i) * basis_.chiZ1(k, l);
        }
    I.lu.compute(A);
    const double rc = I.lu.rcond();
    if (!(rc > 1e-17)) {
        std::ostringstream os;
        os << "projected operator is numerically singular (rcond " << rc << ")";
        throw numerical_error("JacobianSingular", os.str());
    }
}

ProjectedSolveResult ProjectedSolver::solve(const Field& f, const std::vector<double>& h) const {
    const SolverGrid& g = *op_.grid;
    const int n = g.size();
    const Impl& I = *impl_;
    Vec b = Vec::Zero(n + 2);
    for (int k = 1; k < g.n_r(); ++k)
        for (int l = 0; l < g.n_theta(); ++l) b(g.index(k, l)) = I.JA(k, l) * f(k, l);
    for (int l = 0; l < g.n_theta(); ++l) b(g.index(0, l)) = I.Js[l] * h[l];
    const Vec x = I.lu.solve(b);
    if (!x.allFinite()) throw numerical_error("JacobianSingular", "projected solve produced non-finite values");

    ProjectedSolveResult r;
    Field phi(g.n_r(), g.n_theta());
    flat(phi) = x.head(n);
    r.c0 = x(n);
    r.c1 = x(n + 1);
    r.pde_residual = (I.A * x - b).cwiseAbs().maxCoeff();
    const Vec ph = x.head(n);
    const double pn = std::sqrt((I.wy.array() * ph.array().square()).sum());
    for (const Field* Z : {&basis_.chiZ0, &basis_.chiZ1}) {
        const Vec z = flat(*Z);
        const double zn = std::sqrt((I.wy.array() * z.array().square()).sum());
        const double ip = (I.wy.array() * z.array() * ph.array()).sum();
        if (pn > 0.0 && zn > 0.0) r.orthogonality_residual = std::max(r.orthogonality_residual, std::abs(ip) / (pn * zn));
    }
    r.phi = make_solution(op_.grid, std::move(phi), op_.epsilon);
    return r;
}

ProjectedSolveResult projected_linear_solve(const LinearizedOperator& op, const DiscBubbleFrame& fr, const Field& f,
                                            const std::vector<double>& h) {
    const ProjectedSolver s(op, fr);
    return s.solve(f, h);
}

NonlinearProjectedResult nonlinear_projected_solve(const CurvatureField& field, const BubbleParams& p,
                                                   const ProjectedOptions& opt) {
    if (!(opt.tol > 0.0)) throw validation_error("FixedPointTolInvalid", "fixed point tol must be positive");
    const AnsatzField a = assemble_ansatz(field, p, opt.ansatz);
    auto g = build_grid(opt.n_theta, opt.n_r, bubble_chart(a.frame));
    const LinearizedOperator op = assemble_linearization(a, field, g);
    const ProjectedSolver S(op, a.frame);
    const double e = p.epsilon, e2 = e * e;
    const int nr = g->n_r(), nt = g->n_theta();

    // R1, R2 and the exponentials K e^{2V}, kappa e^V at the nodes
    Field R1(nr, nt), KV(nr, nt);
    std::vector<double> R2(nt), kV(nt);
    for (int k = 0; k < nr; ++k)
        for (int l = 0; l < nt; ++l) {
            const Vec2 x = g->x(k, l);
            const double U0 = std::log(2.0 * a.frame.lambda / (std::sqrt(a.frame.K_xi) * a.frame.Q(x)));
            KV(k, l) = e2 * e2 * field.K(x) * std::exp(2.0 * op.base(k, l));
            R1(k, l) = KV(k, l) - e2 * e2 * a.frame.K_xi * std::exp(2.0 * U0);
        }
    for (int l = 0; l < nt; ++l) {
        const double th = g->theta_boundary(l);
        const Vec2 x = boundary_point(th);
        kV[l] = e2 * field.kappa(th) * std::exp(op.base(0, l));
        R2[l] = e * (-dot(a.grad_U(x), outward_normal(th)) - 1.0) + kV[l];
    }

    Field phi = Field::Zero(nr, nt);
    Field f(nr, nt);
    std::vector<double> h(nt);
    ProjectedSolveResult last;
    std::vector<double> incs;
    double prev_inc = -1.0;
    int bad = 0;
    for (int it = 1; it <= opt.max_iter; ++it) {
        for (int k = 0; k < nr; ++k)
            for (int l = 0; l < nt; ++l) {
                const double q = phi(k, l);
                f(k, l) = R1(k, l) + KV(k, l) * std::expm1(2.0 * q) - 2.0 * q * KV(k, l);
            }
        for (int l = 0; l < nt; ++l) {
            const double q = phi(0, l);
            h[l] = R2[l] + kV[l] * (std::expm1(q) - q);
        }
        last = S.solve(f, h);
        const double inc = max_abs(last.phi.values - phi);
        incs.push_back(inc);
        phi = last.phi.values;
        if (!std::isfinite(inc)) throw numerical_error("ContractionFailed", "fixed point iterate is not finite");
        if (inc <= opt.tol) {
            last.iterations = it;
            last.increments = incs;
            return {std::move(last), make_solution(g, op.base, e, p)};
        }
        if (prev_inc > 0.0 && inc > 0.9 * prev_inc) {
            if (++bad >= 2) {
                std::ostringstream os;
                os << "Lipschitz estimate above 0.9 twice in a row (increment " << inc << ")";
                throw numerical_error("ContractionFailed", os.str());
            }
        } else {
            bad = 0;
        }
        prev_inc = inc;
    }
    throw numerical_error("ContractionFailed", "fixed point did not reach tolerance within max_iter");
}

}  // namespace bubble
