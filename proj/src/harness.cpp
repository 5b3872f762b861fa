#include "bubble/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "bubble/errors.hpp"

namespace bubble {

double energy_functional(const SolutionField& u, const CurvatureField& field) {
    const SolverGrid& g = *u.grid;
    const Field& U = u.values;
    const Field Ur = g.d_r(U);
    const Field Up = g.d_phi(U);
    const Field& wA = g.area_weights();
    const double e = u.epsilon, h = g.arc_weight();
    double dirichlet = 0.0, bulk = 0.0;
    for (int k = 0; k < g.n_r(); ++k) {
        const double ir = 1.0 / g.r(k);
        for (int l = 0; l < g.n_theta(); ++l) {
            const double gp = Up(k, l) * ir;
            dirichlet += wA(k, l) * (Ur(k, l) * Ur(k, l) + gp * gp);
            // dx = |f'|^2 dA_z
            bulk += wA(k, l) * field.K(g.x(k, l)) * std::exp(2.0 * (U(k, l) + g.L(k, l)));
        }
    }
    double trace = 0.0, edge = 0.0;
    for (int l = 0; l < g.n_theta(); ++l) {
        trace += h * U(0, l) * g.fp(0, l);
        edge += h * field.kappa(g.theta_boundary(l)) * std::exp(U(0, l) + g.L(0, l));
    }
    return 0.5 * dirichlet - 0.5 * e * e * bulk + trace - e * edge;
}

double predicted_energy(const CurvatureField& field, double theta, double epsilon) {
    const double phi = eval_reduced(field, theta).phi_red;
    return two_pi * std::log(epsilon) - two_pi + two_pi * std::log(2.0) - two_pi * std::log(phi);
}

EnergyReport make_energy_report(double E_tilde, const CurvatureField& field, const BubbleParams& p) {
    EnergyReport r;
    r.E_tilde = E_tilde;
    r.E_scaled = E_tilde + 2.0 * two_pi * std::log(p.epsilon);
    r.E_predicted = predicted_energy(field, p.theta_xi, p.epsilon);
    r.gap = r.E_scaled - r.E_predicted;
    r.epsilon = p.epsilon;
    r.theta = p.theta_xi;
    r.lambda = p.lambda;
    return r;
}

ScanCell scan_cell(const CurvatureField& field, const BubbleParams& p, const ProjectedOptions& opt) {
    const NonlinearProjectedResult nl = nonlinear_projected_solve(field, p, opt);
    const ProjectedSolveResult& r = nl.result;
    ScanCell c;
    c.params = p;
    c.c0 = r.c0;
    c.c1 = r.c1;
    c.phi_norm = r.phi.values.cwiseAbs().maxCoeff();
    c.iterations = r.iterations;
    c.orthogonality_residual = r.orthogonality_residual;
    c.pde_residual = r.pde_residual;
    SolutionField full = nl.base;
    full.values += r.phi.values;
    c.energy = make_energy_report(energy_functional(full, field), field, p);
    c.energy_ansatz = make_energy_report(energy_functional(nl.base, field), field, p);
    return c;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
    if (n <= 0) return;
    jobs = std::clamp(jobs, 1, n);
    std::vector<std::exception_ptr> errs(n);
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) {
            try {
                f(i);
            } catch (...) {
                errs[i] = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<int> next{0};
        std::atomic<bool> stop{false};
        auto worker = [&]() {
            while (!stop.load()) {
                const int i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    f(i);
                } catch (...) {
                    errs[i] = std::current_exception();
                    stop.store(true);
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

std::vector<ScanCell> run_cells(const CurvatureField& field, const std::vector<BubbleParams>& cells,
                                const ProjectedOptions& opt, int jobs) {
    std::vector<ScanCell> out(cells.size());
    parallel_for(static_cast<int>(cells.size()), jobs, [&](int i) { out[i] = scan_cell(field, cells[i], opt); });
    return out;
}

std::vector<double> theta_grid(int n) {
    std::vector<double> t(n);
    for (int j = 0; j < n; ++j) t[j] = two_pi * j / n;
    return t;
}

std::vector<int> sign_changes(const std::vector<double>& c) {
    std::vector<int> out;
    const int n = static_cast<int>(c.size());
    for (int i = 0; i < n; ++i) {
        const double a = c[i], b = c[(i + 1) % n];
        if (a == 0.0 || (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) out.push_back(i);
    }
    return out;
}

std::vector<ScanExtremum> periodic_extrema(const std::vector<double>& theta, const std::vector<double>& v) {
    std::vector<ScanExtremum> out;
    const int n = static_cast<int>(v.size());
    if (n < 3) return out;
    for (int i = 0; i < n; ++i) {
        const double a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
        if (b < a && b < c) out.push_back({theta[i], i, "min", b});
        if (b > a && b > c) out.push_back({theta[i], i, "max", b});
    }
    return out;
}

double angular_distance(double a, double b) { return std::abs(wrap_signed(a - b)); }

XiScan xi_scan(const CurvatureField& field, double epsilon, double lambda, int n_theta, const ScanOptions& opt) {
    if (n_theta < 32) throw validation_error("ThetaGridTooSmall", "theta grid needs at least 32 points");
    XiScan s;
    s.epsilon = epsilon;
    s.lambda = lambda;
    s.cell_width = two_pi / n_theta;
    const std::vector<double> th = theta_grid(n_theta);
    std::vector<BubbleParams> ps(n_theta);
    for (int j = 0; j < n_theta; ++j) {
        ps[j] = BubbleParams{th[j], lambda, epsilon};
        ps[j].validate();
    }
    s.cells = run_cells(field, ps, opt.projected, opt.jobs);

    std::vector<double> c1(n_theta), E(n_theta);
    double emin = 0.0, emax = 0.0;
    for (int j = 0; j < n_theta; ++j) {
        const ScanCell& c = s.cells[j];
        s.c1_rows.push_back({th[j], c.c1, c.phi_norm});
        s.energy.push_back(c.energy);
        c1[j] = c.c1;
        E[j] = c.energy.E_scaled;
        s.c1_max = std::max(s.c1_max, std::abs(c.c1));
        s.gap_max = std::max(s.gap_max, std::abs(c.energy.gap));
        emin = j ? std::min(emin, E[j]) : E[j];
        emax = j ? std::max(emax, E[j]) : E[j];
    }
    s.energy_spread = emax - emin;
    s.extrema = periodic_extrema(th, E);

    const std::vector<int> sc = sign_changes(c1);
    s.zeros.resize(sc.size());
    parallel_for(static_cast<int>(sc.size()), opt.jobs, [&](int z) {
        const int i = sc[z];
        ScanZero& out = s.zeros[z];
        out.cell = i;
        double lo = th[i], hi = th[i] + s.cell_width;
        double flo = c1[i];
        if (flo == 0.0) {
            out.theta = out.lo = out.hi = lo;
            return;
        }
        for (int b = 0; b < opt.bisections; ++b) {
            const double mid = 0.5 * (lo + hi);
            BubbleParams p{wrap_angle(mid), lambda, epsilon};
            const double fm = nonlinear_projected_solve(field, p, opt.projected).result.c1;
            ++out.bisections;
            if (fm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        out.lo = lo;
        out.hi = hi;
        out.theta = wrap_angle(0.5 * (lo + hi));
    });
    return s;
}

std::vector<C1ScanRow> c1_scan(const CurvatureField& field, double epsilon, double lambda, int n_theta,
                               const ScanOptions& opt) {
    return xi_scan(field, epsilon, lambda, n_theta, opt).c1_rows;
}

std::vector<EnergyReport> energy_scan(const CurvatureField& field, double epsilon, double lambda, int n_theta,
                                      const ScanOptions& opt) {
    ScanOptions o = opt;
    o.bisections = 0;
    return xi_scan(field, epsilon, lambda, n_theta, o).energy;
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    PowerFit f;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) continue;
        const double a = std::log(x[i]), b = std::log(y[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
        ++m;
    }
    if (m < 2) return f;
    const double den = m * sxx - sx * sx;
    if (den == 0.0) return f;
    f.exponent = (m * sxy - sx * sy) / den;
    f.prefactor = std::exp((sy - f.exponent * sx) / m);
    f.ok = true;
    return f;
}

ExpansionStudy expansion_study(const CurvatureField& field, double theta_star, const std::vector<double>& lambdas,
                               const std::vector<double>& epsilons, const ProjectedOptions& opt, int jobs) {
    if (epsilons.size() < 2) throw validation_error("EpsilonListTooShort", "expansion study needs at least two epsilons");
    for (size_t i = 1; i < epsilons.size(); ++i)
        if (!(epsilons[i] < epsilons[i - 1]))
            throw validation_error("EpsilonNotDecreasing", "epsilons must be strictly decreasing");
    if (lambdas.empty()) throw validation_error("LambdaListEmpty", "expansion study needs at least one lambda");

    std::vector<BubbleParams> ps;
    for (double e : epsilons)
        for (double l : lambdas) {
            ps.push_back({theta_star, l, e});
            ps.back().validate();
        }
    const std::vector<ScanCell> cells = run_cells(field, ps, opt, jobs);

    ExpansionStudy st;
    st.theta_star = theta_star;
    std::vector<double> xs, gaps, spreads;
    size_t idx = 0;
    for (double e : epsilons) {
        ExpansionLevel lv;
        lv.epsilon = e;
        double lo = 0.0, hi = 0.0;
        for (size_t j = 0; j < lambdas.size(); ++j, ++idx) {
            const ScanCell& c = cells[idx];
            ExpansionRow r;
            r.epsilon = e;
            r.lambda = lambdas[j];
            r.energy = c.energy;
            r.energy_ansatz = c.energy_ansatz;
            r.c1 = c.c1;
            r.bounded_part = c.energy.E_scaled - two_pi * std::log(e);
            st.rows.push_back(r);
            lv.gap_max = std::max(lv.gap_max, std::abs(c.energy.gap));
            lo = j ? std::min(lo, c.energy.E_scaled) : c.energy.E_scaled;
            hi = j ? std::max(hi, c.energy.E_scaled) : c.energy.E_scaled;
        }
        lv.lambda_spread = hi - lo;
        st.levels.push_back(lv);
        xs.push_back(e);
        gaps.push_back(lv.gap_max);
        spreads.push_back(lv.lambda_spread);
    }
    st.gap_fit = fit_power_law(xs, gaps);
    st.spread_fit = fit_power_law(xs, spreads);
    return st;
}

}  // namespace bubble
