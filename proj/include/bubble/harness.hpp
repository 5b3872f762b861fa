#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bubble/solver.hpp"

namespace bubble {

// E~(U) = 1/2 int |grad U|^2 - eps^2/2 int K e^{2U} + int_{dD} U - eps int_{dD} kappa e^U,
// evaluated in the chart with spectral gradients. u.values holds U = u~.
double energy_functional(const SolutionField& u, const CurvatureField& field);

// 2 pi ln eps - 2 pi + 2 pi ln 2 - 2 pi ln(phi_red(theta)); no remainder term.
double predicted_energy(const CurvatureField& field, double theta, double epsilon);

struct EnergyReport {
    double E_tilde = 0.0;
    double E_scaled = 0.0;  // E_tilde + 4 pi ln eps
    double E_predicted = 0.0;
    double gap = 0.0;  // E_scaled - E_predicted
    double epsilon = 0.0;
    double theta = 0.0;
    double lambda = 0.0;
};

EnergyReport make_energy_report(double E_tilde, const CurvatureField& field, const BubbleParams& p);

// One (theta, lambda, eps) cell: ansatz, nonlinear projected solve, energies of V and V + phi.
struct ScanCell {
    BubbleParams params;
    double c0 = 0.0;
    double c1 = 0.0;
    double phi_norm = 0.0;
    int iterations = 0;
    double orthogonality_residual = 0.0;
    double pde_residual = 0.0;
    EnergyReport energy;          // V + phi
    EnergyReport energy_ansatz;   // V alone
};

ScanCell scan_cell(const CurvatureField& field, const BubbleParams& p, const ProjectedOptions& opt);

// Runs f(i) for i < n on up to jobs threads; results are stored by index. The exception of the
// lowest failing index is rethrown after all workers stop.
void parallel_for(int n, int jobs, const std::function<void(int)>& f);

std::vector<ScanCell> run_cells(const CurvatureField& field, const std::vector<BubbleParams>& cells,
                                const ProjectedOptions& opt, int jobs);

// theta_j = 2 pi j / n.
std::vector<double> theta_grid(int n);

struct C1ScanRow {
    double theta = 0.0;
    double c1 = 0.0;
    double phi_norm = 0.0;
};

struct ScanZero {
    double theta = 0.0;   // bisection-refined
    double lo = 0.0, hi = 0.0;  // final bracket (hi may exceed 2 pi across the seam)
    int cell = 0;         // grid bracket [cell, cell + 1]
    int bisections = 0;
};

struct ScanExtremum {
    double theta = 0.0;
    int index = 0;
    std::string kind;  // "min" or "max"
    double value = 0.0;
};

struct ScanOptions {
    ProjectedOptions projected;
    int jobs = 1;
    int bisections = 16;
};

struct XiScan {
    double epsilon = 0.0;
    double lambda = 0.0;
    std::vector<ScanCell> cells;
    std::vector<C1ScanRow> c1_rows;
    std::vector<EnergyReport> energy;
    std::vector<ScanZero> zeros;
    std::vector<ScanExtremum> extrema;
    double c1_max = 0.0;        // max |c1|
    double energy_spread = 0.0; // max E_scaled - min E_scaled
    double gap_max = 0.0;       // max |gap|
    double cell_width = 0.0;
};

// Indices i where c[i] and c[i+1] (periodic) have opposite signs or c[i] is exactly zero.
std::vector<int> sign_changes(const std::vector<double>& c);
// Discrete strict local extrema of a periodic sequence (plateaus are skipped).
std::vector<ScanExtremum> periodic_extrema(const std::vector<double>& theta, const std::vector<double>& v);

// c1 and E(V + phi) over a uniform theta grid (>= 32 points); zeros of c1 refined by bisection.
XiScan xi_scan(const CurvatureField& field, double epsilon, double lambda, int n_theta, const ScanOptions& opt);
std::vector<C1ScanRow> c1_scan(const CurvatureField& field, double epsilon, double lambda, int n_theta,
                               const ScanOptions& opt);
std::vector<EnergyReport> energy_scan(const CurvatureField& field, double epsilon, double lambda, int n_theta,
                                      const ScanOptions& opt);

// |theta - t| on the circle.
double angular_distance(double a, double b);

struct PowerFit {
    double exponent = 0.0;  // slope of ln y against ln x
    double prefactor = 0.0; // y ~ prefactor x^exponent
    bool ok = false;        // at least two positive points
};

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct ExpansionRow {
    double epsilon = 0.0;
    double lambda = 0.0;
    EnergyReport energy;
    EnergyReport energy_ansatz;
    double c1 = 0.0;
    double bounded_part = 0.0;  // E_scaled - 2 pi ln eps
};

struct ExpansionLevel {
    double epsilon = 0.0;
    double gap_max = 0.0;     // max over lambda of |gap|
    double lambda_spread = 0.0;
};

struct ExpansionStudy {
    double theta_star = 0.0;
    std::vector<ExpansionRow> rows;
    std::vector<ExpansionLevel> levels;
    PowerFit gap_fit;
    PowerFit spread_fit;
};

// Rows over epsilons x lambdas at theta_star; epsilons must be strictly decreasing.
ExpansionStudy expansion_study(const CurvatureField& field, double theta_star, const std::vector<double>& lambdas,
                               const std::vector<double>& epsilons, const ProjectedOptions& opt, int jobs);

}  // namespace bubble
