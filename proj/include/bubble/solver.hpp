#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "bubble/ansatz.hpp"
#include "bubble/curvature.hpp"
#include "bubble/grid.hpp"

namespace bubble {

struct SolveDiagnostics {
    int iterations = 0;
    double residual = 0.0;        // bordered system when gauge is set
    double unbordered_residual = 0.0;
    std::vector<double> history;  // max-norm residual per iterate
    bool gauge = false;
    double gauge_c0 = 0.0, gauge_c1 = 0.0;
};

// u~ (x-variables) at the grid nodes; boundary_trace is row 0.
struct SolutionField {
    std::shared_ptr<const SolverGrid> grid;
    Field values;
    std::vector<double> boundary_trace;
    std::vector<double> boundary_theta;
    double epsilon = 0.1;
    std::optional<BubbleParams> anchor;
    // chart values minus the anchor ansatz (U + ln|f'|), kept unrounded; empty when unknown
    Field offset;
    SolveDiagnostics diagnostics;

    // v = u~ + ln|f'|, the chart unknown.
    Field chart_values() const;
    void sync_trace();
    // max |interpolated boundary value - trace| at the boundary nodes
    double trace_consistency() const;
};

SolutionField make_solution(std::shared_ptr<const SolverGrid> g, Field values, double epsilon,
                            std::optional<BubbleParams> anchor = std::nullopt);
SolutionField seed_from_ansatz(const AnsatzField& a, std::shared_ptr<const SolverGrid> g);
// Interpolates u onto another grid.
Field transplant(const SolutionField& u, const SolverGrid& g);

struct NewtonOptions {
    double tol = 1e-9;
    int max_iter = 30;
    int max_halvings = 20;
};

// Chart residual: Lap_z v + eps^2 K e^{2v} inside, dv/dr + 1 - eps kappa e^v on the boundary.
Field discrete_residual(const SolutionField& u, const CurvatureField& field);

// Damped Newton on the full problem. Constant curvature data are bordered with two phase conditions
// (dilation and rotation of the anchor bubble, or first harmonics without an anchor).
SolutionField newton_solve(const SolutionField& seed, const CurvatureField& field, double epsilon,
                           const NewtonOptions& opt = {});

struct ContinuationOptions {
    double eps_start = 0.2;
    int n_theta = 128;
    int n_r = 64;
    NewtonOptions newton;
    AnsatzOptions ansatz;
};

// eps halves from eps_start to the target, each level seeded by the previous solution.
SolutionField continuation_solve(const CurvatureField& field, const BubbleParams& target,
                                 const ContinuationOptions& opt = {});

// eps^2 int K e^{2u} + eps int kappa e^u.
double mass_identity(const SolutionField& u, const CurvatureField& field);

struct BlowupPoint {
    double theta = 0.0;
    bool flat = false;
    double trace_max = 0.0;
    double trace_min = 0.0;
};

BlowupPoint extract_blowup_point(const SolutionField& u);

// y-variable potentials W1 = 2 K(eps y) e^{2V}, W2 = kappa(eps y) e^V on the grid nodes.
struct LinearizedOperator {
    std::shared_ptr<const SolverGrid> grid;
    Field base;  // u~ of the base field
    Field W1;
    std::vector<double> W2;
    double epsilon = 0.1;
};

LinearizedOperator assemble_linearization(const SolutionField& base, const CurvatureField& field, double epsilon);
LinearizedOperator assemble_linearization(const AnsatzField& a, const CurvatureField& field,
                                          std::shared_ptr<const SolverGrid> g);

struct ExpansionCheck {
    double W1_dev = 0.0;  // max |W1/model - 1| for |y - xi'| <= radius
    double W2_dev = 0.0;
    double radius = 0.0;
    int n_interior = 0, n_boundary = 0;
};

ExpansionCheck linearization_expansion_check(const LinearizedOperator& op, const AnsatzField& a,
                                             const CurvatureField& field, double radius = 3.0);

// Quintic smoothstep cutoff: 1 for rho <= R0, 0 for rho >= R0 + 1.
double cutoff(double rho, double R0 = 10.0);

// chi Z_0 and chi Z_1 at the nodes, Z_i = z_i in the polar flattening ((theta - theta_xi)/eps, (1 - r)/eps).
struct ProjectionBasis {
    Field chiZ0, chiZ1;
};

ProjectionBasis projection_basis(const SolverGrid& g, const DiscBubbleFrame& fr, double R0 = 10.0);

struct ProjectedSolveResult {
    SolutionField phi;
    double c0 = 0.0;
    double c1 = 0.0;
    double orthogonality_residual = 0.0;
    double pde_residual = 0.0;
    int iterations = 0;
    std::vector<double> increments;
};

// Bordered solve of -Lap phi - W1 phi = f + c0 chi Z0 + c1 chi Z1, dphi/dn - W2 phi = h,
// int chi Z_i phi = 0 (y-variables). The LU is built once and reused.
class ProjectedSolver {
public:
    ProjectedSolver(const LinearizedOperator& op, const DiscBubbleFrame& fr, double R0 = 10.0);
    ~ProjectedSolver();
    ProjectedSolver(const ProjectedSolver&) = delete;
    ProjectedSolver& operator=(const ProjectedSolver&) = delete;

    // f uses rows k >= 1, h is the boundary row.
    ProjectedSolveResult solve(const Field& f, const std::vector<double>& h) const;
    const ProjectionBasis& basis() const { return basis_; }
    const LinearizedOperator& op() const { return op_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    LinearizedOperator op_;
    ProjectionBasis basis_;
};

ProjectedSolveResult projected_linear_solve(const LinearizedOperator& op, const DiscBubbleFrame& fr, const Field& f,
                                            const std::vector<double>& h);

struct ProjectedOptions {
    int n_theta = 64;
    int n_r = 48;
    double tol = 1e-10;
    int max_iter = 50;
    AnsatzOptions ansatz;
};

struct NonlinearProjectedResult {
    ProjectedSolveResult result;
    SolutionField base;  // ansatz U on the grid
};

// Fixed point phi -> projected solve with f = R1 + N1(phi), h = R2 + N2(phi).
// Throws ContractionFailed after two consecutive increment ratios above 0.9.
NonlinearProjectedResult nonlinear_projected_solve(const CurvatureField& field, const BubbleParams& p,
                                                   const ProjectedOptions& opt = {});

}  // namespace bubble
