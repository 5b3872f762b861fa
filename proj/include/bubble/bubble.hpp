#pragma once

#include <vector>

#include "bubble/curvature.hpp"
#include "bubble/geometry.hpp"

namespace bubble {

struct HalfPlaneBubbleParams {
    double a = 1.0;
    double b = 1.0;
    double lambda = 1.0;
    double s = 0.0;

    void validate() const;
    double c() const;  // b / sqrt(a)
};

// Value and exact derivatives up to second order.
struct Jet2 {
    double v = 0.0;
    double d1 = 0.0, d2 = 0.0;
    double d11 = 0.0, d22 = 0.0, d12 = 0.0;
    double laplacian() const { return d11 + d22; }
};

double eval_half_plane_bubble(const HalfPlaneBubbleParams& p, Vec2 x);
Jet2 half_plane_bubble_jet(const HalfPlaneBubbleParams& p, Vec2 x);

struct ResidualReport {
    double interior = 0.0;
    double boundary = 0.0;
    double max() const { return interior > boundary ? interior : boundary; }
};

// Max residual of -Lap U - a e^{2U} at interior samples and dU/dn - b e^U at boundary samples.
ResidualReport half_plane_residual(const HalfPlaneBubbleParams& p, const std::vector<Vec2>& interior,
                                   const std::vector<double>& boundary_x1);

struct BubbleParams {
    double theta_xi = 0.0;
    double lambda = 1.0;
    double epsilon = 0.1;

    void validate() const;
};

// Quantities of U0 frozen at xi.
struct DiscBubbleFrame {
    double theta = 0.0;
    Vec2 xi;
    Vec2 n;
    double K_xi = 1.0;
    double kappa_xi = 1.0;
    double D = 1.0;
    double lambda = 1.0;
    double epsilon = 0.1;
    Vec2 center;  // xi + D lambda eps n, outside the closed disc

    DiscBubbleFrame(const BubbleParams& p, const CurvatureField& f);
    double Q(Vec2 x) const { return lambda * lambda * epsilon * epsilon + norm2(x - center); }
};

double eval_disc_bubble(const BubbleParams& p, const CurvatureField& f, Vec2 x);
Jet2 disc_bubble_jet(const DiscBubbleFrame& fr, Vec2 x);
// dU0/dlambda and dU0/dtheta_xi; the theta derivative includes the variation of K, kappa at xi.
double disc_bubble_dlambda(const DiscBubbleFrame& fr, Vec2 x);
double disc_bubble_dtheta(const DiscBubbleFrame& fr, const CurvatureField& f, Vec2 x);

// Kernel functions z0 = (1/2) dU/dlambda, z1 = (1/2) dU/ds of the half-plane bubble at s = 0.
double eval_kernel(int index, const HalfPlaneBubbleParams& p, Vec2 x);
Jet2 kernel_jet(int index, const HalfPlaneBubbleParams& p, Vec2 x);

// Residual of Lap z + 8 lambda^2/Q^2 z (interior) and dz/dn - 2 c lambda/Q z (on x2 = 0).
ResidualReport kernel_annihilation(int index, const HalfPlaneBubbleParams& p, const std::vector<Vec2>& interior,
                                   const std::vector<double>& boundary_x1);

// Same operator applied to an arbitrary jet; used for negative controls.
double linearized_interior(const HalfPlaneBubbleParams& p, Vec2 x, const Jet2& phi);
double linearized_boundary(const HalfPlaneBubbleParams& p, double x1, const Jet2& phi);

struct WeightedNormReport {
    double interior_norm = 0.0;
    double boundary_norm = 0.0;
    double alpha_used = 0.9;
};

struct Sample {
    Vec2 y;
    double value = 0.0;
};

double interior_weight(double r);
double boundary_weight(double r);

WeightedNormReport weighted_norms(const std::vector<Sample>& interior, const std::vector<Sample>& boundary,
                                  Vec2 xi_prime, double alpha = 0.9);

}  // namespace bubble
