#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bubble/curvature.hpp"

namespace bubble {

struct ExperimentConfig {
    // [curvature]
    std::vector<std::array<double, 3>> K_terms{{0.0, 0.0, 1.0}};  // (i, j, c) for c x1^i x2^j
    std::vector<double> kappa_cos{1.0};
    std::vector<double> kappa_sin{0.0};
    int validation_grid_size = 4096;

    // [grid]
    int n_theta = 64;
    int n_r = 48;
    int n_modes = 256;
    int n_quad = 512;

    // [bubble]
    std::vector<double> lambdas{0.5, 1.0, 2.0};
    std::vector<double> epsilons{0.1, 0.05, 0.025};
    int theta_points = 64;
    std::optional<double> theta;  // unset: first maximum of phi_red, or 0 for constant data

    // [solve]
    double solve_epsilon = 0.05;
    double solve_lambda = 1.0;
    int solve_n_theta = 128;
    int solve_n_r = 64;
    bool continuation = false;

    // [scan]
    double scan_epsilon = 0.05;
    double scan_lambda = 1.0;
    int bisections = 16;

    // [energy]
    int energy_n_theta = 96;
    int energy_n_r = 48;

    // [tolerances]
    double newton_tol = 1e-10;
    int newton_max_iter = 30;
    double quad_tol = 1e-10;
    double fixed_point_tol = 1e-10;
    int fixed_point_max_iter = 50;

    // [diagnostics]
    double alpha = 0.9;
    std::uint64_t seed = 1;

    // [run]
    int jobs = 1;
    std::string out_dir = "bubble-lab-out";

    CurvatureField curvature() const;
    // Angle used where a single concentration point is needed.
    double theta_star() const;
    nlohmann::ordered_json echo() const;
};

// Throws a validation Error whose field() names the offending key.
ExperimentConfig parse_config(const std::string& toml_text, const std::string& source = "<string>");
ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& c);

// --jobs flag, then BUBBLE_LAB_JOBS, then the config value.
int resolve_jobs(std::optional<int> flag, const ExperimentConfig& c);

}  // namespace bubble
