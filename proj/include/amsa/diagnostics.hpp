#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "amsa/grid.hpp"
#include "amsa/msa.hpp"
#include "amsa/pde_solvers.hpp"
#include "amsa/problem.hpp"

namespace amsa {

struct ControlPair {
    Field u;
    BoundaryField v;
};

/// Low-frequency trigonometric field sum_{a,b,c < modes} c_abc cos(a pi x/Lx) cos(b pi y/Ly)
/// cos(c pi t/T) with seeded coefficients damped by 1/(1+a+b+c), scaled to max |.| = 1.
Field smooth_random_field(const Grid& grid, std::mt19937_64& rng, int modes = 3);
/// Same construction evaluated at the boundary nodes.
BoundaryField smooth_random_boundary_field(const Grid& grid, std::mt19937_64& rng, int modes = 3);

/// One empirical sample of an existential constant: lhs <= C * rhs_without_constant.
struct BoundCheckReport {
    double lhs = 0.0;
    double rhs_without_constant = 0.0;
    double ratio = 0.0;            ///< lhs / rhs, 0 when rhs is 0
    double fitted_constant = 0.0;  ///< max(ratio, 0)
    int samples = 1;
};

/// ||dy||^2_{L2(Omega_T)} + ||dy||^2_{L2(Sigma_T)} against
/// ||v_phi - v_theta||^2_{L2(Sigma_T)} + ||f(y_theta, u_phi) - f(y_theta, u_theta)||^2_{L2(Omega_T)}.
BoundCheckReport check_state_stability(const ProblemDefinition& problem, const ControlPair& base,
                                       const ControlPair& perturbed, const Grid& grid,
                                       const StepperOptions& opts = {});

/// J(phi) - J(theta) minus the Hamiltonian gaps integrated with y_theta, p_theta frozen,
/// against ||u_phi - u_theta||^2 + ||v_phi - v_theta||^2.
BoundCheckReport check_cost_gap(const ProblemDefinition& problem, const ControlPair& theta,
                                const ControlPair& phi, const Grid& grid, const StepperOptions& opts = {});

struct AmplitudeSamples {
    double amplitude = 0.0;
    std::vector<BoundCheckReport> samples;
    double max_ratio = 0.0;
    double median_ratio = 0.0;
};

struct BoundStudy {
    std::vector<AmplitudeSamples> levels;
    std::uint64_t seed = 0;
    bool finite = true;
    /// max over amplitudes of max_ratio divided by the min over amplitudes
    double amplitude_spread = 1.0;
    /// largest single ratio divided by the median of its amplitude level
    double outlier_factor = 1.0;

    bool stable_within(double factor) const { return finite && amplitude_spread <= factor; }
};

struct StudyOptions {
    std::vector<double> amplitudes{1e-1, 1e-2, 1e-3};
    int samples = 50;
    std::uint64_t seed = 42;
    double base_amplitude = 0.1;  ///< size of the random base controls theta
    StepperOptions stepper{1e-13, 20000, 1e12};
};

/// Base controls theta and directions d are seeded per sample and reused for every
/// amplitude, so the amplitude comparison isolates the scaling of the bound.
BoundStudy study_state_stability(const ProblemDefinition& problem, const Grid& grid, const StudyOptions& opts);
BoundStudy study_cost_gap(const ProblemDefinition& problem, const Grid& grid, const StudyOptions& opts);

/// Reduced gradient of the discrete cost: F_u - p f_u at interior nodes and G_v - p on
/// the boundary. Missing control derivatives fall back to central differences.
ControlPair reduced_gradient(const ProblemDefinition& problem, const StateSolution& state,
                             const AdjointSolution& adjoint, const Field& u, const BoundaryField& v,
                             const Grid& grid);

/// <F_u - p f_u, du>_{Omega_T} + <G_v - p, dv>_{Sigma_T} with left-endpoint time weights.
double adjoint_directional_derivative(const ProblemDefinition& problem, const StateSolution& state,
                                      const AdjointSolution& adjoint, const Field& u, const BoundaryField& v,
                                      const Field& du, const BoundaryField& dv, const Grid& grid);

struct GradientCheckRow {
    int direction = 0;
    double adjoint = 0.0;
    double finite_difference = 0.0;
    double relative_error = 0.0;
};

struct GradientCheckOptions {
    std::uint64_t seed = 7;
    double fd_step = 1e-5;
    bool perturb_distributed = true;
    bool perturb_boundary = true;
    StepperOptions stepper{1e-13, 20000, 1e12};
};

struct GradientCheckReport {
    std::vector<GradientCheckRow> rows;
    double max_relative_error = 0.0;
    std::uint64_t seed = 0;
    double fd_step = 0.0;
};

/// Compares adjoint directional derivatives with central differences
/// (J(u + h d) - J(u - h d)) / 2h along seeded smooth directions.
GradientCheckReport gradient_check(const ProblemDefinition& problem, const Field& u, const BoundaryField& v,
                                   const Grid& grid, int n_directions, const GradientCheckOptions& opts = {});

/// Relative error of a single, caller-supplied direction.
GradientCheckRow gradient_check_direction(const ProblemDefinition& problem, const Field& u,
                                          const BoundaryField& v, const Field& du, const BoundaryField& dv,
                                          const Grid& grid, double fd_step, const StepperOptions& stepper = {});

/// Heat flow y_t = Lap y with homogeneous Neumann data and y0 = cos(pi x) cos(pi y) on the
/// unit square; the exact solution is exp(-2 pi^2 t) y0.
ProblemDefinition manufactured_heat_problem(double horizon);

struct ConvergenceLevel {
    int n = 0;   ///< spatial intervals per axis
    int nt = 0;
    double h = 0.0;
    double dt = 0.0;
    double error = 0.0;                ///< L2(Omega) error at the final time
    std::optional<double> order;       ///< observed order against the previous level
};

struct ConvergenceOptions {
    double horizon = 0.1;
    int spatial_base = 8;        ///< coarsest intervals per axis of the spatial study
    int spatial_steps = 20;      ///< fixed time steps of the spatial study
    int temporal_base = 10;      ///< coarsest step count of the temporal study
    int temporal_space = 64;     ///< fixed intervals per axis of the temporal study
    StepperOptions stepper{1e-12, 20000, 1e12};
};

struct ConvergenceReport {
    /// Refines h at fixed dt; the reference is the backward-Euler march of the exact
    /// spatial mode, (1 + dt 2 pi^2)^{-n} y0, so only the spatial error remains.
    std::vector<ConvergenceLevel> spatial;
    /// Refines dt on a fine grid against the exact solution.
    std::vector<ConvergenceLevel> temporal;
    double initial_error = 0.0;  ///< max |y_h(0) - y0| at nodes

    double min_spatial_order() const;
    double max_spatial_order() const;
    double min_temporal_order() const;
    double max_temporal_order() const;
};

/// Throws std::invalid_argument when levels < 2.
ConvergenceReport convergence_study(int levels, const ConvergenceOptions& opts = {});

}  // namespace amsa
