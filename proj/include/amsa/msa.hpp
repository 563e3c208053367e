#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amsa/grid.hpp"
#include "amsa/hamiltonian.hpp"
#include "amsa/pde_solvers.hpp"
#include "amsa/problem.hpp"

namespace amsa {

enum class Termination { epsilon, max_iters, blow_up };

std::string to_string(Termination t);

/// How the pointwise Hamiltonian minimization is carried out.
enum class MinimizerMode {
    automatic,  ///< closed form when the problem declares quadratic control structure
    gradient,   ///< always projected gradient descent
};

struct SolverConfig {
    double epsilon = 1e-4;  ///< stop once |J_{i+1} - J_i| < epsilon
    int max_iters = 10000;
    MinimizerConfig minimizer;
    MinimizerMode minimizer_mode = MinimizerMode::automatic;
    StepperOptions stepper;
    /// Verify H~(u_{i+1}) <= H~(u_i) at every node after the update.
    bool check_anchor_descent = true;

    void validate() const;
};

/// One completed control update. `index` counts updates, starting at 1.
struct IterationRecord {
    int index = 0;
    double cost = 0.0;        ///< J(u_{i+1}, v_{i+1})
    double delta_cost = 0.0;  ///< J(u_{i+1}, v_{i+1}) - J(u_i, v_i)
    double du_norm_sq = 0.0;  ///< ||u_{i+1} - u_i||^2 in L2(Omega_T)
    double dv_norm_sq = 0.0;  ///< ||v_{i+1} - v_i||^2 in L2(Sigma_T)
    double max_state = 0.0;   ///< max |y_{i+1}|
    double max_adjoint = 0.0; ///< max |p_i|, the adjoint that drove this update

    bool operator==(const IterationRecord&) const = default;
};

struct RunResult {
    Field u;
    BoundaryField v;
    StateSolution state;      ///< state of the final controls
    AdjointSolution adjoint;  ///< adjoint of the final controls
    std::vector<IterationRecord> history;
    Termination terminated_by = Termination::max_iters;
    double initial_cost = 0.0;
};

using IterationObserver =
    std::function<void(const IterationRecord&, const Field& u, const BoundaryField& v, const StateSolution&)>;

/// J = int_{Omega_T} F + int_{Sigma_T} G + int_Omega L(x, y(T)).
///
/// Running costs use left-endpoint time weights (controls are piecewise constant in
/// time) and trapezoidal weights in space; the terminal term uses the spatial weights.
double eval_cost(const ProblemDefinition& problem, const StateSolution& state, const Field& u,
                 const BoundaryField& v, const Grid& grid);

struct ControlUpdate {
    Field u;
    BoundaryField v;
};

/// Pointwise minimization of the (augmented) Hamiltonians at every node, anchored at
/// the current controls. rho = 0 gives the plain Hamiltonian update.
ControlUpdate update_controls(const ProblemDefinition& problem, const StateSolution& state,
                              const AdjointSolution& adjoint, const Field& u, const BoundaryField& v,
                              double rho, const SolverConfig& cfg, const Grid& grid);

/// Successive approximations: state solve, adjoint solve, pointwise Hamiltonian
/// minimization, repeated until |dJ| < epsilon, max_iters or blow-up. Divergence is
/// reported through `terminated_by`, not thrown.
RunResult run_basic_msa(const ProblemDefinition& problem, const Field& u0, const BoundaryField& v0,
                        const SolverConfig& cfg, const Grid& grid, const IterationObserver& observer = {});

/// As run_basic_msa with the Hamiltonians augmented by rho (anchor - control)^2.
RunResult run_augmented_msa(const ProblemDefinition& problem, const Field& u0, const BoundaryField& v0,
                            double rho, const SolverConfig& cfg, const Grid& grid,
                            const IterationObserver& observer = {});

struct CertificateRow {
    int index = 0;
    double delta_cost = 0.0;
    double increment = 0.0;  ///< du_norm_sq + dv_norm_sq
    double slack = 0.0;      ///< delta_cost - (c_tilde - rho) * increment
    bool holds = false;      ///< slack <= tolerance
};

struct CertificateOptions {
    double tail_portion = 0.25;   ///< trailing share of the history treated as the tail
    double tail_fraction = 0.1;   ///< tail sum must stay below this share of the total
    double tolerance = 1e-12;     ///< absolute slack allowance (scaled by 1 + |dJ|)
    std::optional<double> initial_cost;  ///< J(u_0, v_0); enables the summability bound
};

struct DescentCertificate {
    std::vector<CertificateRow> rows;
    double rho = 0.0;
    double c_tilde = 0.0;
    bool all_hold = true;
    bool rho_exceeds_c_tilde = false;
    double total_increment = 0.0;
    int tail_rows = 0;
    double tail_increment = 0.0;
    bool tail_flattening = false;
    /// (J_0 - min J) / (rho - c_tilde), present when rho > c_tilde and J_0 is known
    std::optional<double> summability_bound;
};

/// Smallest C~ with delta_cost <= (C~ - rho) * increment on every row that moved:
/// max over those rows of delta_cost / increment + rho. Zero when nothing moved.
double fit_c_tilde(std::span<const IterationRecord> history, double rho);

/// Checks J_{i+1} - J_i <= (C~ - rho)(||du||^2 + ||dv||^2) row by row, the running
/// sum of squared increments, and whether its tail has flattened.
DescentCertificate descent_certificate(std::span<const IterationRecord> history, double rho,
                                       double c_tilde_estimate, const CertificateOptions& options = {});

}  // namespace amsa
