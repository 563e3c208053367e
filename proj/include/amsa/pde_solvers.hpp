#pragma once

#include <span>
#include <vector>

#include "amsa/grid.hpp"
#include "amsa/problem.hpp"

namespace amsa {

struct StepperOptions {
    double cg_tol = 1e-10;  ///< relative residual
    int cg_max_iter = 20000;
    double blowup_threshold = 1e12;  ///< max |y| beyond which marching is abandoned
};

/// Discrete elliptic operator A y = -div(a grad y) on the grid's nodes with conormal
/// boundary closure.
///
/// The operator is assembled from a discrete energy: each grid edge contributes
/// a_nn(edge midpoint) (dy)^2 / h weighted by the edge's share of the dual cell, and each
/// cell contributes 2 a12(cell centre) D_x y D_y y with cell-centred differences. Then
/// W A is the symmetric Hessian of that energy, W being the trapezoidal area weights. For
/// a diagonal tensor this is the conservative 5-point stencil, and at edge nodes it
/// coincides with the second-order ghost-node closure of dy/dn_A = g.
class EllipticOperator {
public:
    EllipticOperator(const DiffusionCoefficients& coeffs, const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }

    /// out = W A y (homogeneous conormal data).
    void apply_stiffness(std::span<const double> y, std::span<double> out) const;

    /// out = A y (homogeneous conormal data).
    void apply(std::span<const double> y, std::span<double> out) const;

    std::span<const double> stiffness_diagonal() const noexcept { return diagonal_; }

private:
    Grid grid_;
    std::vector<double> x_edges_;  // (nx) x (ny+1)
    std::vector<double> y_edges_;  // (nx+1) x (ny)
    std::vector<double> cross_;    // nx x ny, empty for diagonal tensors
    std::vector<double> diagonal_;
};

/// A applied to `slice`. When `conormal_flux` is given (boundary order, dy/dn_A = flux at
/// each edge node), the ghost closure adds -E flux with E the boundary lift.
std::vector<double> apply_elliptic(const DiffusionCoefficients& coeffs, std::span<const double> slice,
                                   const Grid& grid, std::span<const double> conormal_flux = {});

/// Solves (I + dt A) y = rhs by Jacobi-preconditioned conjugate gradients on the
/// symmetrised system (W + dt W A) y = W rhs.
class ImplicitDiffusionSolver {
public:
    ImplicitDiffusionSolver(const EllipticOperator& op, double dt, const StepperOptions& opts);

    /// `y` holds the initial guess on entry. Returns the iteration count.
    int solve(std::span<const double> rhs, std::span<double> y) const;

private:
    const EllipticOperator& op_;
    double dt_;
    StepperOptions opts_;
    std::vector<double> inv_diag_;
    mutable std::vector<double> r_, z_, d_, q_;
};

struct StateSolution {
    Field y;
    BoundaryField boundary_trace;
};

struct AdjointSolution {
    Field p;
    BoundaryField boundary_trace;
};

/// Forward IMEX backward-Euler march of y_t + A y + f(x,t,y,u) = 0,
/// dy/dn_A + v = 0, y(0) = y0:
///
///   (I + dt A) y^{n+1} = y^n - dt f(x, t_n, y^n, u^n) - dt E v^n.
///
/// Controls are piecewise constant in time: u^n and v^n act on [t_n, t_{n+1}), so the
/// final control level does not influence the state.
///
/// Throws BlowUpError with the first bad level if the state turns non-finite or exceeds
/// `opts.blowup_threshold`.
StateSolution solve_state(const ProblemDefinition& problem, const Field& u, const BoundaryField& v,
                          const Grid& grid, const StepperOptions& opts = {});

/// Backward march of the adjoint -p_t + A p + f_y p = F_y, dp/dn_A = G_y,
/// p(T) = L_y(x, y(T)):
///
///   p^N = L_y(x, y^N),
///   (I + dt A) p^n = (1 - dt f_y^{n+1}) p^{n+1} + dt F_y^{n+1} + dt E G_y^{n+1},
///
/// where the data at level N are zero because the final level carries no running cost.
/// This is the exact transpose of solve_state, so dJ[du] = <F_u - p f_u, du> with
/// left-endpoint time weights holds to solver precision.
AdjointSolution solve_adjoint(const ProblemDefinition& problem, const StateSolution& state,
                              const Field& u, const BoundaryField& v, const Grid& grid,
                              const StepperOptions& opts = {});

/// max |p| over all nodes and levels.
double uniform_bound_check(const AdjointSolution& adjoint);

}  // namespace amsa
