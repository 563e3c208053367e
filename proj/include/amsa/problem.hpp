#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "amsa/grid.hpp"

namespace amsa {

/// Closed admissible interval for a scalar control. Either end may be infinite.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    static Interval unbounded() { return {}; }
    static Interval singleton(double c) { return {c, c}; }

    bool bounded() const noexcept;
    bool degenerate() const noexcept { return lo == hi; }
    bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

/// Clamps `value` into `box`; identity on an unbounded box.
double project_control(double value, const Interval& box);

/// f(x, t, y, u) and F(x, t, y, u) and their partials.
using DistributedFn = std::function<double(const Point&, double t, double y, double u)>;
/// G(s, t, y, v); the boundary point carries x, y and arclength s.
using BoundaryFn = std::function<double(const BoundaryNode&, double t, double y, double v)>;
/// L(x, y(x, T)).
using TerminalFn = std::function<double(const Point&, double y)>;
using SpatialFn = std::function<double(const Point&)>;

/// Symmetric coefficient matrix a_ij(x) of the elliptic operator
/// A y = -div(a grad y). An empty `a12` means a diagonal tensor.
struct DiffusionCoefficients {
    SpatialFn a11;
    SpatialFn a12;
    SpatialFn a22;
    double ellipticity = 1.0;  ///< K with xi' a xi >= K |xi|^2

    static DiffusionCoefficients identity(double scale = 1.0);
    bool diagonal() const noexcept { return !a12; }
};

/// Declares that a Hamiltonian is quadratic in the control:
///   H(u) = (curvature/2) u^2 - p * control_slope * u + (terms free of u).
/// For the distributed part that means F = (alpha/2) u^2 + F0(x,t,y) and
/// f = f0(x,t,y) + control_slope * u; for the boundary part G = (beta/2) v^2 + G0
/// with control_slope = 1 (the v enters the conormal condition linearly).
struct QuadraticControl {
    double curvature = 0.0;
    double control_slope = 0.0;
};

/// One instance of the control problem on a rectangle [0,lx] x [0,ly] over (0, horizon).
struct ProblemDefinition {
    std::string name;
    double lx = 1.0;
    double ly = 1.0;
    double horizon = 1.0;

    DistributedFn f, f_y, f_yy, f_u;
    DistributedFn F, F_y, F_yy, F_u;
    BoundaryFn G, G_y, G_yy, G_v;
    TerminalFn L, L_y, L_yy;

    Interval u_box;
    Interval v_box;
    SpatialFn y0;
    DiffusionCoefficients diffusion;

    std::optional<QuadraticControl> distributed_quadratic;
    std::optional<QuadraticControl> boundary_quadratic;

    Grid make_grid(int nx, int ny, int nt) const { return Grid(nx, ny, nt, lx, ly, horizon); }
};

/// The unit-square experiment: y_t - Lap y = u + y with homogeneous Neumann data,
/// J = 1/2 ||y(T) - y_d||^2 + alpha/2 ||u||^2, y0 = sin(pi x) sin(pi y),
/// y_d = exp(-2 alpha pi T) sin(pi x) sin(pi y).
///
/// The boundary control is pinned to {0}: the experiment has no boundary control and
/// with G = 0 the boundary Hamiltonian -p v has no minimizer over an unbounded set.
ProblemDefinition builtin_paper_test(double alpha = 1.0, double horizon = 1.0);

/// A semilinear instance exercising every term: cubic reaction, y-dependent running and
/// boundary costs, an anisotropic tensor with a cross term, and bounded controls.
ProblemDefinition builtin_semilinear_test(double horizon = 1.0);

/// Looks up a built-in by name ("reference" or "semilinear").
ProblemDefinition builtin_problem(const std::string& name);

std::vector<std::string> builtin_problem_names();

struct LatticeOptions {
    int space_samples = 5;    ///< per axis
    int time_samples = 3;
    int state_samples = 5;
    double state_min = -2.0;
    double state_max = 2.0;
    int control_samples = 5;
    double control_extent = 2.0;  ///< sampling window for unbounded control boxes
    double consistency_tol = 1e-5;
};

struct DerivativeCheck {
    std::string callback;    ///< e.g. "f_y"
    double max_abs = 0.0;    ///< max |derivative| over the lattice
    double max_error = 0.0;  ///< max |derivative - FD| / (1 + |derivative|)
    bool consistent = true;
};

struct ValidationReport {
    std::vector<DerivativeCheck> first_derivatives;
    /// max |second derivative| for each supplied f_yy, F_yy, G_yy, L_yy
    std::vector<DerivativeCheck> second_derivatives;
    double min_ellipticity = 0.0;  ///< min over lattice and unit directions of xi' a xi
    bool elliptic = true;          ///< min_ellipticity >= K > 0
    bool symmetric_diffusion = true;
    bool boxes_nonempty = true;

    bool ok() const;
};

/// Samples the callbacks on a lattice and checks finiteness, derivative consistency,
/// ellipticity and box sanity. Throws InvalidProblem on a missing callback or a
/// non-finite value, naming the callback and the point.
ValidationReport validate(const ProblemDefinition& problem, const LatticeOptions& opts = {});

}  // namespace amsa
