#include "amsa/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "amsa/hamiltonian.hpp"

namespace amsa {

namespace {

BoundCheckReport make_report(double lhs, double rhs) {
    BoundCheckReport r;
    r.lhs = lhs;
    r.rhs_without_constant = rhs;
    r.ratio = rhs > 0.0 ? lhs / rhs : 0.0;
    r.fitted_constant = std::max(r.ratio, 0.0);
    return r;
}

ControlPair shifted(const ControlPair& base, const ControlPair& dir, double scale) {
    ControlPair out = base;
    auto u = out.u.values();
    const auto du = dir.u.values();
    for (std::size_t k = 0; k < u.size(); ++k) u[k] += scale * du[k];
    auto v = out.v.values();
    const auto dv = dir.v.values();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += scale * dv[k];
    return out;
}

double control_derivative(const DistributedFn& exact, const DistributedFn& primitive, const Point& x,
                          double t, double y, double u) {
    if (exact) return exact(x, t, y, u);
    const double h = 1e-6 * (1.0 + std::abs(u));
    return (primitive(x, t, y, u + h) - primitive(x, t, y, u - h)) / (2.0 * h);
}

}  // namespace

BoundCheckReport check_state_stability(const ProblemDefinition& problem, const ControlPair& base,
                                       const ControlPair& perturbed, const Grid& g, const StepperOptions& opts) {
    const StateSolution y_theta = solve_state(problem, base.u, base.v, g, opts);
    const StateSolution y_phi = solve_state(problem, perturbed.u, perturbed.v, g, opts);

    const Field dy = difference(y_phi.y, y_theta.y);
    const BoundaryField dy_b = difference(y_phi.boundary_trace, y_theta.boundary_trace);
    const double lhs = norm_sq_omega_t(dy, g) + norm_sq_sigma_t(dy_b, g);

    Field df(g);
    for (int n = 0; n <= g.nt(); ++n) {
        const double t = g.t(n);
        for (int i = 0; i <= g.nx(); ++i) {
            for (int j = 0; j <= g.ny(); ++j) {
                const std::size_t k = g.index(i, j);
                const Point x = g.point(i, j);
                const double y = y_theta.y(n, k);
                df(n, k) = problem.f(x, t, y, perturbed.u(n, k)) - problem.f(x, t, y, base.u(n, k));
            }
        }
    }
    const double rhs = norm_sq_sigma_t(difference(perturbed.v, base.v), g, TimeRule::left_endpoint) +
                       norm_sq_omega_t(df, g, TimeRule::left_endpoint);
    return make_report(lhs, rhs);
}

BoundCheckReport check_cost_gap(const ProblemDefinition& problem, const ControlPair& theta, const ControlPair& phi,
                                const Grid& g, const StepperOptions& opts) {
    const StateSolution y_theta = solve_state(problem, theta.u, theta.v, g, opts);
    const AdjointSolution p_theta = solve_adjoint(problem, y_theta, theta.u, theta.v, g, opts);
    const StateSolution y_phi = solve_state(problem, phi.u, phi.v, g, opts);
    const double j_theta = eval_cost(problem, y_theta, theta.u, theta.v, g);
    const double j_phi = eval_cost(problem, y_phi, phi.u, phi.v, g);

    Field gap_omega(g);
    BoundaryField gap_sigma(g);
    const auto bnodes = g.boundary();
    for (int n = 0; n <= g.nt(); ++n) {
        const double t = g.t(n);
        for (int i = 0; i <= g.nx(); ++i) {
            for (int j = 0; j <= g.ny(); ++j) {
                const std::size_t k = g.index(i, j);
                const Point x = g.point(i, j);
                const double y = y_theta.y(n, k), p = p_theta.p(n, k);
                gap_omega(n, k) = h_omega(problem, x, t, y, phi.u(n, k), p) - h_omega(problem, x, t, y, theta.u(n, k), p);
            }
        }
        for (std::size_t b = 0; b < bnodes.size(); ++b) {
            const double y = y_theta.boundary_trace(n, b), p = p_theta.boundary_trace(n, b);
            gap_sigma(n, b) = h_sigma(problem, bnodes[b], t, y, phi.v(n, b), p) -
                              h_sigma(problem, bnodes[b], t, y, theta.v(n, b), p);
        }
    }
    const double hamiltonian_gap = inner_product_omega_t(gap_omega, Field(g, 1.0), g, TimeRule::left_endpoint) +
                                   inner_product_sigma_t(gap_sigma, BoundaryField(g, 1.0), g, TimeRule::left_endpoint);
    const double lhs = j_phi - j_theta - hamiltonian_gap;
    const double rhs = norm_sq_omega_t(difference(phi.u, theta.u), g, TimeRule::left_endpoint) +
                       norm_sq_sigma_t(difference(phi.v, theta.v), g, TimeRule::left_endpoint);
    return make_report(lhs, rhs);
}

namespace {

template <class Check>
BoundStudy run_study(const ProblemDefinition& problem, const Grid& g, const StudyOptions& opts, Check check) {
    if (opts.samples < 1 || opts.amplitudes.empty()) {
        throw std::invalid_argument("bound study needs at least one sample and one amplitude");
    }
    BoundStudy study;
    study.seed = opts.seed;

    std::mt19937_64 rng(opts.seed);
    std::vector<ControlPair> bases, directions;
    for (int s = 0; s < opts.samples; ++s) {
        ControlPair base{smooth_random_field(g, rng), smooth_random_boundary_field(g, rng)};
        for (double& x : base.u.values()) x *= opts.base_amplitude;
        for (double& x : base.v.values()) x *= opts.base_amplitude;
        bases.push_back(std::move(base));
        directions.push_back({smooth_random_field(g, rng), smooth_random_boundary_field(g, rng)});
    }

    double lowest = std::numeric_limits<double>::infinity(), highest = 0.0;
    for (double amp : opts.amplitudes) {
        AmplitudeSamples level;
        level.amplitude = amp;
        std::vector<double> ratios;
        for (int s = 0; s < opts.samples; ++s) {
            BoundCheckReport r = check(problem, bases[s], shifted(bases[s], directions[s], amp), g, opts.stepper);
            study.finite = study.finite && std::isfinite(r.lhs) && std::isfinite(r.rhs_without_constant) &&
                           std::isfinite(r.ratio);
            ratios.push_back(r.fitted_constant);
            level.samples.push_back(r);
        }
        std::vector<double> sorted = ratios;
        std::sort(sorted.begin(), sorted.end());
        level.max_ratio = sorted.back();
        const std::size_t mid = sorted.size() / 2;
        level.median_ratio = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
        if (level.median_ratio > 0.0) {
            study.outlier_factor = std::max(study.outlier_factor, level.max_ratio / level.median_ratio);
        }
        lowest = std::min(lowest, level.max_ratio);
        highest = std::max(highest, level.max_ratio);
        study.levels.push_back(std::move(level));
    }
    study.amplitude_spread = lowest > 0.0 ? highest / lowest : (highest > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    return study;
}

}  // namespace

BoundStudy study_state_stability(const ProblemDefinition& problem, const Grid& g, const StudyOptions& opts) {
    return run_study(problem, g, opts, check_state_stability);
}

BoundStudy study_cost_gap(const ProblemDefinition& problem, const Grid& g, const StudyOptions& opts) {
    return run_study(problem, g, opts, check_cost_gap);
}

// ---------------------------------------------------------------------------

ControlPair reduced_gradient(const ProblemDefinition& problem, const StateSolution& state,
                             const AdjointSolution& adjoint, const Field& u, const BoundaryField& v, const Grid& g) {
    ControlPair grad{Field(g), BoundaryField(g)};
    for (int n = 0; n <= g.nt(); ++n) {
        const double t = g.t(n);
        for (int i = 0; i <= g.nx(); ++i) {
            for (int j = 0; j <= g.ny(); ++j) {
                const std::size_t k = g.index(i, j);
                const Point x = g.point(i, j);
                const double y = state.y(n, k), c = u(n, k);
                grad.u(n, k) = control_derivative(problem.F_u, problem.F, x, t, y, c) -
                               adjoint.p(n, k) * control_derivative(problem.f_u, problem.f, x, t, y, c);
            }
        }
        const auto bnodes = g.boundary();
        for (std::size_t b = 0; b < bnodes.size(); ++b) {
            const double y = state.boundary_trace(n, b), c = v(n, b);
            double g_v;
            if (problem.G_v) {
                g_v = problem.G_v(bnodes[b], t, y, c);
            } else {
                const double h = 1e-6 * (1.0 + std::abs(c));
                g_v = (problem.G(bnodes[b], t, y, c + h) - problem.G(bnodes[b], t, y, c - h)) / (2.0 * h);
            }
            grad.v(n, b) = g_v - adjoint.boundary_trace(n, b);
        }
    }
    return grad;
}

double adjoint_directional_derivative(const ProblemDefinition& problem, const StateSolution& state,
                                      const AdjointSolution& adjoint, const Field& u, const BoundaryField& v,
                                      const Field& du, const BoundaryField& dv, const Grid& g) {
    const ControlPair grad = reduced_gradient(problem, state, adjoint, u, v, g);
    return inner_product_omega_t(grad.u, du, g, TimeRule::left_endpoint) +
           inner_product_sigma_t(grad.v, dv, g, TimeRule::left_endpoint);
}

GradientCheckRow gradient_check_direction(const ProblemDefinition& problem, const Field& u, const BoundaryField& v,
                                          const Field& du, const BoundaryField& dv, const Grid& g, double fd_step,
                                          const StepperOptions& stepper) {
    const StateSolution state = solve_state(problem, u, v, g, stepper);
    const AdjointSolution adjoint = solve_adjoint(problem, state, u, v, g, stepper);

    GradientCheckRow row;
    row.adjoint = adjoint_directional_derivative(problem, state, adjoint, u, v, du, dv, g);

    const ControlPair base{u, v}, dir{du, dv};
    const ControlPair plus = shifted(base, dir, fd_step);
    const ControlPair minus = shifted(base, dir, -fd_step);
    const double j_plus = eval_cost(problem, solve_state(problem, plus.u, plus.v, g, stepper), plus.u, plus.v, g);
    const double j_minus =
        eval_cost(problem, solve_state(problem, minus.u, minus.v, g, stepper), minus.u, minus.v, g);
    row.finite_difference = (j_plus - j_minus) / (2.0 * fd_step);

    const double scale = std::max(std::abs(row.finite_difference), std::abs(row.adjoint));
    row.relative_error = scale > 0.0 ? std::abs(row.adjoint - row.finite_difference) / scale : 0.0;
    return row;
}

GradientCheckReport gradient_check(const ProblemDefinition& problem, const Field& u, const BoundaryField& v,
                                   const Grid& g, int n_directions, const GradientCheckOptions& opts) {
    if (n_directions < 1) throw std::invalid_argument("gradient_check: n_directions must be >= 1");
    GradientCheckReport report;
    report.seed = opts.seed;
    report.fd_step = opts.fd_step;
    std::mt19937_64 rng(opts.seed);
    for (int d = 0; d < n_directions; ++d) {
        Field du = smooth_random_field(g, rng);
        BoundaryField dv = smooth_random_boundary_field(g, rng);
        if (!opts.perturb_distributed) du = Field(g);
        if (!opts.perturb_boundary) dv = BoundaryField(g);
        GradientCheckRow row = gradient_check_direction(problem, u, v, du, dv, g, opts.fd_step, opts.stepper);
        row.direction = d;
        report.max_relative_error = std::max(report.max_relative_error, row.relative_error);
        report.rows.push_back(row);
    }
    return report;
}

// ---------------------------------------------------------------------------

ProblemDefinition manufactured_heat_problem(double horizon) {
    using std::numbers::pi;
    ProblemDefinition p;
    p.name = "heat";
    p.horizon = horizon;
    auto zero4 = [](const Point&, double, double, double) { return 0.0; };
    auto zero_b = [](const BoundaryNode&, double, double, double) { return 0.0; };
    p.f = p.f_y = p.f_yy = p.f_u = zero4;
    p.F = p.F_y = p.F_yy = p.F_u = zero4;
    p.G = p.G_y = p.G_yy = p.G_v = zero_b;
    p.L = p.L_y = p.L_yy = [](const Point&, double) { return 0.0; };
    p.u_box = Interval::singleton(0.0);
    p.v_box = Interval::singleton(0.0);
    p.y0 = [](const Point& x) { return std::cos(pi * x.x) * std::cos(pi * x.y); };
    p.diffusion = DiffusionCoefficients::identity();
    return p;
}

namespace {

double heat_error(const ProblemDefinition& heat, int n, int nt, double horizon, double amplitude,
                  const StepperOptions& stepper, double* initial_error = nullptr) {
    const Grid g = Grid::unit(n, n, nt, horizon);
    const StateSolution s = solve_state(heat, Field(g), BoundaryField(g), g, stepper);
    std::vector<double> err(g.nodes());
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const std::size_t k = g.index(i, j);
            const double mode = heat.y0(g.point(i, j));
            err[k] = s.y(nt, k) - amplitude * mode;
            if (initial_error) *initial_error = std::max(*initial_error, std::abs(s.y(0, k) - mode));
        }
    }
    return norm_l2_omega_final(err, g);
}

void fill_orders(std::vector<ConvergenceLevel>& levels, bool by_space) {
    for (std::size_t k = 1; k < levels.size(); ++k) {
        const double ratio_step = by_space ? levels[k - 1].h / levels[k].h : levels[k - 1].dt / levels[k].dt;
        levels[k].order = std::log(levels[k - 1].error / levels[k].error) / std::log(ratio_step);
    }
}

double extreme_order(const std::vector<ConvergenceLevel>& levels, bool want_min) {
    double out = want_min ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    for (const auto& l : levels) {
        if (l.order) out = want_min ? std::min(out, *l.order) : std::max(out, *l.order);
    }
    return out;
}

}  // namespace

double ConvergenceReport::min_spatial_order() const { return extreme_order(spatial, true); }
double ConvergenceReport::max_spatial_order() const { return extreme_order(spatial, false); }
double ConvergenceReport::min_temporal_order() const { return extreme_order(temporal, true); }
double ConvergenceReport::max_temporal_order() const { return extreme_order(temporal, false); }

ConvergenceReport convergence_study(int levels, const ConvergenceOptions& opts) {
    if (levels < 2) throw std::invalid_argument("convergence_study: need at least 2 levels");
    using std::numbers::pi;
    const double lambda = 2.0 * pi * pi;
    const ProblemDefinition heat = manufactured_heat_problem(opts.horizon);

    ConvergenceReport report;
    for (int l = 0; l < levels; ++l) {
        ConvergenceLevel level;
        level.n = opts.spatial_base << l;
        level.nt = opts.spatial_steps;
        level.h = 1.0 / level.n;
        level.dt = opts.horizon / level.nt;
        const double time_discrete = std::pow(1.0 + level.dt * lambda, -level.nt);
        level.error = heat_error(heat, level.n, level.nt, opts.horizon, time_discrete, opts.stepper,
                                 l == 0 ? &report.initial_error : nullptr);
        report.spatial.push_back(level);
    }
    for (int l = 0; l < levels; ++l) {
        ConvergenceLevel level;
        level.n = opts.temporal_space;
        level.nt = opts.temporal_base << l;
        level.h = 1.0 / level.n;
        level.dt = opts.horizon / level.nt;
        level.error = heat_error(heat, level.n, level.nt, opts.horizon, std::exp(-lambda * opts.horizon), opts.stepper);
        report.temporal.push_back(level);
    }
    fill_orders(report.spatial, true);
    fill_orders(report.temporal, false);
    return report;
}

}  // namespace amsa
