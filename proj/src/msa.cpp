#include "amsa/msa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "amsa/errors.hpp"

namespace amsa {

std::string to_string(Termination t) {
    switch (t) {
        case Termination::epsilon: return "epsilon";
        case Termination::max_iters: return "max_iters";
        case Termination::blow_up: return "blow_up";
    }
    return "unknown";
}

void SolverConfig::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("solver: epsilon must be positive");
    if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
    minimizer.validate();
}

double eval_cost(const ProblemDefinition& problem, const StateSolution& state, const Field& u,
                 const BoundaryField& v, const Grid& g) {
    if (!u.matches(g) || !v.matches(g) || !state.y.matches(g)) {
        throw DimensionError("eval_cost: shapes do not match grid");
    }
    const auto w = g.area_weights();
    const auto bnodes = g.boundary();
    const int nt = g.nt();
    double running = 0.0;
    for (int n = 0; n < nt; ++n) {
        const double wt = g.time_weight(n, TimeRule::left_endpoint);
        const double t = g.t(n);
        const auto y = state.y.level(n);
        double level = 0.0;
        for (int i = 0; i <= g.nx(); ++i) {
            for (int j = 0; j <= g.ny(); ++j) {
                const std::size_t k = g.index(i, j);
                level += w[k] * problem.F(g.point(i, j), t, y[k], u(n, k));
            }
        }
        for (std::size_t b = 0; b < bnodes.size(); ++b) {
            level += bnodes[b].weight * problem.G(bnodes[b], t, state.boundary_trace(n, b), v(n, b));
        }
        running += wt * level;
    }
    double terminal = 0.0;
    const auto yT = state.y.level(nt);
    for (int i = 0; i <= g.nx(); ++i) {
        for (int j = 0; j <= g.ny(); ++j) {
            const std::size_t k = g.index(i, j);
            terminal += w[k] * problem.L(g.point(i, j), yT[k]);
        }
    }
    const double total = running + terminal;
    if (!std::isfinite(total)) throw EvaluationError("cost functional evaluated to a non-finite value");
    return total;
}

namespace {

void assert_descent(double after, double before, const char* which, int level, std::size_t node) {
    if (after <= before + 1e-12 * (1.0 + std::abs(before))) return;
    std::ostringstream os;
    os << which << " augmented Hamiltonian increased at level " << level << ", node " << node << ": "
       << before << " -> " << after;
    throw MinimizerError(os.str());
}

}  // namespace

ControlUpdate update_controls(const ProblemDefinition& problem, const StateSolution& state,
                              const AdjointSolution& adjoint, const Field& u, const BoundaryField& v,
                              double rho, const SolverConfig& cfg, const Grid& g) {
    if (!(rho >= 0.0)) throw std::invalid_argument("update_controls: rho must be >= 0");
    const auto bnodes = g.boundary();
    ControlUpdate next{u, v};

    const bool closed_u = cfg.minimizer_mode == MinimizerMode::automatic &&
                          problem.distributed_quadratic &&
                          problem.distributed_quadratic->curvature + 2.0 * rho > 0.0;
    const bool closed_v = cfg.minimizer_mode == MinimizerMode::automatic && problem.boundary_quadratic &&
                          problem.boundary_quadratic->curvature + 2.0 * rho > 0.0;

    for (int n = 0; n <= g.nt(); ++n) {
        const double t = g.t(n);
        for (int i = 0; i <= g.nx(); ++i) {
            for (int j = 0; j <= g.ny(); ++j) {
                const std::size_t k = g.index(i, j);
                const Point x = g.point(i, j);
                const double y = state.y(n, k);
                const double p = adjoint.p(n, k);
                const AugmentationParams aug{rho, u(n, k)};
                double out;
                if (problem.u_box.degenerate()) {
                    out = problem.u_box.lo;
                } else if (closed_u) {
                    const auto& q = *problem.distributed_quadratic;
                    out = minimize_quadratic_closed_form(q.curvature, -p * q.control_slope, aug, problem.u_box);
                } else {
                    out = minimize_pointwise(
                        [&](double c) { return h_omega_aug(problem, x, t, y, c, p, aug); }, problem.u_box,
                        cfg.minimizer, aug.anchor);
                }
                if (cfg.check_anchor_descent && problem.u_box.contains(aug.anchor)) {
                    assert_descent(h_omega_aug(problem, x, t, y, out, p, aug),
                                   h_omega_aug(problem, x, t, y, aug.anchor, p, aug), "distributed", n, k);
                }
                next.u(n, k) = out;
            }
        }
        for (std::size_t b = 0; b < bnodes.size(); ++b) {
            const double y = state.boundary_trace(n, b);
            const double p = adjoint.boundary_trace(n, b);
            const AugmentationParams aug{rho, v(n, b)};
            double out;
            if (problem.v_box.degenerate()) {
                out = problem.v_box.lo;
            } else if (closed_v) {
                const auto& q = *problem.boundary_quadratic;
                out = minimize_quadratic_closed_form(q.curvature, -p * q.control_slope, aug, problem.v_box);
            } else {
                out = minimize_pointwise(
                    [&](double c) { return h_sigma_aug(problem, bnodes[b], t, y, c, p, aug); }, problem.v_box,
                    cfg.minimizer, aug.anchor);
            }
            if (cfg.check_anchor_descent && problem.v_box.contains(aug.anchor)) {
                assert_descent(h_sigma_aug(problem, bnodes[b], t, y, out, p, aug),
                               h_sigma_aug(problem, bnodes[b], t, y, aug.anchor, p, aug), "boundary", n, b);
            }
            next.v(n, b) = out;
        }
    }
    return next;
}

namespace {

RunResult run_loop(const ProblemDefinition& problem, const Field& u0, const BoundaryField& v0, double rho,
                   const SolverConfig& cfg, const Grid& g, const IterationObserver& observer) {
    cfg.validate();
    if (!(rho >= 0.0)) throw std::invalid_argument("rho must be >= 0");
    if (!u0.matches(g) || !v0.matches(g)) throw DimensionError("initial controls do not match grid");

    RunResult result;
    result.u = u0;
    result.v = v0;
    result.state = solve_state(problem, result.u, result.v, g, cfg.stepper);
    double cost = eval_cost(problem, result.state, result.u, result.v, g);
    result.initial_cost = cost;
    result.adjoint = solve_adjoint(problem, result.state, result.u, result.v, g, cfg.stepper);

    result.terminated_by = Termination::max_iters;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        ControlUpdate next =
            update_controls(problem, result.state, result.adjoint, result.u, result.v, rho, cfg, g);

        StateSolution state;
        double next_cost;
        try {
            state = solve_state(problem, next.u, next.v, g, cfg.stepper);
            next_cost = eval_cost(problem, state, next.u, next.v, g);
        } catch (const BlowUpError&) {
            result.terminated_by = Termination::blow_up;
            break;
        } catch (const EvaluationError&) {
            result.terminated_by = Termination::blow_up;
            break;
        }

        IterationRecord rec;
        rec.index = it;
        rec.cost = next_cost;
        rec.delta_cost = next_cost - cost;
        rec.du_norm_sq = norm_sq_omega_t(difference(next.u, result.u), g, TimeRule::left_endpoint);
        rec.dv_norm_sq = norm_sq_sigma_t(difference(next.v, result.v), g, TimeRule::left_endpoint);
        rec.max_state = max_abs(state.y.values());
        rec.max_adjoint = uniform_bound_check(result.adjoint);
        result.history.push_back(rec);

        result.u = std::move(next.u);
        result.v = std::move(next.v);
        result.state = std::move(state);
        cost = next_cost;
        if (observer) observer(rec, result.u, result.v, result.state);

        try {
            result.adjoint = solve_adjoint(problem, result.state, result.u, result.v, g, cfg.stepper);
        } catch (const BlowUpError&) {
            result.terminated_by = Termination::blow_up;
            break;
        }
        if (std::abs(rec.delta_cost) < cfg.epsilon) {
            result.terminated_by = Termination::epsilon;
            break;
        }
    }
    return result;
}

}  // namespace

RunResult run_basic_msa(const ProblemDefinition& problem, const Field& u0, const BoundaryField& v0,
                        const SolverConfig& cfg, const Grid& g, const IterationObserver& observer) {
    return run_loop(problem, u0, v0, 0.0, cfg, g, observer);
}

RunResult run_augmented_msa(const ProblemDefinition& problem, const Field& u0, const BoundaryField& v0,
                            double rho, const SolverConfig& cfg, const Grid& g,
                            const IterationObserver& observer) {
    return run_loop(problem, u0, v0, rho, cfg, g, observer);
}

double fit_c_tilde(std::span<const IterationRecord> history, double rho) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : history) {
        const double inc = r.du_norm_sq + r.dv_norm_sq;
        if (inc > 0.0) best = std::max(best, r.delta_cost / inc + rho);
    }
    return std::isfinite(best) ? best : 0.0;
}

DescentCertificate descent_certificate(std::span<const IterationRecord> history, double rho,
                                       double c_tilde_estimate, const CertificateOptions& options) {
    DescentCertificate cert;
    cert.rho = rho;
    cert.c_tilde = c_tilde_estimate;
    cert.rho_exceeds_c_tilde = rho > c_tilde_estimate;

    double min_cost = std::numeric_limits<double>::infinity();
    for (const auto& r : history) {
        CertificateRow row;
        row.index = r.index;
        row.delta_cost = r.delta_cost;
        row.increment = r.du_norm_sq + r.dv_norm_sq;
        row.slack = r.delta_cost - (c_tilde_estimate - rho) * row.increment;
        // relative allowance covers the rounding of the fitted constant itself
        const double allowance = options.tolerance * (1.0 + std::abs(r.delta_cost));
        row.holds = row.slack <= allowance;
        cert.all_hold = cert.all_hold && row.holds;
        cert.total_increment += row.increment;
        min_cost = std::min(min_cost, r.cost);
        cert.rows.push_back(row);
    }

    const int n = static_cast<int>(cert.rows.size());
    cert.tail_rows = static_cast<int>(std::floor(options.tail_portion * n));
    for (int k = n - cert.tail_rows; k < n; ++k) cert.tail_increment += cert.rows[k].increment;
    cert.tail_flattening =
        cert.tail_rows > 0 && (cert.total_increment == 0.0 ||
                                               cert.tail_increment < options.tail_fraction * cert.total_increment);

    if (options.initial_cost && cert.rho_exceeds_c_tilde && n > 0) {
        min_cost = std::min(min_cost, *options.initial_cost);
        cert.summability_bound = (*options.initial_cost - min_cost) / (rho - c_tilde_estimate);
    }
    return cert;
}

}  // namespace amsa
