#include "amsa/pde_solvers.hpp"

#include <cmath>
#include <sstream>

#include "amsa/errors.hpp"

namespace amsa {

EllipticOperator::EllipticOperator(const DiffusionCoefficients& coeffs, const Grid& grid)
    : grid_(grid) {
    if (!coeffs.a11 || !coeffs.a22) throw InvalidProblem("diffusion coefficients a11/a22 missing");
    const int nx = grid.nx(), ny = grid.ny();
    const double hx = grid.hx(), hy = grid.hy();

    x_edges_.resize(static_cast<std::size_t>(nx) * (ny + 1));
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j <= ny; ++j) {
            const double share = (j == 0 || j == ny) ? 0.5 * hy : hy;
            const double a = coeffs.a11({grid.x(i) + 0.5 * hx, grid.y(j)});
            x_edges_[static_cast<std::size_t>(i) * (ny + 1) + j] = a * share / hx;
        }
    }
    y_edges_.resize(static_cast<std::size_t>(nx + 1) * ny);
    for (int i = 0; i <= nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const double share = (i == 0 || i == nx) ? 0.5 * hx : hx;
            const double a = coeffs.a22({grid.x(i), grid.y(j) + 0.5 * hy});
            y_edges_[static_cast<std::size_t>(i) * ny + j] = a * share / hy;
        }
    }
    if (!coeffs.diagonal()) {
        cross_.resize(static_cast<std::size_t>(nx) * ny);
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                const double a = coeffs.a12({grid.x(i) + 0.5 * hx, grid.y(j) + 0.5 * hy});
                cross_[static_cast<std::size_t>(i) * ny + j] = a * hx * hy;
            }
        }
    }

    diagonal_.assign(grid.nodes(), 0.0);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j <= ny; ++j) {
            const double c = x_edges_[static_cast<std::size_t>(i) * (ny + 1) + j];
            diagonal_[grid.index(i, j)] += c;
            diagonal_[grid.index(i + 1, j)] += c;
        }
    }
    for (int i = 0; i <= nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const double c = y_edges_[static_cast<std::size_t>(i) * ny + j];
            diagonal_[grid.index(i, j)] += c;
            diagonal_[grid.index(i, j + 1)] += c;
        }
    }
    if (!cross_.empty()) {
        // d^2/dy_k^2 of q Dx Dy is +q/(2 hx hy) on the 00/11 corners, -q/(2 hx hy) on 10/01
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                const double q = cross_[static_cast<std::size_t>(i) * ny + j] / (2.0 * hx * hy);
                diagonal_[grid.index(i, j)] += q;
                diagonal_[grid.index(i + 1, j + 1)] += q;
                diagonal_[grid.index(i + 1, j)] -= q;
                diagonal_[grid.index(i, j + 1)] -= q;
            }
        }
    }
}

void EllipticOperator::apply_stiffness(std::span<const double> y, std::span<double> out) const {
    const int nx = grid_.nx(), ny = grid_.ny();
    const std::size_t stride = static_cast<std::size_t>(ny) + 1;
    if (y.size() != grid_.nodes() || out.size() != grid_.nodes()) {
        throw DimensionError("EllipticOperator: slice shape mismatch");
    }
    std::fill(out.begin(), out.end(), 0.0);

    for (int i = 0; i < nx; ++i) {
        const double* c = &x_edges_[static_cast<std::size_t>(i) * stride];
        const std::size_t k0 = static_cast<std::size_t>(i) * stride;
        const std::size_t k1 = k0 + stride;
        for (std::size_t j = 0; j < stride; ++j) {
            const double flux = c[j] * (y[k1 + j] - y[k0 + j]);
            out[k0 + j] -= flux;
            out[k1 + j] += flux;
        }
    }
    for (int i = 0; i <= nx; ++i) {
        const double* c = &y_edges_[static_cast<std::size_t>(i) * ny];
        const std::size_t k0 = static_cast<std::size_t>(i) * stride;
        for (int j = 0; j < ny; ++j) {
            const double flux = c[j] * (y[k0 + j + 1] - y[k0 + j]);
            out[k0 + j] -= flux;
            out[k0 + j + 1] += flux;
        }
    }
    if (!cross_.empty()) {
        const double hx = grid_.hx(), hy = grid_.hy();
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                const std::size_t k00 = grid_.index(i, j), k10 = grid_.index(i + 1, j);
                const std::size_t k01 = grid_.index(i, j + 1), k11 = grid_.index(i + 1, j + 1);
                const double q = cross_[static_cast<std::size_t>(i) * ny + j];
                const double dx = (y[k10] + y[k11] - y[k00] - y[k01]) / (2.0 * hx);
                const double dy = (y[k01] + y[k11] - y[k00] - y[k10]) / (2.0 * hy);
                const double gx = q * dy / (2.0 * hx);  // q Dy dDx/dy_k magnitude
                const double gy = q * dx / (2.0 * hy);  // q Dx dDy/dy_k magnitude
                out[k00] += -gx - gy;
                out[k10] += gx - gy;
                out[k01] += -gx + gy;
                out[k11] += gx + gy;
            }
        }
    }
}

void EllipticOperator::apply(std::span<const double> y, std::span<double> out) const {
    apply_stiffness(y, out);
    const auto w = grid_.area_weights();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] /= w[k];
}

std::vector<double> apply_elliptic(const DiffusionCoefficients& coeffs, std::span<const double> slice,
                                   const Grid& grid, std::span<const double> conormal_flux) {
    if (slice.size() != grid.nodes()) throw DimensionError("apply_elliptic: slice shape mismatch");
    if (!conormal_flux.empty() && conormal_flux.size() != grid.boundary_nodes()) {
        throw DimensionError("apply_elliptic: boundary flux shape mismatch");
    }
    const EllipticOperator op(coeffs, grid);
    std::vector<double> out(grid.nodes());
    op.apply(slice, out);
    const auto bnodes = grid.boundary();
    for (std::size_t b = 0; b < conormal_flux.size(); ++b) {
        out[grid.index(bnodes[b].i, bnodes[b].j)] -= grid.boundary_lift(b) * conormal_flux[b];
    }
    return out;
}

// ---------------------------------------------------------------------------

ImplicitDiffusionSolver::ImplicitDiffusionSolver(const EllipticOperator& op, double dt,
                                                 const StepperOptions& opts)
    : op_(op), dt_(dt), opts_(opts) {
    const auto w = op.grid().area_weights();
    const auto kd = op.stiffness_diagonal();
    inv_diag_.resize(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) inv_diag_[k] = 1.0 / (w[k] + dt * kd[k]);
    r_.resize(w.size());
    z_.resize(w.size());
    d_.resize(w.size());
    q_.resize(w.size());
}

int ImplicitDiffusionSolver::solve(std::span<const double> rhs, std::span<double> y) const {
    const auto w = op_.grid().area_weights();
    const std::size_t n = w.size();
    auto apply_system = [&](std::span<const double> in, std::span<double> out) {
        op_.apply_stiffness(in, out);
        for (std::size_t k = 0; k < n; ++k) out[k] = w[k] * in[k] + dt_ * out[k];
    };

    double b_norm_sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) b_norm_sq += (w[k] * rhs[k]) * (w[k] * rhs[k]);
    if (b_norm_sq == 0.0) {
        std::fill(y.begin(), y.end(), 0.0);
        return 0;
    }
    const double stop_sq = opts_.cg_tol * opts_.cg_tol * b_norm_sq;

    apply_system(y, q_);
    double r_norm_sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        r_[k] = w[k] * rhs[k] - q_[k];
        r_norm_sq += r_[k] * r_[k];
    }
    if (r_norm_sq <= stop_sq) return 0;

    double rz = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        z_[k] = inv_diag_[k] * r_[k];
        d_[k] = z_[k];
        rz += r_[k] * z_[k];
    }
    for (int it = 1; it <= opts_.cg_max_iter; ++it) {
        apply_system(d_, q_);
        double dq = 0.0;
        for (std::size_t k = 0; k < n; ++k) dq += d_[k] * q_[k];
        if (!(dq > 0.0)) throw SolverError("conjugate gradient breakdown (non-positive curvature)");
        const double step = rz / dq;
        r_norm_sq = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            y[k] += step * d_[k];
            r_[k] -= step * q_[k];
            r_norm_sq += r_[k] * r_[k];
        }
        if (r_norm_sq <= stop_sq) return it;
        double rz_next = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            z_[k] = inv_diag_[k] * r_[k];
            rz_next += r_[k] * z_[k];
        }
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t k = 0; k < n; ++k) d_[k] = z_[k] + beta * d_[k];
    }
    std::ostringstream os;
    os << "conjugate gradient did not reach relative residual " << opts_.cg_tol << " in "
       << opts_.cg_max_iter << " iterations";
    throw SolverError(os.str());
}

// ---------------------------------------------------------------------------

namespace {

void check_shapes(const Field& u, const BoundaryField& v, const Grid& g, const char* who) {
    if (!u.matches(g) || !v.matches(g)) {
        throw DimensionError(std::string(who) + ": control shape does not match grid");
    }
}

void check_level(std::span<const double> values, int level, double threshold, const char* what) {
    for (double x : values) {
        if (!std::isfinite(x) || std::abs(x) > threshold) {
            std::ostringstream os;
            os << what << " blew up at time level " << level;
            throw BlowUpError(os.str(), level);
        }
    }
}

}  // namespace

StateSolution solve_state(const ProblemDefinition& problem, const Field& u, const BoundaryField& v,
                          const Grid& g, const StepperOptions& opts) {
    check_shapes(u, v, g, "solve_state");
    if (!all_finite(u.values()) || !all_finite(v.values())) {
        throw std::invalid_argument("solve_state: controls must be finite");
    }
    const EllipticOperator op(problem.diffusion, g);
    const ImplicitDiffusionSolver solver(op, g.dt(), opts);
    const auto bnodes = g.boundary();
    const double dt = g.dt();

    StateSolution sol{Field(g), BoundaryField(g)};
    auto y0 = sol.y.level(0);
    for (int i = 0; i <= g.nx(); ++i) {
        for (int j = 0; j <= g.ny(); ++j) y0[g.index(i, j)] = problem.y0(g.point(i, j));
    }
    check_level(y0, 0, opts.blowup_threshold, "state");

    std::vector<double> rhs(g.nodes());
    for (int n = 0; n < g.nt(); ++n) {
        const auto yn = sol.y.level(n);
        const double t = g.t(n);
        for (int i = 0; i <= g.nx(); ++i) {
            for (int j = 0; j <= g.ny(); ++j) {
                const std::size_t k = g.index(i, j);
                rhs[k] = yn[k] - dt * problem.f(g.point(i, j), t, yn[k], u(n, k));
            }
        }
        for (std::size_t b = 0; b < bnodes.size(); ++b) {
            rhs[g.index(bnodes[b].i, bnodes[b].j)] -= dt * g.boundary_lift(b) * v(n, b);
        }
        check_level(rhs, n + 1, opts.blowup_threshold / (1.0 + dt), "state");
        auto next = sol.y.level(n + 1);
        std::copy(yn.begin(), yn.end(), next.begin());
        solver.solve(rhs, next);
        check_level(next, n + 1, opts.blowup_threshold, "state");
    }
    for (int n = 0; n <= g.nt(); ++n) extract_trace(sol.y.level(n), g, sol.boundary_trace.level(n));
    return sol;
}

AdjointSolution solve_adjoint(const ProblemDefinition& problem, const StateSolution& state, const Field& u,
                              const BoundaryField& v, const Grid& g, const StepperOptions& opts) {
    check_shapes(u, v, g, "solve_adjoint");
    if (!state.y.matches(g) || !state.boundary_trace.matches(g)) {
        throw DimensionError("solve_adjoint: state does not match grid");
    }
    const EllipticOperator op(problem.diffusion, g);
    const ImplicitDiffusionSolver solver(op, g.dt(), opts);
    const auto bnodes = g.boundary();
    const double dt = g.dt();
    const int nt = g.nt();

    AdjointSolution sol{Field(g), BoundaryField(g)};
    {
        const auto yN = state.y.level(nt);
        auto pN = sol.p.level(nt);
        for (int i = 0; i <= g.nx(); ++i) {
            for (int j = 0; j <= g.ny(); ++j) {
                const std::size_t k = g.index(i, j);
                pN[k] = problem.L_y(g.point(i, j), yN[k]);
            }
        }
        check_level(pN, nt, opts.blowup_threshold, "adjoint");
    }

    std::vector<double> rhs(g.nodes());
    for (int n = nt - 1; n >= 0; --n) {
        const int m = n + 1;
        const auto pm = sol.p.level(m);
        if (m == nt) {
            std::copy(pm.begin(), pm.end(), rhs.begin());
        } else {
            const auto ym = state.y.level(m);
            const double t = g.t(m);
            for (int i = 0; i <= g.nx(); ++i) {
                for (int j = 0; j <= g.ny(); ++j) {
                    const std::size_t k = g.index(i, j);
                    const Point x = g.point(i, j);
                    rhs[k] = (1.0 - dt * problem.f_y(x, t, ym[k], u(m, k))) * pm[k] +
                             dt * problem.F_y(x, t, ym[k], u(m, k));
                }
            }
            for (std::size_t b = 0; b < bnodes.size(); ++b) {
                rhs[g.index(bnodes[b].i, bnodes[b].j)] +=
                    dt * g.boundary_lift(b) *
                    problem.G_y(bnodes[b], t, state.boundary_trace(m, b), v(m, b));
            }
        }
        check_level(rhs, n, opts.blowup_threshold, "adjoint");
        auto pn = sol.p.level(n);
        std::copy(pm.begin(), pm.end(), pn.begin());
        solver.solve(rhs, pn);
        check_level(pn, n, opts.blowup_threshold, "adjoint");
    }
    for (int n = 0; n <= nt; ++n) extract_trace(sol.p.level(n), g, sol.boundary_trace.level(n));
    return sol;
}

double uniform_bound_check(const AdjointSolution& adjoint) { return max_abs(adjoint.p.values()); }

}  // namespace amsa
