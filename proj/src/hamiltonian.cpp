#include "amsa/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "amsa/errors.hpp"

namespace amsa {

void MinimizerConfig::validate() const {
    if (!(initial_lr > 0.0)) throw std::invalid_argument("minimizer: initial_lr must be positive");
    if (!(decay > 0.0 && decay < 1.0)) throw std::invalid_argument("minimizer: decay must lie in (0,1)");
    if (decay_every < 1) throw std::invalid_argument("minimizer: decay_every must be >= 1");
    if (max_inner_iters < 1) throw std::invalid_argument("minimizer: max_inner_iters must be >= 1");
    if (!(grad_tol > 0.0)) throw std::invalid_argument("minimizer: grad_tol must be positive");
}

double h_omega(const ProblemDefinition& problem, const Point& x, double t, double y, double u, double p) {
    return problem.F(x, t, y, u) - p * problem.f(x, t, y, u);
}

double h_sigma(const ProblemDefinition& problem, const BoundaryNode& s, double t, double y, double v,
               double p) {
    return problem.G(s, t, y, v) - p * v;
}

double h_omega_aug(const ProblemDefinition& problem, const Point& x, double t, double y, double u,
                   double p, const AugmentationParams& aug) {
    const double d = aug.anchor - u;
    return h_omega(problem, x, t, y, u, p) + aug.rho * d * d;
}

double h_sigma_aug(const ProblemDefinition& problem, const BoundaryNode& s, double t, double y,
                   double v, double p, const AugmentationParams& aug) {
    const double d = aug.anchor - v;
    return h_sigma(problem, s, t, y, v, p) + aug.rho * d * d;
}

namespace {

double evaluate(const std::function<double(double)>& objective, double u) {
    const double value = objective(u);
    if (!std::isfinite(value)) {
        throw MinimizerError("objective returned a non-finite value at u = " + std::to_string(u));
    }
    return value;
}

double fd_gradient(const std::function<double(double)>& objective, const Interval& box, double u) {
    const double h = 1e-6 * (1.0 + std::abs(u));
    const bool room_below = u - h >= box.lo;
    const bool room_above = u + h <= box.hi;
    if (room_below && room_above) return (evaluate(objective, u + h) - evaluate(objective, u - h)) / (2.0 * h);
    if (room_above) return (evaluate(objective, u + h) - evaluate(objective, u)) / h;
    if (room_below) return (evaluate(objective, u) - evaluate(objective, u - h)) / h;
    return 0.0;  // box narrower than the difference step
}

struct Descent {
    double u;
    int iterations;
    bool converged;
};

Descent descend(const std::function<double(double)>& objective, const Interval& box,
                const MinimizerConfig& cfg, double u) {
    u = project_control(u, box);
    double lr = cfg.initial_lr;
    for (int it = 0; it < cfg.max_inner_iters; ++it) {
        if (it > 0 && it % cfg.decay_every == 0) lr *= cfg.decay;
        const double g = fd_gradient(objective, box, u);
        if (std::abs(u - project_control(u - g, box)) <= cfg.grad_tol) return {u, it, true};
        u = project_control(u - lr * g, box);
        if (!std::isfinite(u)) throw MinimizerError("gradient descent produced a non-finite iterate");
    }
    const double g = fd_gradient(objective, box, u);
    return {u, cfg.max_inner_iters, std::abs(u - project_control(u - g, box)) <= cfg.grad_tol};
}

}  // namespace

MinimizerResult minimize_pointwise_detailed(const std::function<double(double)>& objective,
                                            const Interval& box, const MinimizerConfig& cfg,
                                            double start) {
    cfg.validate();
    if (box.degenerate()) return {box.lo, evaluate(objective, box.lo), 0, true};

    const double anchor = project_control(start, box);
    std::vector<double> starts{anchor};
    if (box.bounded()) {
        starts.push_back(box.lo);
        starts.push_back(box.hi);
        starts.push_back(0.5 * (box.lo + box.hi));
    }

    MinimizerResult best{anchor, evaluate(objective, anchor), 0, false};
    int total = 0;
    for (double s : starts) {
        const Descent d = descend(objective, box, cfg, s);
        total += d.iterations;
        const double value = evaluate(objective, d.u);
        const double scale = 1e-14 * (1.0 + std::abs(best.value));
        const bool better = value < best.value - scale;
        const bool tie = std::abs(value - best.value) <= scale;
        if (better || (tie && std::abs(d.u - anchor) < std::abs(best.argmin - anchor)) ||
            (tie && d.u == best.argmin && d.converged)) {
            best = {d.u, value, 0, d.converged};
        }
    }
    best.iterations = total;
    return best;
}

double minimize_pointwise(const std::function<double(double)>& objective, const Interval& box,
                          const MinimizerConfig& cfg, double start) {
    return minimize_pointwise_detailed(objective, box, cfg, start).argmin;
}

double minimize_quadratic_closed_form(double alpha, double p, const AugmentationParams& aug,
                                      const Interval& box) {
    const double curvature = alpha + 2.0 * aug.rho;
    if (!(curvature > 0.0)) {
        throw MinimizerError("closed-form minimizer needs alpha + 2 rho > 0");
    }
    return project_control((2.0 * aug.rho * aug.anchor - p) / curvature, box);
}

}  // namespace amsa
