#pragma once

#include <functional>

#include "amsa/problem.hpp"

namespace amsa {

/// Inner gradient-descent settings. Defaults follow the experiment's schedule: the
/// learning rate starts at 1e-3 and is multiplied by 0.9 every 100 iterations.
struct MinimizerConfig {
    double initial_lr = 1e-3;
    double decay = 0.9;
    int decay_every = 100;
    int max_inner_iters = 10000;
    double grad_tol = 1e-8;

    void validate() const;  ///< throws std::invalid_argument
};

/// Proximal penalty rho (anchor - control)^2 tying a control to the previous iterate.
struct AugmentationParams {
    double rho = 0.0;
    double anchor = 0.0;
};

/// H_Omega = F - p f.
double h_omega(const ProblemDefinition& problem, const Point& x, double t, double y, double u, double p);

/// H_Sigma = G - p v.
double h_sigma(const ProblemDefinition& problem, const BoundaryNode& s, double t, double y, double v,
               double p);

double h_omega_aug(const ProblemDefinition& problem, const Point& x, double t, double y, double u,
                   double p, const AugmentationParams& aug);

double h_sigma_aug(const ProblemDefinition& problem, const BoundaryNode& s, double t, double y,
                   double v, double p, const AugmentationParams& aug);

struct MinimizerResult {
    double argmin = 0.0;
    double value = 0.0;
    int iterations = 0;   ///< summed over all starts
    bool converged = false;  ///< the chosen candidate met grad_tol
};

/// Projected gradient descent on a scalar objective over `box`.
///
/// The gradient is a central difference with step 1e-6 (1 + |u|), one-sided at a finite
/// box face. Descent starts from `start` and, on a bounded box, also from both faces and
/// the midpoint; `start` itself is always a candidate. The lowest objective wins and
/// ties go to the candidate nearest `start`, so the result never has a larger objective
/// than `start`. Each run stops once |u - P(u - g(u))| <= grad_tol or after
/// max_inner_iters steps.
MinimizerResult minimize_pointwise_detailed(const std::function<double(double)>& objective,
                                            const Interval& box, const MinimizerConfig& cfg,
                                            double start);

double minimize_pointwise(const std::function<double(double)>& objective, const Interval& box,
                          const MinimizerConfig& cfg, double start);

/// Exact minimizer of (alpha/2) u^2 + p u + rho (anchor - u)^2 over `box`:
/// P_box((2 rho anchor - p) / (alpha + 2 rho)). Throws MinimizerError when
/// alpha + 2 rho <= 0.
double minimize_quadratic_closed_form(double alpha, double p, const AugmentationParams& aug,
                                      const Interval& box);

}  // namespace amsa
