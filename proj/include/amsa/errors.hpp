#pragma once

#include <stdexcept>
#include <string>

namespace amsa {

/// Array shapes that do not match the grid they are used with.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A problem definition that fails validation (non-finite callback, bad box, ...).
class InvalidProblem : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Linear solver breakdown or non-convergence.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite or runaway state/adjoint during time marching.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(const std::string& what, int time_level)
        : std::runtime_error(what), time_level_(time_level) {}

    int time_level() const noexcept { return time_level_; }

private:
    int time_level_;
};

/// Pointwise minimizer failures (non-finite objective, invalid curvature, descent violated).
class MinimizerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite integrand while evaluating the cost functional.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace amsa
