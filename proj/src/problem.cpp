#include "amsa/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "amsa/errors.hpp"

namespace amsa {

bool Interval::bounded() const noexcept { return std::isfinite(lo) && std::isfinite(hi); }

double project_control(double value, const Interval& box) {
    if (value < box.lo) return box.lo;
    if (value > box.hi) return box.hi;
    return value;
}

DiffusionCoefficients DiffusionCoefficients::identity(double scale) {
    DiffusionCoefficients d;
    d.a11 = [scale](const Point&) { return scale; };
    d.a22 = [scale](const Point&) { return scale; };
    d.ellipticity = scale;
    return d;
}

ProblemDefinition builtin_paper_test(double alpha, double horizon) {
    using std::numbers::pi;
    ProblemDefinition p;
    p.name = "reference";
    p.horizon = horizon;

    const double target_scale = std::exp(-2.0 * alpha * pi * horizon);
    auto y_d = [target_scale](const Point& x) {
        return target_scale * std::sin(pi * x.x) * std::sin(pi * x.y);
    };

    // y_t - Lap y = u + y  <=>  y_t + A y + f = 0 with f = -(u + y)
    p.f = [](const Point&, double, double y, double u) { return -(u + y); };
    p.f_y = [](const Point&, double, double, double) { return -1.0; };
    p.f_yy = [](const Point&, double, double, double) { return 0.0; };
    p.f_u = [](const Point&, double, double, double) { return -1.0; };

    p.F = [alpha](const Point&, double, double, double u) { return 0.5 * alpha * u * u; };
    p.F_y = [](const Point&, double, double, double) { return 0.0; };
    p.F_yy = [](const Point&, double, double, double) { return 0.0; };
    p.F_u = [alpha](const Point&, double, double, double u) { return alpha * u; };

    p.G = [](const BoundaryNode&, double, double, double) { return 0.0; };
    p.G_y = p.G;
    p.G_yy = p.G;
    p.G_v = p.G;

    p.L = [y_d](const Point& x, double y) {
        const double d = y - y_d(x);
        return 0.5 * d * d;
    };
    p.L_y = [y_d](const Point& x, double y) { return y - y_d(x); };
    p.L_yy = [](const Point&, double) { return 1.0; };

    p.u_box = Interval::unbounded();
    p.v_box = Interval::singleton(0.0);
    p.y0 = [](const Point& x) { return std::sin(pi * x.x) * std::sin(pi * x.y); };
    p.diffusion = DiffusionCoefficients::identity();

    p.distributed_quadratic = QuadraticControl{alpha, -1.0};
    p.boundary_quadratic = QuadraticControl{0.0, 1.0};
    return p;
}

ProblemDefinition builtin_semilinear_test(double horizon) {
    using std::numbers::pi;
    constexpr double alpha = 0.5;
    constexpr double kappa = 0.5;
    constexpr double beta = 1.0;
    constexpr double gamma = 0.2;

    ProblemDefinition p;
    p.name = "semilinear";
    p.horizon = horizon;

    p.f = [](const Point&, double, double y, double u) { return 0.5 * y + y * y * y / 3.0 - u; };
    p.f_y = [](const Point&, double, double y, double) { return 0.5 + y * y; };
    p.f_yy = [](const Point&, double, double y, double) { return 2.0 * y; };
    p.f_u = [](const Point&, double, double, double) { return -1.0; };

    auto z = [](const Point& x, double t) { return 0.3 * std::cos(pi * t) * x.x; };
    p.F = [z](const Point& x, double t, double y, double u) {
        const double d = y - z(x, t);
        return 0.5 * alpha * u * u + 0.5 * kappa * d * d;
    };
    p.F_y = [z](const Point& x, double t, double y, double) { return kappa * (y - z(x, t)); };
    p.F_yy = [](const Point&, double, double, double) { return kappa; };
    p.F_u = [](const Point&, double, double, double u) { return alpha * u; };

    p.G = [](const BoundaryNode&, double, double y, double v) {
        return 0.5 * beta * v * v + 0.5 * gamma * y * y;
    };
    p.G_y = [](const BoundaryNode&, double, double y, double) { return gamma * y; };
    p.G_yy = [](const BoundaryNode&, double, double, double) { return gamma; };
    p.G_v = [](const BoundaryNode&, double, double, double v) { return beta * v; };

    auto target = [](const Point& x) { return 0.5 * std::cos(pi * x.x) * std::cos(pi * x.y); };
    p.L = [target](const Point& x, double y) {
        const double d = y - target(x);
        return 0.5 * d * d;
    };
    p.L_y = [target](const Point& x, double y) { return y - target(x); };
    p.L_yy = [](const Point&, double) { return 1.0; };

    p.u_box = {-1.5, 1.5};
    p.v_box = {-1.0, 1.0};
    p.y0 = [](const Point& x) { return 0.2 + 0.3 * std::sin(pi * x.x) * x.y; };

    p.diffusion.a11 = [](const Point& x) { return 1.0 + 0.2 * x.x; };
    p.diffusion.a22 = [](const Point& x) { return 1.0 + 0.1 * x.y; };
    p.diffusion.a12 = [](const Point&) { return 0.25; };
    p.diffusion.ellipticity = 0.7;

    p.distributed_quadratic = QuadraticControl{alpha, -1.0};
    p.boundary_quadratic = QuadraticControl{beta, 1.0};
    return p;
}

std::vector<std::string> builtin_problem_names() { return {"reference", "semilinear"}; }

ProblemDefinition builtin_problem(const std::string& name) {
    if (name == "reference") return builtin_paper_test();
    if (name == "semilinear") return builtin_semilinear_test();
    throw InvalidProblem("unknown built-in problem '" + name + "'");
}

// ---------------------------------------------------------------------------
// validation

bool ValidationReport::ok() const {
    auto consistent = [](const DerivativeCheck& c) { return c.consistent; };
    return std::all_of(first_derivatives.begin(), first_derivatives.end(), consistent) &&
           std::all_of(second_derivatives.begin(), second_derivatives.end(), consistent) &&
           symmetric_diffusion && boxes_nonempty && elliptic;
}

namespace {

std::vector<double> linspace(double a, double b, int n) {
    if (n <= 1 || a == b) return {a};
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) out[k] = a + (b - a) * k / (n - 1);
    return out;
}

std::vector<double> control_samples(const Interval& box, const LatticeOptions& o) {
    if (box.degenerate()) return {box.lo};
    double lo = box.lo, hi = box.hi;
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
        lo = -o.control_extent;
        hi = o.control_extent;
    } else if (!std::isfinite(lo)) {
        lo = hi - 2.0 * o.control_extent;
    } else if (!std::isfinite(hi)) {
        hi = lo + 2.0 * o.control_extent;
    }
    return linspace(lo, hi, o.control_samples);
}

[[noreturn]] void non_finite(const std::string& callback, const std::string& where) {
    throw InvalidProblem("callback " + callback + " returned a non-finite value at " + where);
}

std::string describe(double x, double y, double t, double state, double control) {
    std::ostringstream os;
    os << "(x=" << x << ", y=" << y << ", t=" << t << ", state=" << state
       << ", control=" << control << ")";
    return os.str();
}

double checked(double value, const std::string& callback, const std::string& where) {
    if (!std::isfinite(value)) non_finite(callback, where);
    return value;
}

double fd_step(double at) { return 1e-5 * (1.0 + std::abs(at)); }

/// Tracks one derivative against a central difference of its primitive.
struct Tracker {
    DerivativeCheck check;
    double tol;

    void sample(double derivative, double fd) {
        check.max_abs = std::max(check.max_abs, std::abs(derivative));
        const double err = std::abs(derivative - fd) / (1.0 + std::abs(derivative));
        check.max_error = std::max(check.max_error, err);
        if (err > tol) check.consistent = false;
    }
};

void require_callback(bool present, const char* name) {
    if (!present) throw InvalidProblem(std::string("missing required callback ") + name);
}

}  // namespace

ValidationReport validate(const ProblemDefinition& p, const LatticeOptions& o) {
    require_callback(bool(p.f), "f");
    require_callback(bool(p.f_y), "f_y");
    require_callback(bool(p.F), "F");
    require_callback(bool(p.F_y), "F_y");
    require_callback(bool(p.G), "G");
    require_callback(bool(p.G_y), "G_y");
    require_callback(bool(p.L), "L");
    require_callback(bool(p.L_y), "L_y");
    require_callback(bool(p.y0), "y0");
    require_callback(bool(p.diffusion.a11), "a11");
    require_callback(bool(p.diffusion.a22), "a22");

    ValidationReport report;
    auto nonempty = [](const Interval& b) { return !std::isnan(b.lo) && !std::isnan(b.hi) && b.lo <= b.hi; };
    report.boxes_nonempty = nonempty(p.u_box) && nonempty(p.v_box);
    if (!report.boxes_nonempty) throw InvalidProblem("admissible control box is empty");

    const auto xs = linspace(0.0, p.lx, o.space_samples);
    const auto ys = linspace(0.0, p.ly, o.space_samples);
    const auto ts = linspace(0.0, p.horizon, o.time_samples);
    const auto states = linspace(o.state_min, o.state_max, o.state_samples);
    const auto us = control_samples(p.u_box, o);
    const auto vs = control_samples(p.v_box, o);

    Tracker f_y{{"f_y"}, o.consistency_tol}, F_y{{"F_y"}, o.consistency_tol};
    Tracker G_y{{"G_y"}, o.consistency_tol}, L_y{{"L_y"}, o.consistency_tol};
    Tracker f_u{{"f_u"}, o.consistency_tol}, F_u{{"F_u"}, o.consistency_tol};
    Tracker G_v{{"G_v"}, o.consistency_tol};
    Tracker f_yy{{"f_yy"}, o.consistency_tol}, F_yy{{"F_yy"}, o.consistency_tol};
    Tracker G_yy{{"G_yy"}, o.consistency_tol}, L_yy{{"L_yy"}, o.consistency_tol};

    double min_ellipticity = std::numeric_limits<double>::infinity();
    for (double x : xs) {
        for (double y : ys) {
            const Point pt{x, y};
            std::ostringstream where;
            where << "(x=" << x << ", y=" << y << ")";
            checked(p.y0(pt), "y0", where.str());
            const double a11 = checked(p.diffusion.a11(pt), "a11", where.str());
            const double a22 = checked(p.diffusion.a22(pt), "a22", where.str());
            const double a12 = p.diffusion.a12 ? checked(p.diffusion.a12(pt), "a12", where.str()) : 0.0;
            for (int k = 0; k < 16; ++k) {
                const double th = std::numbers::pi * k / 16.0;
                const double c = std::cos(th), s = std::sin(th);
                min_ellipticity = std::min(min_ellipticity, a11 * c * c + 2.0 * a12 * c * s + a22 * s * s);
            }

            for (double state : states) {
                const std::string w = describe(x, y, p.horizon, state, 0.0);
                checked(p.L(pt, state), "L", w);
                const double h = fd_step(state);
                const double dL = checked(p.L_y(pt, state), "L_y", w);
                L_y.sample(dL, (p.L(pt, state + h) - p.L(pt, state - h)) / (2 * h));
                if (p.L_yy) {
                    L_yy.sample(checked(p.L_yy(pt, state), "L_yy", w),
                                (p.L_y(pt, state + h) - p.L_y(pt, state - h)) / (2 * h));
                }
                for (double t : ts) {
                    for (double u : us) {
                        const std::string wu = describe(x, y, t, state, u);
                        checked(p.f(pt, t, state, u), "f", wu);
                        checked(p.F(pt, t, state, u), "F", wu);
                        f_y.sample(checked(p.f_y(pt, t, state, u), "f_y", wu),
                                   (p.f(pt, t, state + h, u) - p.f(pt, t, state - h, u)) / (2 * h));
                        F_y.sample(checked(p.F_y(pt, t, state, u), "F_y", wu),
                                   (p.F(pt, t, state + h, u) - p.F(pt, t, state - h, u)) / (2 * h));
                        if (p.f_yy) {
                            f_yy.sample(checked(p.f_yy(pt, t, state, u), "f_yy", wu),
                                        (p.f_y(pt, t, state + h, u) - p.f_y(pt, t, state - h, u)) / (2 * h));
                        }
                        if (p.F_yy) {
                            F_yy.sample(checked(p.F_yy(pt, t, state, u), "F_yy", wu),
                                        (p.F_y(pt, t, state + h, u) - p.F_y(pt, t, state - h, u)) / (2 * h));
                        }
                        const double hu = fd_step(u);
                        if (p.f_u) {
                            f_u.sample(checked(p.f_u(pt, t, state, u), "f_u", wu),
                                       (p.f(pt, t, state, u + hu) - p.f(pt, t, state, u - hu)) / (2 * hu));
                        }
                        if (p.F_u) {
                            F_u.sample(checked(p.F_u(pt, t, state, u), "F_u", wu),
                                       (p.F(pt, t, state, u + hu) - p.F(pt, t, state, u - hu)) / (2 * hu));
                        }
                    }
                }
            }
        }
    }

    const Grid lattice(std::max(1, o.space_samples - 1), std::max(1, o.space_samples - 1), 1, p.lx, p.ly,
                       p.horizon);
    for (const BoundaryNode& bn : lattice.boundary()) {
        for (double t : ts) {
            for (double state : states) {
                const double h = fd_step(state);
                for (double v : vs) {
                    const std::string w = describe(bn.x, bn.y, t, state, v);
                    checked(p.G(bn, t, state, v), "G", w);
                    G_y.sample(checked(p.G_y(bn, t, state, v), "G_y", w),
                               (p.G(bn, t, state + h, v) - p.G(bn, t, state - h, v)) / (2 * h));
                    if (p.G_yy) {
                        G_yy.sample(checked(p.G_yy(bn, t, state, v), "G_yy", w),
                                    (p.G_y(bn, t, state + h, v) - p.G_y(bn, t, state - h, v)) / (2 * h));
                    }
                    if (p.G_v) {
                        const double hv = fd_step(v);
                        G_v.sample(checked(p.G_v(bn, t, state, v), "G_v", w),
                                   (p.G(bn, t, state, v + hv) - p.G(bn, t, state, v - hv)) / (2 * hv));
                    }
                }
            }
        }
    }

    report.first_derivatives = {f_y.check, F_y.check, G_y.check, L_y.check};
    if (p.f_u) report.first_derivatives.push_back(f_u.check);
    if (p.F_u) report.first_derivatives.push_back(F_u.check);
    if (p.G_v) report.first_derivatives.push_back(G_v.check);
    if (p.f_yy) report.second_derivatives.push_back(f_yy.check);
    if (p.F_yy) report.second_derivatives.push_back(F_yy.check);
    if (p.G_yy) report.second_derivatives.push_back(G_yy.check);
    if (p.L_yy) report.second_derivatives.push_back(L_yy.check);

    report.min_ellipticity = min_ellipticity;
    report.symmetric_diffusion = true;  // a12 is stored once and used for both off-diagonal entries
    report.elliptic = p.diffusion.ellipticity > 0.0 &&
                      min_ellipticity >= p.diffusion.ellipticity * (1.0 - 1e-12);
    return report;
}

}  // namespace amsa
