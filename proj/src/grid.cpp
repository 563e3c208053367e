#include "amsa/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "amsa/errors.hpp"

namespace amsa {

Grid::Grid(int nx, int ny, int nt, double lx, double ly, double horizon)
    : nx_(nx), ny_(ny), nt_(nt), lx_(lx), ly_(ly), horizon_(horizon) {
    if (nx < 1 || ny < 1 || nt < 1) {
        throw std::invalid_argument("grid: interval counts must be positive");
    }
    if (!(lx > 0.0) || !(ly > 0.0) || !(horizon > 0.0) || !std::isfinite(lx) ||
        !std::isfinite(ly) || !std::isfinite(horizon)) {
        throw std::invalid_argument("grid: extents must be finite and positive");
    }
    hx_ = lx / nx;
    hy_ = ly / ny;
    dt_ = horizon / nt;

    area_weights_.assign(nodes(), 0.0);
    for (int i = 0; i <= nx_; ++i) {
        const double wx = (i == 0 || i == nx_) ? 0.5 * hx_ : hx_;
        for (int j = 0; j <= ny_; ++j) {
            const double wy = (j == 0 || j == ny_) ? 0.5 * hy_ : hy_;
            area_weights_[index(i, j)] = wx * wy;
        }
    }

    boundary_.reserve(2 * static_cast<std::size_t>(nx_ + ny_));
    const double corner_weight = 0.5 * (hx_ + hy_);
    double s = 0.0;
    auto push = [&](int i, int j, double step, bool corner) {
        boundary_.push_back({i, j, x(i), y(j), s, corner ? corner_weight : step});
        s += step;
    };
    for (int i = 0; i < nx_; ++i) push(i, 0, hx_, i == 0);
    for (int j = 0; j < ny_; ++j) push(nx_, j, hy_, j == 0);
    for (int i = nx_; i > 0; --i) push(i, ny_, hx_, i == nx_);
    for (int j = ny_; j > 0; --j) push(0, j, hy_, j == ny_);

    lift_.resize(boundary_.size());
    for (std::size_t b = 0; b < boundary_.size(); ++b) {
        lift_[b] = boundary_[b].weight / area_weights_[index(boundary_[b].i, boundary_[b].j)];
    }
}

double Grid::time_weight(int n, TimeRule rule) const noexcept {
    if (n < 0 || n > nt_) return 0.0;
    switch (rule) {
        case TimeRule::trapezoid:
            return (n == 0 || n == nt_) ? 0.5 * dt_ : dt_;
        case TimeRule::left_endpoint:
            return n == nt_ ? 0.0 : dt_;
    }
    return 0.0;
}

Field::Field(const Grid& g, double value)
    : levels_(g.levels()), nodes_(g.nodes()), data_(levels_ * nodes_, value) {}

BoundaryField::BoundaryField(const Grid& g, double value)
    : levels_(g.levels()), nodes_(g.boundary_nodes()), data_(levels_ * nodes_, value) {}

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw DimensionError(what);
}

}  // namespace

double inner_product_omega(std::span<const double> a, std::span<const double> b, const Grid& g) {
    require(a.size() == g.nodes() && b.size() == g.nodes(), "inner_product_omega: slice shape mismatch");
    const auto w = g.area_weights();
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sum += w[k] * (a[k] * b[k]);
    return sum;
}

double inner_product_omega_t(const Field& a, const Field& b, const Grid& g, TimeRule rule) {
    require(a.matches(g) && b.matches(g), "inner_product_omega_t: field shape mismatch");
    double sum = 0.0;
    for (int n = 0; n <= g.nt(); ++n) {
        const double wt = g.time_weight(n, rule);
        if (wt == 0.0) continue;
        sum += wt * inner_product_omega(a.level(n), b.level(n), g);
    }
    return sum;
}

double inner_product_sigma_t(const BoundaryField& a, const BoundaryField& b, const Grid& g,
                             TimeRule rule) {
    require(a.matches(g) && b.matches(g), "inner_product_sigma_t: boundary field shape mismatch");
    const auto bnodes = g.boundary();
    double sum = 0.0;
    for (int n = 0; n <= g.nt(); ++n) {
        const double wt = g.time_weight(n, rule);
        if (wt == 0.0) continue;
        double level_sum = 0.0;
        for (std::size_t k = 0; k < bnodes.size(); ++k) {
            level_sum += bnodes[k].weight * (a(n, k) * b(n, k));
        }
        sum += wt * level_sum;
    }
    return sum;
}

double norm_l2_omega_final(std::span<const double> slice, const Grid& g) {
    require(slice.size() == g.nodes(), "norm_l2_omega_final: slice shape mismatch");
    return std::sqrt(inner_product_omega(slice, slice, g));
}

double norm_sq_omega_t(const Field& a, const Grid& g, TimeRule rule) {
    return inner_product_omega_t(a, a, g, rule);
}

double norm_sq_sigma_t(const BoundaryField& a, const Grid& g, TimeRule rule) {
    return inner_product_sigma_t(a, a, g, rule);
}

void extract_trace(std::span<const double> slice, const Grid& g, std::span<double> out) {
    require(slice.size() == g.nodes() && out.size() == g.boundary_nodes(),
            "extract_trace: shape mismatch");
    const auto bnodes = g.boundary();
    for (std::size_t k = 0; k < bnodes.size(); ++k) out[k] = slice[g.index(bnodes[k].i, bnodes[k].j)];
}

Field difference(const Field& a, const Field& b) {
    require(a.levels() == b.levels() && a.nodes() == b.nodes(), "difference: field shape mismatch");
    Field out = a;
    auto o = out.values();
    const auto bv = b.values();
    for (std::size_t k = 0; k < o.size(); ++k) o[k] -= bv[k];
    return out;
}

BoundaryField difference(const BoundaryField& a, const BoundaryField& b) {
    require(a.levels() == b.levels() && a.nodes() == b.nodes(), "difference: boundary shape mismatch");
    BoundaryField out = a;
    auto o = out.values();
    const auto bv = b.values();
    for (std::size_t k = 0; k < o.size(); ++k) o[k] -= bv[k];
    return out;
}

double max_abs(std::span<const double> values) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace amsa
