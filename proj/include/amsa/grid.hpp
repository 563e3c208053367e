#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace amsa {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// A node on the rectangle's edge; `s` is the arclength from the south-west corner
/// measured along the traversal order.
struct BoundaryNode {
    int i = 0;
    int j = 0;
    double x = 0.0;
    double y = 0.0;
    double s = 0.0;
    double weight = 0.0;  ///< arclength quadrature weight
};

/// Time quadrature used for space-time integrals.
///
/// `trapezoid` treats a field as piecewise linear in time. `left_endpoint` treats it as
/// piecewise constant on each step [t_n, t_{n+1}) with the value stored at t_n; the
/// final level carries zero weight. Controls are piecewise constant in time, so every
/// pairing that involves a control uses `left_endpoint`.
enum class TimeRule { trapezoid, left_endpoint };

/// Uniform space-time discretization of [0,Lx] x [0,Ly] x [0,T].
///
/// `nx`, `ny` and `nt` count intervals, so a spatial slice has (nx+1)(ny+1) nodes and a
/// trajectory has nt+1 time levels. Spatial node (i, j) is stored at i*(ny+1) + j.
///
/// Boundary nodes are traversed counter-clockwise: south edge west to east, east edge
/// south to north, north edge east to west, west edge north to south. Each corner appears
/// once, as the first node of the edge that starts there, so there are 2(nx+ny) of them.
/// A corner's arclength weight is (hx+hy)/2, half from each adjacent edge.
class Grid {
public:
    Grid(int nx, int ny, int nt, double lx, double ly, double horizon);

    /// Unit square, horizon T.
    static Grid unit(int nx, int ny, int nt, double horizon = 1.0) {
        return Grid(nx, ny, nt, 1.0, 1.0, horizon);
    }

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    int nt() const noexcept { return nt_; }
    double lx() const noexcept { return lx_; }
    double ly() const noexcept { return ly_; }
    double horizon() const noexcept { return horizon_; }
    double hx() const noexcept { return hx_; }
    double hy() const noexcept { return hy_; }
    double dt() const noexcept { return dt_; }

    std::size_t nodes() const noexcept { return static_cast<std::size_t>(nx_ + 1) * (ny_ + 1); }
    std::size_t boundary_nodes() const noexcept { return boundary_.size(); }
    std::size_t levels() const noexcept { return static_cast<std::size_t>(nt_) + 1; }

    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(i) * (ny_ + 1) + static_cast<std::size_t>(j);
    }

    double x(int i) const noexcept { return i * hx_; }
    double y(int j) const noexcept { return j * hy_; }
    double t(int n) const noexcept { return n * dt_; }
    Point point(int i, int j) const noexcept { return {x(i), y(j)}; }

    /// Trapezoidal area weight of spatial node k.
    double area_weight(std::size_t k) const noexcept { return area_weights_[k]; }
    std::span<const double> area_weights() const noexcept { return area_weights_; }

    std::span<const BoundaryNode> boundary() const noexcept { return boundary_; }

    double time_weight(int n, TimeRule rule) const noexcept;

    /// Arclength weight divided by area weight of the owning node; lifts boundary data to
    /// the nodal right-hand side of a conormal (Neumann) condition.
    double boundary_lift(std::size_t b) const noexcept { return lift_[b]; }

    bool operator==(const Grid& other) const noexcept {
        return nx_ == other.nx_ && ny_ == other.ny_ && nt_ == other.nt_ && lx_ == other.lx_ &&
               ly_ == other.ly_ && horizon_ == other.horizon_;
    }

private:
    int nx_, ny_, nt_;
    double lx_, ly_, horizon_;
    double hx_, hy_, dt_;
    std::vector<double> area_weights_;
    std::vector<BoundaryNode> boundary_;
    std::vector<double> lift_;
};

/// Discrete function on the space-time nodes, shape (nt+1, nx+1, ny+1).
class Field {
public:
    Field() = default;
    explicit Field(const Grid& g, double value = 0.0);

    std::size_t levels() const noexcept { return levels_; }
    std::size_t nodes() const noexcept { return nodes_; }

    double& operator()(std::size_t n, std::size_t k) noexcept { return data_[n * nodes_ + k]; }
    double operator()(std::size_t n, std::size_t k) const noexcept { return data_[n * nodes_ + k]; }

    std::span<double> level(std::size_t n) noexcept { return {data_.data() + n * nodes_, nodes_}; }
    std::span<const double> level(std::size_t n) const noexcept {
        return {data_.data() + n * nodes_, nodes_};
    }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    bool matches(const Grid& g) const noexcept { return levels_ == g.levels() && nodes_ == g.nodes(); }

    bool operator==(const Field&) const = default;

private:
    std::size_t levels_ = 0;
    std::size_t nodes_ = 0;
    std::vector<double> data_;
};

/// Discrete function on the lateral boundary nodes, shape (nt+1, 2(nx+ny)).
class BoundaryField {
public:
    BoundaryField() = default;
    explicit BoundaryField(const Grid& g, double value = 0.0);

    std::size_t levels() const noexcept { return levels_; }
    std::size_t nodes() const noexcept { return nodes_; }

    double& operator()(std::size_t n, std::size_t b) noexcept { return data_[n * nodes_ + b]; }
    double operator()(std::size_t n, std::size_t b) const noexcept { return data_[n * nodes_ + b]; }

    std::span<double> level(std::size_t n) noexcept { return {data_.data() + n * nodes_, nodes_}; }
    std::span<const double> level(std::size_t n) const noexcept {
        return {data_.data() + n * nodes_, nodes_};
    }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    bool matches(const Grid& g) const noexcept {
        return levels_ == g.levels() && nodes_ == g.boundary_nodes();
    }

    bool operator==(const BoundaryField&) const = default;

private:
    std::size_t levels_ = 0;
    std::size_t nodes_ = 0;
    std::vector<double> data_;
};

double inner_product_omega_t(const Field& a, const Field& b, const Grid& g,
                             TimeRule rule = TimeRule::trapezoid);

double inner_product_sigma_t(const BoundaryField& a, const BoundaryField& b, const Grid& g,
                             TimeRule rule = TimeRule::trapezoid);

/// Spatial L2(Omega) inner product of two slices.
double inner_product_omega(std::span<const double> a, std::span<const double> b, const Grid& g);

/// sqrt of the spatial quadrature of a^2.
double norm_l2_omega_final(std::span<const double> slice, const Grid& g);

double norm_sq_omega_t(const Field& a, const Grid& g, TimeRule rule = TimeRule::trapezoid);
double norm_sq_sigma_t(const BoundaryField& a, const Grid& g, TimeRule rule = TimeRule::trapezoid);

/// Copies the edge values of a spatial slice into boundary order.
void extract_trace(std::span<const double> slice, const Grid& g, std::span<double> out);

Field difference(const Field& a, const Field& b);
BoundaryField difference(const BoundaryField& a, const BoundaryField& b);

double max_abs(std::span<const double> values);
bool all_finite(std::span<const double> values);

}  // namespace amsa
