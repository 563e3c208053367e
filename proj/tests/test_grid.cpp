#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "amsa/errors.hpp"
#include "amsa/grid.hpp"

using namespace amsa;
using std::numbers::pi;

namespace {

template <class Fn>
Field sample(const Grid& g, Fn fn) {
    Field out(g);
    for (int n = 0; n <= g.nt(); ++n)
        for (int i = 0; i <= g.nx(); ++i)
            for (int j = 0; j <= g.ny(); ++j) out(n, g.index(i, j)) = fn(g.x(i), g.y(j), g.t(n));
    return out;
}

template <class Fn>
BoundaryField sample_boundary(const Grid& g, Fn fn) {
    BoundaryField out(g);
    const auto nodes = g.boundary();
    for (int n = 0; n <= g.nt(); ++n)
        for (std::size_t b = 0; b < nodes.size(); ++b) out(n, b) = fn(nodes[b], g.t(n));
    return out;
}

}  // namespace

TEST(Grid, StepsSpanTheDomain) {
    const Grid g(30, 7, 13, 2.5, 0.3, 1.7);
    EXPECT_NEAR(g.nx() * g.hx(), 2.5, 2.5 * 1e-12);
    EXPECT_NEAR(g.ny() * g.hy(), 0.3, 0.3 * 1e-12);
    EXPECT_NEAR(g.nt() * g.dt(), 1.7, 1.7 * 1e-12);
    EXPECT_GT(g.hx(), 0.0);
    EXPECT_GT(g.hy(), 0.0);
    EXPECT_GT(g.dt(), 0.0);
}

TEST(Grid, RejectsNonPositiveSizes) {
    EXPECT_THROW(Grid(0, 4, 4, 1, 1, 1), std::invalid_argument);
    EXPECT_THROW(Grid(4, -1, 4, 1, 1, 1), std::invalid_argument);
    EXPECT_THROW(Grid(4, 4, 0, 1, 1, 1), std::invalid_argument);
    EXPECT_THROW(Grid(4, 4, 4, 0.0, 1, 1), std::invalid_argument);
    EXPECT_THROW(Grid(4, 4, 4, 1, 1, -1.0), std::invalid_argument);
}

TEST(Grid, FieldShapes) {
    const Grid g(5, 3, 4, 1, 1, 1);
    const Field f(g);
    EXPECT_EQ(f.levels(), 5u);
    EXPECT_EQ(f.nodes(), 6u * 4u);
    const BoundaryField b(g);
    EXPECT_EQ(b.levels(), 5u);
    EXPECT_EQ(b.nodes(), 2u * (5 + 3));
}

TEST(Grid, BoundaryTraversalIsCounterClockwise) {
    const Grid g(3, 2, 1, 3.0, 2.0, 1.0);
    const auto b = g.boundary();
    ASSERT_EQ(b.size(), 10u);
    const int expected[10][2] = {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {3, 1}, {3, 2}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
    for (int k = 0; k < 10; ++k) {
        EXPECT_EQ(b[k].i, expected[k][0]) << k;
        EXPECT_EQ(b[k].j, expected[k][1]) << k;
        EXPECT_DOUBLE_EQ(b[k].s, static_cast<double>(k));
    }
    EXPECT_DOUBLE_EQ(b[0].weight, 1.0);  // corner: (hx + hy) / 2
    EXPECT_DOUBLE_EQ(b[1].weight, 1.0);
    double perimeter = 0.0;
    for (const auto& node : b) perimeter += node.weight;
    EXPECT_NEAR(perimeter, 10.0, 1e-12);
}

TEST(InnerProductOmegaT, UnitCylinderMeasure) {
    const Grid g = Grid::unit(10, 10, 5);
    const Field one(g, 1.0);
    EXPECT_NEAR(inner_product_omega_t(one, one, g), 1.0, 1e-12);
}

TEST(InnerProductOmegaT, ZeroAnnihilates) {
    const Grid g = Grid::unit(8, 6, 4);
    const Field zero(g);
    const Field b = sample(g, [](double x, double y, double t) { return 3 + x * y - t; });
    EXPECT_EQ(inner_product_omega_t(zero, b, g), 0.0);
}

TEST(InnerProductOmegaT, SecondMomentOfX) {
    const Grid g = Grid::unit(100, 100, 25);
    const Field a = sample(g, [](double x, double, double) { return x; });
    const double h = g.hx();
    EXPECT_NEAR(inner_product_omega_t(a, a, g), 1.0 / 3.0, h * h);
}

TEST(InnerProductOmegaT, ShapeMismatchThrows) {
    const Grid g = Grid::unit(4, 4, 4);
    const Grid other = Grid::unit(5, 4, 4);
    EXPECT_THROW(inner_product_omega_t(Field(g), Field(other), g), DimensionError);
    EXPECT_THROW(inner_product_sigma_t(BoundaryField(g), BoundaryField(other), g), DimensionError);
}

TEST(InnerProductSigmaT, PerimeterTimesHorizon) {
    const Grid g = Grid::unit(12, 9, 7);
    const BoundaryField one(g, 1.0);
    EXPECT_NEAR(inner_product_sigma_t(one, one, g), 4.0, 1e-12);
}

TEST(InnerProductSigmaT, ZeroField) {
    const Grid g = Grid::unit(6, 6, 3);
    EXPECT_EQ(inner_product_sigma_t(BoundaryField(g), BoundaryField(g, 2.0), g), 0.0);
}

TEST(InnerProductSigmaT, EdgeIntegralOfArclength) {
    // a = s on the south edge, zero elsewhere; the shared corner at (1, 0) carries only
    // part of the edge's weight, so the error is O(h) rather than O(h^2).
    for (int n : {20, 40, 80}) {
        const Grid g = Grid::unit(n, n, 4);
        const BoundaryField a = sample_boundary(g, [](const BoundaryNode& b, double) { return b.j == 0 ? b.x : 0.0; });
        EXPECT_NEAR(inner_product_sigma_t(a, a, g), 1.0 / 3.0, g.hx()) << n;
    }
}

TEST(NormL2OmegaFinal, Constants) {
    const Grid g = Grid::unit(10, 10, 2);
    const std::vector<double> one(g.nodes(), 1.0), zero(g.nodes(), 0.0);
    EXPECT_NEAR(norm_l2_omega_final(one, g), 1.0, 1e-12);
    EXPECT_EQ(norm_l2_omega_final(zero, g), 0.0);
}

TEST(NormL2OmegaFinal, SineProduct) {
    const Grid g = Grid::unit(100, 100, 1);
    std::vector<double> s(g.nodes());
    for (int i = 0; i <= 100; ++i)
        for (int j = 0; j <= 100; ++j) s[g.index(i, j)] = std::sin(pi * g.x(i)) * std::sin(pi * g.y(j));
    EXPECT_NEAR(norm_l2_omega_final(s, g), 0.5, 1e-3);
}

TEST(NormL2OmegaFinal, ShapeMismatchThrows) {
    const Grid g = Grid::unit(4, 4, 1);
    const std::vector<double> s(7, 1.0);
    EXPECT_THROW(norm_l2_omega_final(s, g), DimensionError);
}

TEST(Quadrature, ExactForAffineFields) {
    const Grid g(7, 5, 3, 2.0, 3.0, 0.5);
    const Field a = sample(g, [](double x, double y, double t) { return 1 + 2 * x - 3 * y + 4 * t; });
    // integral over [0,2]x[0,3]x[0,0.5] of 1 + 2x - 3y + 4t
    const double exact = 3.0 + 6.0 - 13.5 + 3.0;
    EXPECT_NEAR(inner_product_omega_t(a, Field(g, 1.0), g), exact, 1e-12 * std::abs(exact));

    const BoundaryField b = sample_boundary(g, [](const BoundaryNode& n, double t) { return 1 + n.x + n.y - t; });
    // edges contribute 4 + 13.5 + 10 + 7.5 per unit time; the -t term gives -perimeter T^2/2
    const double exact_b = 35.0 * 0.5 - 10.0 * 0.125;
    EXPECT_NEAR(inner_product_sigma_t(b, BoundaryField(g, 1.0), g), exact_b, 1e-12 * exact_b);

    std::vector<double> slice(g.nodes());
    for (int i = 0; i <= g.nx(); ++i)
        for (int j = 0; j <= g.ny(); ++j) slice[g.index(i, j)] = 1 + g.x(i);
    EXPECT_NEAR(inner_product_omega(slice, std::vector<double>(g.nodes(), 1.0), g), 12.0, 1e-12 * 12.0);
}

TEST(Quadrature, SymmetryAndPositivity) {
    const Grid g = Grid::unit(9, 11, 6);
    const Field a = sample(g, [](double x, double y, double t) { return std::sin(3 * x + y) - t; });
    const Field b = sample(g, [](double x, double y, double t) { return std::exp(x * y) + t * t; });
    EXPECT_EQ(inner_product_omega_t(a, b, g), inner_product_omega_t(b, a, g));
    EXPECT_GT(inner_product_omega_t(a, a, g), 0.0);
    EXPECT_EQ(inner_product_omega_t(Field(g), Field(g), g), 0.0);

    const BoundaryField c = sample_boundary(g, [](const BoundaryNode& n, double t) { return std::cos(n.s) * t; });
    const BoundaryField d = sample_boundary(g, [](const BoundaryNode& n, double t) { return n.x - n.y + t; });
    EXPECT_EQ(inner_product_sigma_t(c, d, g), inner_product_sigma_t(d, c, g));
    EXPECT_GT(inner_product_sigma_t(d, d, g), 0.0);

    // a single nonzero node is seen by the positive weights
    Field spike(g);
    spike(3, g.index(4, 5)) = 1.0;
    EXPECT_GT(inner_product_omega_t(spike, spike, g), 0.0);
}

TEST(Quadrature, RefinementIsSecondOrder) {
    auto fn = [](double x, double y, double t) { return std::exp(x) * std::cos(2 * y) * (1 + t * t); };
    const double exact = (std::exp(1.0) - 1.0) * (std::sin(2.0) / 2.0) * (4.0 / 3.0);
    std::vector<double> errors;
    for (int n : {8, 16, 32}) {
        const Grid g = Grid::unit(n, n, n);
        errors.push_back(std::abs(inner_product_omega_t(sample(g, fn), Field(g, 1.0), g) - exact));
    }
    EXPECT_GE(std::log2(errors[0] / errors[1]), 1.9);
    EXPECT_GE(std::log2(errors[1] / errors[2]), 1.9);
}

TEST(Grid, LeftEndpointRuleDropsFinalLevel) {
    const Grid g = Grid::unit(4, 4, 5);
    Field last(g);
    for (double& x : last.level(5)) x = 1.0;
    EXPECT_EQ(inner_product_omega_t(last, last, g, TimeRule::left_endpoint), 0.0);
    const Field one(g, 1.0);
    EXPECT_NEAR(inner_product_omega_t(one, one, g, TimeRule::left_endpoint), 1.0, 1e-12);
}

TEST(Grid, TraceAndBoundaryLift) {
    const Grid g(4, 3, 1, 2.0, 1.5, 1.0);
    std::vector<double> slice(g.nodes());
    for (std::size_t k = 0; k < slice.size(); ++k) slice[k] = static_cast<double>(k);
    std::vector<double> trace(g.boundary_nodes());
    extract_trace(slice, g, trace);
    const auto nodes = g.boundary();
    for (std::size_t b = 0; b < nodes.size(); ++b) {
        EXPECT_EQ(trace[b], slice[g.index(nodes[b].i, nodes[b].j)]);
        EXPECT_NEAR(g.boundary_lift(b) * g.area_weight(g.index(nodes[b].i, nodes[b].j)), nodes[b].weight, 1e-15);
    }
}
