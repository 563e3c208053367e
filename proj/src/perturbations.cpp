#include <cmath>
#include <numbers>
#include <vector>

#include "amsa/diagnostics.hpp"

namespace amsa {

namespace {

struct TrigSeries {
    int modes;
    double lx, ly, horizon;
    std::vector<double> coeff;

    TrigSeries(const Grid& g, std::mt19937_64& rng, int m)
        : modes(m), lx(g.lx()), ly(g.ly()), horizon(g.horizon()) {
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        coeff.resize(static_cast<std::size_t>(m) * m * m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c) coeff[(a * m + b) * m + c] = dist(rng) / (1.0 + a + b + c);
    }

    double operator()(double x, double y, double t) const {
        using std::numbers::pi;
        double sum = 0.0;
        for (int a = 0; a < modes; ++a) {
            const double ca = std::cos(a * pi * x / lx);
            for (int b = 0; b < modes; ++b) {
                const double cb = ca * std::cos(b * pi * y / ly);
                for (int c = 0; c < modes; ++c) {
                    sum += coeff[(a * modes + b) * modes + c] * cb * std::cos(c * pi * t / horizon);
                }
            }
        }
        return sum;
    }
};

template <class F>
void normalise(F& field) {
    const double m = max_abs(field.values());
    if (m > 0.0) {
        for (double& v : field.values()) v /= m;
    }
}

}  // namespace

Field smooth_random_field(const Grid& g, std::mt19937_64& rng, int modes) {
    const TrigSeries series(g, rng, modes);
    Field out(g);
    for (int n = 0; n <= g.nt(); ++n)
        for (int i = 0; i <= g.nx(); ++i)
            for (int j = 0; j <= g.ny(); ++j) out(n, g.index(i, j)) = series(g.x(i), g.y(j), g.t(n));
    normalise(out);
    return out;
}

BoundaryField smooth_random_boundary_field(const Grid& g, std::mt19937_64& rng, int modes) {
    const TrigSeries series(g, rng, modes);
    BoundaryField out(g);
    const auto bnodes = g.boundary();
    for (int n = 0; n <= g.nt(); ++n)
        for (std::size_t b = 0; b < bnodes.size(); ++b) out(n, b) = series(bnodes[b].x, bnodes[b].y, g.t(n));
    normalise(out);
    return out;
}

}  // namespace amsa
