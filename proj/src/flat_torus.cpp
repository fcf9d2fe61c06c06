#include "cusplab/flat_torus.hpp"

#include "cusplab/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace cusplab {

namespace {
constexpr int kEnumWindow = 3;
}

FlatTorusMetric::FlatTorusMetric(double g11, double g12, double g22)
    : g11_(g11), g12_(g12), g22_(g22) {
    if (!std::isfinite(g11) || !std::isfinite(g12) || !std::isfinite(g22))
        throw ParameterError("flat torus: non-finite gram entries");
    if (!(g11 > 0.0) || !(g22 > 0.0) || !(det() > 0.0))
        throw ParameterError("flat torus: gram matrix must be positive definite");
}

double FlatTorusMetric::area() const { return std::sqrt(det()); }

double FlatTorusMetric::condition_number() const {
    const double tr = g11_ + g22_;
    const double disc = std::sqrt(0.25 * tr * tr - det());
    const double lo = 0.5 * tr - disc;
    const double hi = 0.5 * tr + disc;
    return hi / lo;
}

std::array<std::array<double, 2>, 2> FlatTorusMetric::basis() const {
    const double l1 = std::sqrt(g11_);
    return {{{l1, 0.0}, {g12_ / l1, std::sqrt(det()) / l1}}};
}

double FlatTorusMetric::diameter() const {
    // The deepest hole of a 2D lattice is a vertex of the Voronoi cell of the
    // origin, i.e. a circumcentre of the origin and two other lattice points.
    // Enumerate pairs in the window, take the circumcentre, and measure its
    // distance to the nearest enumerated lattice point.
    const auto B = basis();
    std::vector<std::array<double, 2>> pts;
    for (int k1 = -kEnumWindow; k1 <= kEnumWindow; ++k1)
        for (int k2 = -kEnumWindow; k2 <= kEnumWindow; ++k2)
            pts.push_back({k1 * B[0][0] + k2 * B[1][0], k1 * B[0][1] + k2 * B[1][1]});

    auto dist_to_lattice = [&](double x, double y) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) {
            const double dx = x - p[0], dy = y - p[1];
            const double d = dx * dx + dy * dy;
            if (d < best) best = d;
        }
        return std::sqrt(best);
    };

    double covering = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            const auto& u = pts[a];
            const auto& v = pts[b];
            if (u[0] == 0.0 && u[1] == 0.0) continue;
            if (v[0] == 0.0 && v[1] == 0.0) continue;
            // circumcentre of (0, u, v)
            const double d = 2.0 * (u[0] * v[1] - u[1] * v[0]);
            if (std::abs(d) < 1e-14) continue;
            const double uu = u[0] * u[0] + u[1] * u[1];
            const double vv = v[0] * v[0] + v[1] * v[1];
            const double cx = (v[1] * uu - u[1] * vv) / d;
            const double cy = (u[0] * vv - v[0] * uu) / d;
            // a Voronoi vertex of the origin's cell has the origin among its
            // nearest lattice points; anything else is not a deep hole
            const double rad0 = std::sqrt(cx * cx + cy * cy);
            const double scale = std::sqrt(g11_) + std::sqrt(g22_);
            if (rad0 > 2.0 * scale) continue; // degenerate (near-collinear) triple
            const double dmin = dist_to_lattice(cx, cy);
            if (dmin < rad0 - 1e-9 * scale) continue;
            if (rad0 > covering) covering = rad0;
        }
    }
    return covering;
}

std::array<int, 2> FlatTorusMetric::lambda1_mode() const {
    const double dd = det();
    const double i11 = g22_ / dd, i12 = -g12_ / dd, i22 = g11_ / dd;
    double best = std::numeric_limits<double>::infinity();
    std::array<int, 2> arg{1, 0};
    for (int k1 = -2 * kEnumWindow; k1 <= 2 * kEnumWindow; ++k1) {
        for (int k2 = -2 * kEnumWindow; k2 <= 2 * kEnumWindow; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            const double q = i11 * k1 * k1 + 2.0 * i12 * k1 * k2 + i22 * k2 * k2;
            if (q < best) {
                best = q;
                arg = {k1, k2};
            }
        }
    }
    return arg;
}

double FlatTorusMetric::lambda1() const {
    const auto k = lambda1_mode();
    const double lam = mode_eigenvalue(k[0], k[1]);
    const double d = diameter();
    if (!(lam * d * d >= std::exp(-2.0)))
        throw ParameterError("flat torus: lambda1 * diam^2 fell below e^{-2}");
    return lam;
}

std::array<double, 2> FlatTorusMetric::dual_vector(int k1, int k2) const {
    // B^{-1} for the Cholesky basis rows B = [[l1, 0], [g12/l1, det^{1/2}/l1]]:
    // x = B^T u, so grad_x exp(2 pi i k.u) = 2 pi i (B^{-1} k).
    const auto B = basis();
    const double detB = B[0][0] * B[1][1];
    const double inv00 = B[1][1] / detB, inv01 = -B[1][0] / detB;
    const double inv10 = 0.0, inv11 = B[0][0] / detB;
    const double twopi = 2.0 * std::numbers::pi;
    return {twopi * (inv00 * k1 + inv10 * k2), twopi * (inv01 * k1 + inv11 * k2)};
}

double FlatTorusMetric::mode_eigenvalue(int k1, int k2) const {
    const auto d = dual_vector(k1, k2);
    return d[0] * d[0] + d[1] * d[1];
}

} // namespace cusplab
