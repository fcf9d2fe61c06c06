#include "cusplab/norms.hpp"

#include "cusplab/errors.hpp"
#include "cusplab/parallel.hpp"

#include <cmath>

namespace cusplab {

WeightParams::WeightParams(double lambda, double eta, double sigma_margin)
    : lambda(lambda), eta(eta), sigma_margin(sigma_margin) {
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw ParameterError("weight params: lambda must lie in (0,1)");
    if (!(eta > 1.0)) throw ParameterError("weight params: eta must be > 1");
    if (!(sigma_margin > 0.0)) throw ParameterError("weight params: margin must be positive");
}

double weighted_l2(const TensorField& f, double sigma) {
    const auto& grid = f.grid();
    std::vector<double> level(grid.nodes());
    parallel_for(grid.nodes(), [&](std::size_t i) {
        level[i] = std::exp(2.0 * sigma * grid.r(i)) * level_l2_sq(f, i);
    });
    return std::sqrt(grid.integrate(level));
}

double weighted_l2_direct(const TensorField& f, double sigma) {
    const FieldScan scan = scan_field(f);
    const auto& grid = f.grid();
    std::vector<double> level(grid.nodes());
    for (std::size_t i = 0; i < grid.nodes(); ++i)
        level[i] = std::exp(2.0 * sigma * grid.r(i)) * scan.level[i].int_c0_sq;
    return std::sqrt(grid.integrate(level));
}

double weighted_h2(const FieldScan& scan, const RadialGrid& grid, double sigma) {
    std::vector<double> level(grid.nodes());
    for (std::size_t i = 0; i < grid.nodes(); ++i)
        level[i] = std::exp(2.0 * sigma * grid.r(i)) * scan.level[i].int_c2_sq;
    return std::sqrt(grid.integrate(level));
}

double weighted_h2(const TensorField& h, double sigma) {
    return weighted_h2(scan_field(h), h.grid(), sigma);
}

double weighted_l2_c1(const FieldScan& scan, const RadialGrid& grid, double sigma) {
    std::vector<double> level(grid.nodes());
    for (std::size_t i = 0; i < grid.nodes(); ++i)
        level[i] = std::exp(2.0 * sigma * grid.r(i)) * scan.level[i].int_c1_sq;
    return std::sqrt(grid.integrate(level));
}

double weighted_l2_radial(const RadialTensorField& h, const FlatTorusMetric& torus, double sigma) {
    const auto& grid = h.grid();
    std::vector<double> level(grid.nodes());
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        const double n = h.pointwise_norm(i);
        const double area = std::exp(-2.0 * grid.r(i)) * torus.area();
        level[i] = std::exp(2.0 * sigma * grid.r(i)) * n * n * area;
    }
    return std::sqrt(grid.integrate(level));
}

double norm_0_lambda(const FieldScan& scan, const RadialGrid& grid, double lambda) {
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.nodes(); ++i)
        sup = std::max(sup, std::exp(lambda * grid.r(i)) * scan.level[i].sup_c0);
    return sup;
}

double norm_0_lambda(const TensorField& f, double lambda) {
    return norm_0_lambda(scan_field(f), f.grid(), lambda);
}

PoincareResult poincare_check(const TensorField& h, std::size_t node) {
    PoincareResult res;
    res.component_factor = 1.0;
    res.lhs = level_fluctuation_l2_sq(h, node);
    const double r = h.grid().r(node);
    const double diam = std::exp(-r) * h.torus().diameter();
    const LevelScan scan = scan_level(h, node);
    res.rhs = std::exp(2.0) * res.component_factor * diam * diam * scan.int_c1_sq;
    res.pass = res.lhs <= res.rhs * (1.0 + 1e-9) + 1e-300;
    return res;
}

double coarea_integrate(const RadialGrid& grid, const std::function<double(double)>& levelwise) {
    std::vector<double> samples(grid.nodes());
    for (std::size_t i = 0; i < grid.nodes(); ++i) samples[i] = levelwise(grid.r(i));
    return grid.integrate(samples);
}

double coarea_integrate(const RadialGrid& grid, std::span<const double> levelwise) {
    return grid.integrate(levelwise);
}

bool mu_integral_bounded(const WeightParams& params, double sigma, double sigma_prime,
                         std::span<const double> R_sweep, double dr) {
    if (R_sweep.size() < 2) throw ParameterError("mu integral check: need at least two R values");
    std::vector<double> vals;
    const double expo = 2.0 * (sigma_prime + params.mu(sigma)) - 2.0;
    for (double R : R_sweep) {
        const RadialGrid grid(R, dr);
        std::vector<double> s(grid.nodes());
        for (std::size_t i = 0; i < grid.nodes(); ++i) s[i] = std::exp(expo * grid.r(i));
        vals.push_back(grid.integrate(s));
    }
    // Bounded iff consecutive truncations stop growing: measure the last
    // relative increment.
    const double a = vals[vals.size() - 2];
    const double b = vals[vals.size() - 1];
    return (b - a) <= 0.05 * std::abs(a);
}

} // namespace cusplab
