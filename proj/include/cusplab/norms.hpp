#ifndef CUSPLAB_NORMS_HPP
#define CUSPLAB_NORMS_HPP

#include "cusplab/kernels.hpp"
#include "cusplab/radial_field.hpp"
#include "cusplab/tensor_field.hpp"

#include <functional>
#include <vector>

namespace cusplab {

/// Weight bookkeeping for the exponentially weighted norms and the bootstrap
/// range: b = 2 + lambda - eta, mu(sigma) = 2 - eta - sigma, s0 = eta - 1,
/// excluded point sigma* = 2 - eta. A negative b flags a degenerate range
/// (the iteration collapses to sigma = 0) rather than an error.
struct WeightParams {
    double lambda;
    double eta;
    double sigma_margin = 0.05;

    WeightParams(double lambda, double eta, double sigma_margin = 0.05);

    double b() const { return 2.0 + lambda - eta; }
    double mu(double sigma) const { return 2.0 - eta - sigma; }
    double s0() const { return eta - 1.0; }
    double sigma_star() const { return 2.0 - eta; }
    bool degenerate() const { return b() < 0.0; }
};

/// ( int_N e^{2 sigma r} |f|^2 dvol )^{1/2} by co-area, fiber integrals exact
/// in Fourier (Parseval with area weight e^{-2r} area(flat)).
double weighted_l2(const TensorField& f, double sigma);

/// Same norm by direct summation over the sampled 3D grid (independent
/// quadrature path, for cross-checks).
double weighted_l2_direct(const TensorField& f, double sigma);

/// ( int_N e^{2 sigma r} |h|_C2^2 dvol )^{1/2}; the C2 integrand is evaluated
/// on the fiber sampling grid. Overloads reuse a precomputed scan.
double weighted_h2(const TensorField& h, double sigma);
double weighted_h2(const FieldScan& scan, const RadialGrid& grid, double sigma);

/// Weighted L2 of a radial field: levelwise |h|(r)^2 area(r) under e^{2 sigma r}.
double weighted_l2_radial(const RadialTensorField& h, const FlatTorusMetric& torus, double sigma);

/// Weighted L2 of h with the C1 integrand (used by the averaged-fluctuation
/// estimate of the bootstrap step).
double weighted_l2_c1(const FieldScan& scan, const RadialGrid& grid, double sigma);

/// Exponentially weighted sup norm sup_x e^{lambda r(x)} |f|(x): the working
/// surrogate for the boundary-coupled decay norm. Satisfies
/// |f|(x) <= norm * e^{-lambda r(x)} by construction.
double norm_0_lambda(const TensorField& f, double lambda);
double norm_0_lambda(const FieldScan& scan, const RadialGrid& grid, double lambda);

/// Level-wise Poincare check at one node: lhs = int |h - avg h|^2 (Parseval
/// exact), rhs = C diam(T(r))^2 int |h|_C1^2 (sampled integrand) with
/// C = e^2 * component_factor. The frame-weighted component sum makes the
/// component factor 1.
struct PoincareResult {
    double lhs;
    double rhs;
    double component_factor;
    bool pass;
};
PoincareResult poincare_check(const TensorField& h, std::size_t node);

/// int_0^R levelwise(r) dr, composite quadrature at the grid order.
double coarea_integrate(const RadialGrid& grid, const std::function<double(double)>& levelwise);
double coarea_integrate(const RadialGrid& grid, std::span<const double> levelwise);

/// Bounded-under-truncation check for int_0^R e^{-2r} e^{2(sigma' + mu) r} dr:
/// sweeps the R list and reports whether the integral stabilises (true) or
/// keeps growing (false). The analytic threshold is sigma' < sigma + eta - 1.
bool mu_integral_bounded(const WeightParams& params, double sigma, double sigma_prime,
                         std::span<const double> R_sweep, double dr);

} // namespace cusplab

#endif
