#ifndef CUSPLAB_ODE_HPP
#define CUSPLAB_ODE_HPP

#include "cusplab/grid.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace cusplab {

/// Q(X) = X^2 + p X + q acting as Q(d/dr), restricted to two distinct real
/// roots (the hypothesis of both rate-transfer lemmas).
struct QuadraticODE {
    double p;
    double q;

    QuadraticODE(double p, double q);
    static QuadraticODE from_roots(double l1, double l2) { return {-(l1 + l2), l1 * l2}; }

    /// Ordered roots (lambda1 < lambda2), exact quadratic formula evaluated in
    /// extended precision.
    std::pair<double, double> roots() const;

    /// Q evaluated at a scalar.
    double eval(double x) const { return x * x + p * x + q; }
};

/// Envelope for the forcing of Q(d/dr) y = u: exponential terms
/// |u| <= sum beta_k e^{mu_k r}, plus an optional L1 term |u| <= e^{a r} psi(r)
/// with psi >= 0 integrable.
struct GrowthEnvelope {
    struct Term {
        double beta;
        double mu;
    };
    struct L1Term {
        double a;
        std::vector<double> psi; // nodal samples, nonnegative
    };
    std::vector<Term> terms;
    std::optional<L1Term> l1;

    double value(double r, double psi_l1_norm) const;
    bool empty() const { return terms.empty() && !l1.has_value(); }
};

/// Output of the growth decompositions: homogeneous coefficients and the
/// certified residual envelope |y - A1 e^{l1 r} - A2 e^{l2 r}| <=
/// sum c_k beta_k e^{mu_k r} (+ c_psi |psi|_L1 e^{a r}), constants equal-split.
struct RateDecomposition {
    double A1 = 0.0;
    double A2 = 0.0;
    /// Uniform certified constant (all c_k equal); 0 for an empty envelope.
    double envelope_constant = 0.0;
    /// Largest residual over the grid and where it sits.
    double worst_residual = 0.0;
    double worst_r = 0.0;
    /// L1 norm of psi (trapezoidal), 0 when absent.
    double psi_l1 = 0.0;
};

/// First-order linear scalar integrator: z' = lambda z + u with u sampled on
/// the grid (4th-order midpoint interpolation), classical RK4, integrating
/// forward from z[0] = z0 or backward from z[last] = z0.
std::vector<double> integrate_linear_first_order(const RadialGrid& grid, double lambda,
                                                 std::span<const double> u, double z0,
                                                 bool backward);

/// IVP for Q(d/dr) y = u with y(0) = y0, y'(0) = y0p; classical RK4 on the
/// first-order system. Throws on overflow past 1e300 (growing modes must be
/// handled by directional splitting instead).
std::vector<double> solve_ivp(const QuadraticODE& ode, const RadialGrid& grid,
                              std::span<const double> u, double y0, double y0p);
std::vector<double> solve_ivp(const QuadraticODE& ode, const RadialGrid& grid,
                              const std::function<double(double)>& u, double y0, double y0p);

/// Canonical particular solution by two anchored first-order sweeps. The
/// anchor of each factor (D - lambda) is the right end when the comparison
/// rate `a` is below lambda (bounded continuation), the left end otherwise.
/// With no comparison rate the anchor follows the sign of lambda, which is
/// also the numerically contracting direction.
std::vector<double> particular_solution(const QuadraticODE& ode, const RadialGrid& grid,
                                        std::span<const double> u,
                                        std::optional<double> comparison_rate = std::nullopt);

/// Growth-rate decomposition: recovers the forcing by Q(d/dr) applied to y
/// (4th-order FD), regresses it on the envelope exponentials, forms the
/// ansatz particular solution plus an anchored remainder, fits A1/A2 on what
/// is left, and certifies the per-node residual against the envelope.
/// Throws HypothesisError on resonance and DecompositionError when no finite
/// constant certifies.
RateDecomposition decompose_growth(std::span<const double> y, const QuadraticODE& ode,
                                   const GrowthEnvelope& env, const RadialGrid& grid);

/// L1 variant: |u| <= e^{a r} psi(r).
RateDecomposition decompose_growth_l1(std::span<const double> y, const QuadraticODE& ode,
                                      double a, std::span<const double> psi,
                                      const RadialGrid& grid);

/// Least-squares slope of log|y| on the tail window [R - window, R];
/// recovers the dominant exponential rate of a sampled solution.
double fit_tail_rate(std::span<const double> y, const RadialGrid& grid, double window);

/// Tolerance band around the roots inside which forcing rates are rejected.
constexpr double kResonanceTol = 1e-6;

} // namespace cusplab

#endif
