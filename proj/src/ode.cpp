#include "cusplab/ode.hpp"

#include "cusplab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cusplab {

QuadraticODE::QuadraticODE(double p, double q) : p(p), q(q) {
    const long double disc = static_cast<long double>(p) * p - 4.0L * q;
    if (!(disc > 0.0L))
        throw HypothesisError("quadratic ODE: two distinct real roots required");
}

std::pair<double, double> QuadraticODE::roots() const {
    const long double pl = p, ql = q;
    const long double disc = std::sqrt(pl * pl - 4.0L * ql);
    // classical cancellation-free form
    const long double r1 = (pl >= 0.0L) ? (-pl - disc) / 2.0L : (2.0L * ql) / (-pl + disc);
    const long double r2 = (pl >= 0.0L) ? (2.0L * ql) / (-pl - disc) : (-pl + disc) / 2.0L;
    double lo = static_cast<double>(std::min(r1, r2));
    double hi = static_cast<double>(std::max(r1, r2));
    return {lo, hi};
}

double GrowthEnvelope::value(double r, double psi_l1_norm) const {
    double v = 0.0;
    for (const auto& t : terms) v += t.beta * std::exp(t.mu * r);
    if (l1.has_value()) v += psi_l1_norm * std::exp(l1->a * r);
    return v;
}

std::vector<double> integrate_linear_first_order(const RadialGrid& grid, double lambda,
                                                 std::span<const double> u, double z0,
                                                 bool backward) {
    if (u.size() != grid.nodes()) throw GridError("ode: forcing sample count mismatch");
    const std::size_t N = grid.nodes();
    std::vector<double> z(N);
    const double h = backward ? -grid.dr() : grid.dr();
    auto step = [&](double zi, double u0, double um, double u1) {
        const double k1 = lambda * zi + u0;
        const double k2 = lambda * (zi + 0.5 * h * k1) + um;
        const double k3 = lambda * (zi + 0.5 * h * k2) + um;
        const double k4 = lambda * (zi + h * k3) + u1;
        return zi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    if (!backward) {
        z[0] = z0;
        for (std::size_t i = 0; i + 1 < N; ++i)
            z[i + 1] = step(z[i], u[i], midpoint_value(u, i), u[i + 1]);
    } else {
        z[N - 1] = z0;
        for (std::size_t i = N - 1; i > 0; --i)
            z[i - 1] = step(z[i], u[i], midpoint_value(u, i - 1), u[i - 1]);
    }
    return z;
}

namespace {

std::vector<double> solve_ivp_impl(const QuadraticODE& ode, const RadialGrid& grid,
                                   const std::function<double(double, std::size_t)>& u_at,
                                   double y0, double y0p) {
    const std::size_t N = grid.nodes();
    std::vector<double> y(N);
    double yv = y0, yp = y0p;
    y[0] = yv;
    const double h = grid.dr();
    for (std::size_t i = 0; i + 1 < N; ++i) {
        const double r = grid.r(i);
        const double u0 = u_at(r, 2 * i);
        const double um = u_at(r + 0.5 * h, 2 * i + 1);
        const double u1 = u_at(r + h, 2 * i + 2);
        auto f = [&](double yy, double pp, double uu) {
            return std::pair<double, double>(pp, uu - ode.p * pp - ode.q * yy);
        };
        const auto [k1y, k1p] = f(yv, yp, u0);
        const auto [k2y, k2p] = f(yv + 0.5 * h * k1y, yp + 0.5 * h * k1p, um);
        const auto [k3y, k3p] = f(yv + 0.5 * h * k2y, yp + 0.5 * h * k2p, um);
        const auto [k4y, k4p] = f(yv + h * k3y, yp + h * k3p, u1);
        yv += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        yp += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        if (std::abs(yv) > 1e300)
            throw DomainError("solve_ivp: overflow while integrating a growing mode");
        y[i + 1] = yv;
    }
    return y;
}

} // namespace

std::vector<double> solve_ivp(const QuadraticODE& ode, const RadialGrid& grid,
                              std::span<const double> u, double y0, double y0p) {
    if (u.size() != grid.nodes()) throw GridError("ode: forcing sample count mismatch");
    return solve_ivp_impl(
        ode, grid,
        [&](double, std::size_t half) -> double {
            const std::size_t i = half / 2;
            if (half % 2 == 0) return u[i];
            return midpoint_value(u, i);
        },
        y0, y0p);
}

std::vector<double> solve_ivp(const QuadraticODE& ode, const RadialGrid& grid,
                              const std::function<double(double)>& u, double y0, double y0p) {
    return solve_ivp_impl(ode, grid, [&](double r, std::size_t) { return u(r); }, y0, y0p);
}

std::vector<double> particular_solution(const QuadraticODE& ode, const RadialGrid& grid,
                                        std::span<const double> u,
                                        std::optional<double> comparison_rate) {
    const auto [l1, l2] = ode.roots();
    auto anchor_right = [&](double lambda) {
        if (comparison_rate.has_value()) return *comparison_rate < lambda;
        return lambda > 0.0;
    };
    // (D - l1)(D - l2) y = u: first g with (D - l1) g = u, then y from
    // (D - l2) y = g.
    const bool g_back = anchor_right(l1);
    const auto g = integrate_linear_first_order(grid, l1, u, 0.0, g_back);
    const bool y_back = anchor_right(l2);
    return integrate_linear_first_order(grid, l2, g, 0.0, y_back);
}

namespace {

// Weighted least squares of samples against exponential columns; weights
// 1/env^2 whiten the certified envelope. Returns the coefficients.
std::vector<double> regress_exponentials(std::span<const double> y, const RadialGrid& grid,
                                         const std::vector<double>& rates,
                                         const std::vector<double>& weights) {
    const std::size_t m = rates.size();
    const std::size_t N = grid.nodes();
    // column scaling for conditioning
    std::vector<double> scale(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            s = std::max(s, std::abs(std::exp(rates[j] * grid.r(i))) * std::sqrt(weights[i]));
        scale[j] = (s > 0.0) ? s : 1.0;
    }
    std::vector<double> G(m * m, 0.0), b(m, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        const double r = grid.r(i);
        const double w = weights[i];
        if (w == 0.0) continue;
        for (std::size_t j = 0; j < m; ++j) {
            const double ej = std::exp(rates[j] * r) / scale[j];
            b[j] += w * ej * y[i];
            for (std::size_t l = j; l < m; ++l) {
                const double el = std::exp(rates[l] * r) / scale[l];
                G[j * m + l] += w * ej * el;
            }
        }
    }
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t l = 0; l < j; ++l) G[j * m + l] = G[l * m + j];
    // Cholesky solve (m is tiny)
    std::vector<double> L(m * m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t l = 0; l <= j; ++l) {
            double s = G[j * m + l];
            for (std::size_t k = 0; k < l; ++k) s -= L[j * m + k] * L[l * m + k];
            if (l == j) {
                if (!(s > 0.0)) throw DecompositionError("exponential regression: singular normal equations", 0.0, 0.0);
                L[j * m + j] = std::sqrt(s);
            } else {
                L[j * m + l] = s / L[l * m + l];
            }
        }
    }
    std::vector<double> x(m);
    for (std::size_t j = 0; j < m; ++j) {
        double s = b[j];
        for (std::size_t k = 0; k < j; ++k) s -= L[j * m + k] * x[k];
        x[j] = s / L[j * m + j];
    }
    for (std::size_t j = m; j-- > 0;) {
        double s = x[j];
        for (std::size_t k = j + 1; k < m; ++k) s -= L[k * m + j] * x[k];
        x[j] = s / L[j * m + j];
    }
    for (std::size_t j = 0; j < m; ++j) x[j] /= scale[j];
    return x;
}

} // namespace

RateDecomposition decompose_growth(std::span<const double> y, const QuadraticODE& ode,
                                   const GrowthEnvelope& env, const RadialGrid& grid) {
    if (y.size() != grid.nodes()) throw GridError("ode: solution sample count mismatch");
    const std::size_t N = grid.nodes();
    const auto [l1, l2] = ode.roots();

    for (const auto& t : env.terms) {
        if (t.beta < 0.0) throw HypothesisError("growth envelope: beta must be nonnegative");
        if (std::abs(t.mu - l1) < kResonanceTol || std::abs(t.mu - l2) < kResonanceTol)
            throw HypothesisError("growth envelope: forcing rate resonates with a root");
    }
    RateDecomposition out;
    if (env.l1.has_value()) {
        const auto& t = *env.l1;
        if (std::abs(t.a - l1) < kResonanceTol || std::abs(t.a - l2) < kResonanceTol)
            throw HypothesisError("growth envelope: L1 rate resonates with a root");
        if (t.psi.size() != N) throw GridError("growth envelope: psi sample count mismatch");
        for (double v : t.psi)
            if (!(v >= 0.0)) throw DataError("growth envelope: psi must be nonnegative");
        out.psi_l1 = grid.trapezoid(t.psi);
    }

    // Pre-strip the dominant-root content estimated on the tail window.
    // Differentiating e^{l2 r}-sized values leaves rounding ghosts far above
    // a small envelope; removing that content first keeps the forcing
    // recovery meaningful whatever the size of the grown mode.
    double A2_pre = 0.0;
    {
        const double r_lo = grid.R() - std::min(2.0, 0.25 * grid.R());
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double r = grid.r(i);
            if (r < r_lo) continue;
            const double p = std::exp(l2 * (r - grid.R()));
            num += y[i] * p;
            den += p * p;
        }
        A2_pre = num / den * std::exp(-l2 * grid.R());
    }
    std::vector<double> ywork(y.begin(), y.end());
    for (std::size_t i = 0; i < N; ++i) ywork[i] -= A2_pre * std::exp(l2 * grid.r(i));

    // Forcing recovered from the solution.
    std::vector<double> u(N);
    {
        const auto yp = grid.d1(std::span<const double>(ywork));
        const auto ypp = grid.d2(std::span<const double>(ywork));
        for (std::size_t i = 0; i < N; ++i) u[i] = ypp[i] + ode.p * yp[i] + ode.q * ywork[i];
    }

    // Deduplicated envelope rates for the regression.
    std::vector<double> rates;
    for (const auto& t : env.terms) {
        bool seen = false;
        for (double r0 : rates)
            if (std::abs(r0 - t.mu) < 1e-9) seen = true;
        if (!seen) rates.push_back(t.mu);
    }

    std::vector<double> ypart(N, 0.0);
    if (!rates.empty()) {
        std::vector<double> weights(N);
        for (std::size_t i = 0; i < N; ++i) {
            const double e = env.value(grid.r(i), out.psi_l1);
            weights[i] = (e > 0.0) ? 1.0 / (e * e) : 0.0;
        }
        const auto gamma = regress_exponentials(u, grid, rates, weights);
        for (std::size_t j = 0; j < rates.size(); ++j) {
            const double qv = ode.eval(rates[j]);
            for (std::size_t i = 0; i < N; ++i) {
                const double e = std::exp(rates[j] * grid.r(i));
                ypart[i] += gamma[j] / qv * e;
                u[i] -= gamma[j] * e;
            }
        }
    }

    // Anchored remainder (carries the L1-term forcing and regression
    // leftovers). The anchors compare each root against the slowest envelope
    // decay, so the remainder's homogeneous leakage stays inside the envelope.
    std::optional<double> comparison;
    for (const auto& t : env.terms)
        comparison = comparison ? std::max(*comparison, t.mu) : t.mu;
    if (env.l1.has_value())
        comparison = comparison ? std::max(*comparison, env.l1->a) : env.l1->a;
    const auto yrem = particular_solution(ode, grid, u, comparison);
    for (std::size_t i = 0; i < N; ++i) ypart[i] += yrem[i];

    // Homogeneous coefficients from the remainder, scaled least squares.
    {
        std::vector<double> z(N);
        for (std::size_t i = 0; i < N; ++i) z[i] = ywork[i] - ypart[i];
        std::vector<double> ones(N, 1.0);
        const auto A = regress_exponentials(z, grid, {l1, l2}, ones);
        out.A1 = A[0];
        out.A2 = A[1] + A2_pre;
    }

    // Certification.
    double cmax = 0.0;
    double scale_y = 0.0;
    for (std::size_t i = 0; i < N; ++i) scale_y = std::max(scale_y, std::abs(y[i]));
    for (std::size_t i = 0; i < N; ++i) {
        const double r = grid.r(i);
        const double resid =
            std::abs(y[i] - out.A1 * std::exp(l1 * r) - out.A2 * std::exp(l2 * r));
        if (resid > out.worst_residual) {
            out.worst_residual = resid;
            out.worst_r = r;
        }
        if (env.empty()) continue;
        const double e = env.value(r, out.psi_l1);
        if (e == 0.0) {
            if (resid > 1e-6 * std::max(1.0, scale_y))
                throw DecompositionError("decompose_growth: residual outside a vanishing envelope",
                                         r, resid);
            continue;
        }
        cmax = std::max(cmax, resid / e);
    }
    if (env.empty()) {
        if (out.worst_residual > 1e-6 * std::max(1.0, scale_y))
            throw DecompositionError("decompose_growth: homogeneous residual too large",
                                     out.worst_r, out.worst_residual);
        out.envelope_constant = 0.0;
    } else {
        if (!std::isfinite(cmax))
            throw DecompositionError("decompose_growth: no finite certificate", out.worst_r,
                                     out.worst_residual);
        out.envelope_constant = cmax;
    }
    return out;
}

RateDecomposition decompose_growth_l1(std::span<const double> y, const QuadraticODE& ode,
                                      double a, std::span<const double> psi,
                                      const RadialGrid& grid) {
    GrowthEnvelope env;
    env.l1 = GrowthEnvelope::L1Term{a, std::vector<double>(psi.begin(), psi.end())};
    return decompose_growth(y, ode, env, grid);
}

double fit_tail_rate(std::span<const double> y, const RadialGrid& grid, double window) {
    const double r_lo = grid.R() - window;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        const double r = grid.r(i);
        if (r < r_lo) continue;
        const double a = std::abs(y[i]);
        if (a <= 0.0) continue;
        const double ly = std::log(a);
        sx += r;
        sy += ly;
        sxx += r * r;
        sxy += r * ly;
        ++n;
    }
    if (n < 2) throw DataError("fit_tail_rate: not enough usable tail samples");
    const double d = static_cast<double>(n) * sxx - sx * sx;
    return (static_cast<double>(n) * sxy - sx * sy) / d;
}

} // namespace cusplab
