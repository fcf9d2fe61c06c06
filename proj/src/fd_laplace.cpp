#include "cusplab/fd_laplace.hpp"

#include "cusplab/errors.hpp"
#include "cusplab/rng.hpp"

#include <cmath>

namespace cusplab {

FdLaplacian2D::FdLaplacian2D(const FlatTorusMetric& torus, int n) : n_(n) {
    if (n < 8) throw ParameterError("fd laplacian: grid too small");
    const double det = torus.det();
    i11_ = torus.g22() / det;
    i12_ = -torus.g12() / det;
    i22_ = torus.g11() / det;
    h_ = 1.0 / static_cast<double>(n);
}

void FdLaplacian2D::d1(const std::vector<double>& u, std::vector<double>& out, bool xdir) const {
    const int n = n_;
    const double c1 = 2.0 / 3.0 / h_, c2 = -1.0 / 12.0 / h_;
    out.resize(u.size());
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            auto at = [&](int da) {
                const int aa = xdir ? (a + da + 2 * n) % n : a;
                const int bb = xdir ? b : (b + da + 2 * n) % n;
                return u[static_cast<std::size_t>(aa) * static_cast<std::size_t>(n) +
                         static_cast<std::size_t>(bb)];
            };
            out[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
                static_cast<std::size_t>(b)] =
                c1 * (at(1) - at(-1)) + c2 * (at(2) - at(-2));
        }
    }
}

void FdLaplacian2D::d2(const std::vector<double>& u, std::vector<double>& out, bool xdir) const {
    const int n = n_;
    const double h2 = h_ * h_;
    const double c0 = -5.0 / 2.0 / h2, c1 = 4.0 / 3.0 / h2, c2 = -1.0 / 12.0 / h2;
    out.resize(u.size());
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            auto at = [&](int da) {
                const int aa = xdir ? (a + da + 2 * n) % n : a;
                const int bb = xdir ? b : (b + da + 2 * n) % n;
                return u[static_cast<std::size_t>(aa) * static_cast<std::size_t>(n) +
                         static_cast<std::size_t>(bb)];
            };
            out[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
                static_cast<std::size_t>(b)] =
                c0 * at(0) + c1 * (at(1) + at(-1)) + c2 * (at(2) + at(-2));
        }
    }
}

void FdLaplacian2D::matvec(const std::vector<double>& u, std::vector<double>& out) const {
    std::vector<double> txx, tyy, ty, txy;
    d2(u, txx, true);
    d2(u, tyy, false);
    d1(u, ty, false);
    d1(ty, txy, true);
    out.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = -(i11_ * txx[i] + 2.0 * i12_ * txy[i] + i22_ * tyy[i]);
}

namespace {

void project_mean(std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    for (double& x : v) x -= mean;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

double FdLaplacian2D::lambda1() const {
    const std::size_t sz = static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
    Rng rng(0xf1be7u);
    std::vector<double> x(sz);
    for (auto& v : x) v = rng.symmetric();
    project_mean(x);

    std::vector<double> b(sz), z(sz), rvec(sz), p(sz), Ap(sz);
    double rq_prev = 0.0;
    for (int outer = 0; outer < 60; ++outer) {
        // normalize, b = x
        const double nx = std::sqrt(dot(x, x));
        for (std::size_t i = 0; i < sz; ++i) b[i] = x[i] / nx;

        // CG solve L z = b on the mean-zero subspace
        std::fill(z.begin(), z.end(), 0.0);
        rvec = b;
        p = rvec;
        double rr = dot(rvec, rvec);
        const double rr0 = rr;
        for (int it = 0; it < 30000 && rr > 1e-22 * rr0; ++it) {
            matvec(p, Ap);
            project_mean(Ap);
            const double alpha = rr / dot(p, Ap);
            for (std::size_t i = 0; i < sz; ++i) {
                z[i] += alpha * p[i];
                rvec[i] -= alpha * Ap[i];
            }
            const double rr_new = dot(rvec, rvec);
            const double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t i = 0; i < sz; ++i) p[i] = rvec[i] + beta * p[i];
        }
        project_mean(z);
        x = z;

        matvec(x, Ap);
        const double rq = dot(x, Ap) / dot(x, x);
        if (outer > 2 && std::abs(rq - rq_prev) <= 1e-9 * std::abs(rq)) return rq;
        rq_prev = rq;
    }
    return rq_prev;
}

double fd_lambda1(const FlatTorusMetric& torus, int n) { return FdLaplacian2D(torus, n).lambda1(); }

} // namespace cusplab
