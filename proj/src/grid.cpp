#include "cusplab/grid.hpp"

#include "cusplab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cusplab {

std::vector<double> fd_weights(double x0, std::span<const double> nodes, int m) {
    // Fornberg's recursion, Math. Comp. 51 (1988).
    const int n = static_cast<int>(nodes.size()) - 1;
    std::vector<std::vector<std::vector<double>>> delta(
        static_cast<std::size_t>(m + 1),
        std::vector<std::vector<double>>(nodes.size(), std::vector<double>(nodes.size(), 0.0)));
    delta[0][0][0] = 1.0;
    double c1 = 1.0;
    for (int i = 1; i <= n; ++i) {
        double c2 = 1.0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            for (int k = 0; k <= std::min(i, m); ++k) {
                const double dk = (k > 0) ? delta[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)] : 0.0;
                delta[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    ((nodes[static_cast<std::size_t>(i)] - x0) * delta[static_cast<std::size_t>(k)][static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)] - k * dk) / c3;
            }
        }
        for (int k = 0; k <= std::min(i, m); ++k) {
            const double dk = (k > 0) ? delta[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(i - 1)] : 0.0;
            delta[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] =
                c1 / c2 * (k * dk - (nodes[static_cast<std::size_t>(i - 1)] - x0) * delta[static_cast<std::size_t>(k)][static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(i - 1)]);
        }
        c1 = c2;
    }
    std::vector<double> w(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j)
        w[j] = delta[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)][j];
    return w;
}

namespace {

// Builds one stencil row: `width` unit-spaced nodes, derivative order m at
// integer offset x0 within the window.
void make_row(double* out, int width, double x0, int m) {
    std::vector<double> xs(static_cast<std::size_t>(width));
    for (int j = 0; j < width; ++j) xs[static_cast<std::size_t>(j)] = j;
    auto w = fd_weights(x0, xs, m);
    for (int j = 0; j < 6; ++j) out[j] = (j < width) ? w[static_cast<std::size_t>(j)] : 0.0;
}

} // namespace

RadialGrid::RadialGrid(double R, double dr) {
    if (!(dr > 0.0)) throw ParameterError("grid: dr must be positive");
    if (!(R >= 5.0 * dr)) throw ParameterError("grid: R must be at least 5*dr");
    n_ = static_cast<std::size_t>(std::llround(R / dr));
    dr_ = dr;
    R_ = dr * static_cast<double>(n_);
    if (nodes() < 6) throw GridError("grid: too few nodes for 4th-order stencils");

    // First derivative: 5-node windows everywhere (centered in the interior,
    // one-sided at the two nodes on each edge). Second derivative: centered
    // 5-node interior stencil, 6-node one-sided edge stencils; all 4th order.
    width_d1_ = 5;
    width_d2_ = 6;
    make_row(stencil_d1_[0], 5, 0.0, 1);
    make_row(stencil_d1_[1], 5, 1.0, 1);
    make_row(stencil_d1_[2], 5, 2.0, 1);
    make_row(stencil_d1_[3], 5, 3.0, 1);
    make_row(stencil_d1_[4], 5, 4.0, 1);
    make_row(stencil_d2_[0], 6, 0.0, 2);
    make_row(stencil_d2_[1], 6, 1.0, 2);
    make_row(stencil_d2_[2], 5, 2.0, 2);
    make_row(stencil_d2_[3], 6, 4.0, 2);
    make_row(stencil_d2_[4], 6, 5.0, 2);
}

template <class T>
T RadialGrid::apply_row(const double* w, int width, std::span<const T> f, std::size_t base) const {
    T acc = w[0] * f[base];
    for (int j = 1; j < width; ++j) acc += w[j] * f[base + static_cast<std::size_t>(j)];
    return acc;
}

template <class T>
T RadialGrid::deriv_at(std::span<const T> f, std::size_t i, bool second) const {
    const auto& st = second ? stencil_d2_ : stencil_d1_;
    const double scale = second ? 1.0 / (dr_ * dr_) : 1.0 / dr_;
    const std::size_t N = f.size();
    int row;
    std::size_t base;
    int width;
    if (i < 2) {
        row = static_cast<int>(i);
        base = 0;
        width = second ? 6 : 5;
    } else if (i + 2 >= N) {
        row = (i == N - 1) ? 4 : 3;
        width = second ? 6 : 5;
        base = N - static_cast<std::size_t>(width);
    } else {
        row = 2;
        width = 5;
        base = i - 2;
    }
    return scale * apply_row(st[row], width, f, base);
}

template <class T>
std::vector<T> RadialGrid::deriv(std::span<const T> f, bool second) const {
    if (f.size() != nodes()) throw GridError("grid: sample count does not match node count");
    std::vector<T> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = deriv_at(f, i, second);
    return out;
}

std::vector<double> RadialGrid::d1(std::span<const double> f) const { return deriv(f, false); }
std::vector<double> RadialGrid::d2(std::span<const double> f) const { return deriv(f, true); }
std::vector<std::complex<double>> RadialGrid::d1(std::span<const std::complex<double>> f) const {
    return deriv(f, false);
}
std::vector<std::complex<double>> RadialGrid::d2(std::span<const std::complex<double>> f) const {
    return deriv(f, true);
}
double RadialGrid::d1_at(std::span<const double> f, std::size_t i) const { return deriv_at(f, i, false); }
double RadialGrid::d2_at(std::span<const double> f, std::size_t i) const { return deriv_at(f, i, true); }
std::complex<double> RadialGrid::d1_at(std::span<const std::complex<double>> f, std::size_t i) const {
    return deriv_at(f, i, false);
}
std::complex<double> RadialGrid::d2_at(std::span<const std::complex<double>> f, std::size_t i) const {
    return deriv_at(f, i, true);
}

double RadialGrid::integrate(std::span<const double> f) const {
    if (f.size() != nodes()) throw GridError("grid: sample count does not match node count");
    const std::size_t m = intervals();
    // composite Boole cells, remainder covered by Simpson / 3-8 cells
    std::size_t rem = m % 4;
    std::size_t head = m - rem;
    if (rem == 1) { // 5 leftover intervals split as 2 + 3
        head -= 4;
        rem = 5;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 4 <= head; i += 4)
        acc += 2.0 * dr_ / 45.0 *
               (7.0 * f[i] + 32.0 * f[i + 1] + 12.0 * f[i + 2] + 32.0 * f[i + 3] +
                7.0 * f[i + 4]);
    std::size_t i = head;
    if (rem == 2 || rem == 5) {
        acc += dr_ / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
        i += 2;
    }
    if (rem == 3 || rem == 5) {
        acc += 3.0 * dr_ / 8.0 * (f[i] + 3.0 * f[i + 1] + 3.0 * f[i + 2] + f[i + 3]);
    }
    return acc;
}

double RadialGrid::trapezoid(std::span<const double> f) const {
    if (f.size() != nodes()) throw GridError("grid: sample count does not match node count");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) acc += 0.5 * dr_ * (f[i] + f[i + 1]);
    return acc;
}

double midpoint_value(std::span<const double> f, std::size_t i) {
    const std::size_t N = f.size();
    if (i + 1 >= N) throw GridError("midpoint: interval index out of range");
    if (i == 0) return (5.0 * f[0] + 15.0 * f[1] - 5.0 * f[2] + f[3]) / 16.0;
    if (i + 2 >= N) return (5.0 * f[N - 1] + 15.0 * f[N - 2] - 5.0 * f[N - 3] + f[N - 4]) / 16.0;
    return (-f[i - 1] + 9.0 * f[i] + 9.0 * f[i + 1] - f[i + 2]) / 16.0;
}

} // namespace cusplab
