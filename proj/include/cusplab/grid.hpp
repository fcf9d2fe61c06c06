#ifndef CUSPLAB_GRID_HPP
#define CUSPLAB_GRID_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cusplab {

/// Uniform radial grid on [0, R] with step dr. R is snapped to an integer
/// number of steps. Carries the 4th-order finite-difference stencils used by
/// every radial derivative in the project (interior central, one-sided at the
/// ends) and the composite quadrature matching that order.
class RadialGrid {
public:
    RadialGrid(double R, double dr);

    double dr() const { return dr_; }
    double R() const { return R_; }
    std::size_t nodes() const { return n_ + 1; }
    std::size_t intervals() const { return n_; }
    double r(std::size_t i) const { return dr_ * static_cast<double>(i); }

    /// 4th-order first derivative of samples.
    std::vector<double> d1(std::span<const double> f) const;
    /// 4th-order second derivative of samples.
    std::vector<double> d2(std::span<const double> f) const;
    std::vector<std::complex<double>> d1(std::span<const std::complex<double>> f) const;
    std::vector<std::complex<double>> d2(std::span<const std::complex<double>> f) const;

    /// Derivatives at a single node (used by per-mode kernels).
    double d1_at(std::span<const double> f, std::size_t i) const;
    double d2_at(std::span<const double> f, std::size_t i) const;
    std::complex<double> d1_at(std::span<const std::complex<double>> f, std::size_t i) const;
    std::complex<double> d2_at(std::span<const std::complex<double>> f, std::size_t i) const;

    /// Composite Simpson integral of nodal samples over [0, R] (3/8 rule on
    /// the last cell when the interval count is odd).
    double integrate(std::span<const double> f) const;

    /// Trapezoidal integral of nodal samples.
    double trapezoid(std::span<const double> f) const;

    bool operator==(const RadialGrid& o) const { return n_ == o.n_ && dr_ == o.dr_; }

private:
    double dr_;
    double R_;
    std::size_t n_;

    // stencil_d1_[row][j]: weights on f[base(row) + j], rows 0,1 = left edge,
    // row 2 = interior (centered), rows 3,4 = right edge.
    double stencil_d1_[5][6];
    double stencil_d2_[5][6];
    int width_d1_;
    int width_d2_;

    template <class T>
    T apply_row(const double* w, int width, std::span<const T> f, std::size_t base) const;
    template <class T>
    T deriv_at(std::span<const T> f, std::size_t i, bool second) const;
    template <class T>
    std::vector<T> deriv(std::span<const T> f, bool second) const;
};

/// Fornberg finite-difference weights: derivative of order m at point x0 from
/// samples at the given nodes. Returns one weight per node.
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int m);

/// 4th-order midpoint interpolation between nodes i and i+1 of a sampled
/// function (cubic through the four surrounding nodes, clamped at the ends).
double midpoint_value(std::span<const double> f, std::size_t i);

} // namespace cusplab

#endif
