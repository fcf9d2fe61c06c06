#ifndef CUSPLAB_FLAT_TORUS_HPP
#define CUSPLAB_FLAT_TORUS_HPP

#include <array>

namespace cusplab {

/// Flat metric on the 2-torus R^2 / Lambda, stored as the Gram matrix of a
/// lattice basis (g11 = |b1|^2, g12 = b1.b2, g22 = |b2|^2). The torus is
/// parametrised by lattice coordinates u in [0,1)^2 with x = u1 b1 + u2 b2.
///
/// Diameter is the covering radius of the lattice, located by enumerating
/// circumcentres of lattice-point triples with |k|_inf <= 3 (sufficient for
/// condition numbers up to 25; see lambda1() for the matching dual search).
class FlatTorusMetric {
public:
    FlatTorusMetric(double g11, double g12, double g22);

    static FlatTorusMetric square(double side) { return FlatTorusMetric(side * side, 0.0, side * side); }

    double g11() const { return g11_; }
    double g12() const { return g12_; }
    double g22() const { return g22_; }

    double det() const { return g11_ * g22_ - g12_ * g12_; }
    double area() const;
    double condition_number() const;

    /// Covering radius of the lattice = diameter of the flat torus.
    double diameter() const;

    /// First nonzero Laplace eigenvalue 4 pi^2 min_{k != 0} k^T gram^{-1} k.
    /// Checks (and throws if violated) the scaled lower bound
    /// lambda1 * diameter^2 >= e^{-2}.
    double lambda1() const;

    /// Integer coordinates of a shortest dual-lattice vector.
    std::array<int, 2> lambda1_mode() const;

    /// Cholesky basis rows: b1 = (sqrt(g11), 0), b2 = (g12/|b1|, sqrt(det)/|b1|).
    std::array<std::array<double, 2>, 2> basis() const;

    /// Inverse basis; dual_vector(k) = 2 pi B^{-1} k gives the Euclidean
    /// gradient components of the mode exp(2 pi i k.u).
    std::array<double, 2> dual_vector(int k1, int k2) const;

    /// |dual_vector(k)|^2 = 4 pi^2 k^T gram^{-1} k.
    double mode_eigenvalue(int k1, int k2) const;

    bool operator==(const FlatTorusMetric& o) const {
        return g11_ == o.g11_ && g12_ == o.g12_ && g22_ == o.g22_;
    }

private:
    double g11_, g12_, g22_;
};

} // namespace cusplab

#endif
