#ifndef CUSPLAB_FD_LAPLACE_HPP
#define CUSPLAB_FD_LAPLACE_HPP

#include "cusplab/flat_torus.hpp"

#include <vector>

namespace cusplab {

/// 4th-order periodic finite-difference Laplace-Beltrami operator on the
/// n x n lattice-coordinate grid of a flat torus:
///   L u = -( i11 Dxx + 2 i12 Dx Dy + i22 Dyy ) u,  [i..] = gram^{-1}.
/// Used as the independent eigenvalue oracle against the dual-lattice
/// formula; never consulted by the production lambda1 path.
class FdLaplacian2D {
public:
    FdLaplacian2D(const FlatTorusMetric& torus, int n);

    int n() const { return n_; }

    void matvec(const std::vector<double>& u, std::vector<double>& out) const;

    /// Smallest nonzero eigenvalue by deflated inverse iteration; inner
    /// solves by conjugate gradients on the mean-zero subspace.
    double lambda1() const;

private:
    int n_;
    double i11_, i12_, i22_;
    double h_;

    void d1(const std::vector<double>& u, std::vector<double>& out, bool xdir) const;
    void d2(const std::vector<double>& u, std::vector<double>& out, bool xdir) const;
};

/// Convenience wrapper: finite-difference lambda1 on an n x n fiber grid.
double fd_lambda1(const FlatTorusMetric& torus, int n = 64);

} // namespace cusplab

#endif
