#ifndef CUSPLAB_RADIAL_FIELD_HPP
#define CUSPLAB_RADIAL_FIELD_HPP

#include "cusplab/grid.hpp"

#include <array>
#include <functional>
#include <vector>

namespace cusplab {

/// Component order for symmetric (0,2)-tensors in cusp coordinates
/// (x^1, x^2, r). Only six components are stored; symmetry is structural.
enum Comp : int { C11 = 0, C12 = 1, C22 = 2, C13 = 3, C23 = 4, C33 = 5 };

/// Index-pair multiplicity of each stored component in full index sums.
constexpr double comp_multiplicity[6] = {1.0, 2.0, 1.0, 2.0, 2.0, 1.0};

/// Frame weight exponent w: the orthonormal-frame component of h at radius r
/// is e^{w r} h_c (w = 2 for fiber-fiber, 1 for fiber-radial, 0 for radial).
constexpr double comp_frame_exponent[6] = {2.0, 2.0, 2.0, 1.0, 1.0, 0.0};

/// Symmetric (0,2)-tensor field depending only on r: six coefficient
/// functions on the radial grid with first and second radial derivative
/// samples maintained alongside.
///
/// Pointwise norms follow the orthonormal-frame convention: with
/// H_ab = e^{w r} h_ab the frame components,
///   |h|^2        = sum_ab mult * H_ab^2,
///   |Dh|^2       = sum_ab mult * (d/dr H_ab)^2   (fields are radial),
///   |h|_C1       = |h| + |Dh|,   |h|_C2 = |h| + |Dh| + |D^2 h|.
class RadialTensorField {
public:
    static RadialTensorField zero(const RadialGrid& grid);

    /// Builds from nodal samples; derivatives by 4th-order finite differences.
    static RadialTensorField from_samples(const RadialGrid& grid,
                                          std::array<std::vector<double>, 6> comps);

    /// Builds from analytic callables c(r), c'(r), c''(r) per component.
    using Profile = std::function<double(double)>;
    static RadialTensorField from_analytic(const RadialGrid& grid,
                                           const std::array<Profile, 6>& c,
                                           const std::array<Profile, 6>& c1,
                                           const std::array<Profile, 6>& c2);

    const RadialGrid& grid() const { return grid_; }
    std::size_t nodes() const { return grid_.nodes(); }

    const std::vector<double>& comp(int c) const { return c_[static_cast<std::size_t>(c)]; }
    const std::vector<double>& comp_d1(int c) const { return c1_[static_cast<std::size_t>(c)]; }
    const std::vector<double>& comp_d2(int c) const { return c2_[static_cast<std::size_t>(c)]; }
    std::vector<double>& mutable_comp(int c) { return c_[static_cast<std::size_t>(c)]; }

    /// Recompute derivative samples from the value samples.
    void refresh_derivatives();

    /// Pointwise C0 norm at node i (frame-weighted, see class comment).
    double pointwise_norm(std::size_t i) const;
    /// Frame-weighted norm of the radial-derivative tensor at node i.
    double derivative_norm(std::size_t i, int order) const;
    double c1_norm(std::size_t i) const { return pointwise_norm(i) + derivative_norm(i, 1); }
    double c2_norm(std::size_t i) const {
        return pointwise_norm(i) + derivative_norm(i, 1) + derivative_norm(i, 2);
    }

    /// Trace with respect to the cusp metric: h33 + e^{2r}(h11 + h22).
    double trace(std::size_t i) const;
    double trace_d1(std::size_t i) const;
    double trace_d2(std::size_t i) const;

    double max_pointwise_norm() const;

    RadialTensorField& operator+=(const RadialTensorField& o);
    RadialTensorField& operator-=(const RadialTensorField& o);
    RadialTensorField& operator*=(double s);
    friend RadialTensorField operator+(RadialTensorField a, const RadialTensorField& b) { return a += b; }
    friend RadialTensorField operator-(RadialTensorField a, const RadialTensorField& b) { return a -= b; }
    friend RadialTensorField operator*(double s, RadialTensorField a) { return a *= s; }

private:
    explicit RadialTensorField(const RadialGrid& grid);
    RadialGrid grid_;
    std::array<std::vector<double>, 6> c_, c1_, c2_;
};

/// Trace-free constant matrix v_ij inducing the field v = e^{-2r} v_ij dx^i dx^j.
/// The trace-zero constraint v11 + v22 = 0 is enforced exactly at
/// construction, so the off-diagonal pair (v11, v12) determines the matrix.
class TrivialEinsteinVariation {
public:
    TrivialEinsteinVariation() : v11_(0.0), v12_(0.0) {}
    TrivialEinsteinVariation(double v11, double v12) : v11_(v11), v12_(v12) {}

    /// Construction from a full matrix rejects any nonzero trace.
    static TrivialEinsteinVariation from_matrix(double v11, double v12, double v22);

    double v11() const { return v11_; }
    double v12() const { return v12_; }
    double v22() const { return -v11_; }

    bool is_zero() const { return v11_ == 0.0 && v12_ == 0.0; }

    /// Constant pointwise norm sqrt(v11^2 + 2 v12^2 + v22^2).
    double norm() const;

    /// Induced radial field with exact analytic derivatives.
    RadialTensorField to_field(const RadialGrid& grid) const;

    /// Same field but built through the sampled (finite-difference) path.
    RadialTensorField to_field_sampled(const RadialGrid& grid) const;

    TrivialEinsteinVariation operator-(const TrivialEinsteinVariation& o) const {
        return {v11_ - o.v11_, v12_ - o.v12_};
    }

private:
    double v11_, v12_;
};

} // namespace cusplab

#endif
