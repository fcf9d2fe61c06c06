#ifndef CUSPLAB_TENSOR_FIELD_HPP
#define CUSPLAB_TENSOR_FIELD_HPP

#include "cusplab/flat_torus.hpp"
#include "cusplab/grid.hpp"
#include "cusplab/radial_field.hpp"
#include "cusplab/rng.hpp"

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace cusplab {

using cxd = std::complex<double>;

/// Symmetric (0,2)-tensor field on T^2 x [0,R] in cusp coordinates, stored as
/// truncated Fourier series per component: for component c and mode
/// k = (k1,k2) with |k1|,|k2| <= K, a complex radial profile on the grid.
/// Components are with respect to Euclidean cusp coordinates; the torus
/// periodicity (and hence the modes) comes from the lattice of `torus`.
/// Reality c(-k) = conj(c(k)) is enforced by the mutation API.
class TensorField {
public:
    TensorField(const RadialGrid& grid, const FlatTorusMetric& torus, int K);

    const RadialGrid& grid() const { return grid_; }
    const FlatTorusMetric& torus() const { return torus_; }
    int K() const { return K_; }
    std::size_t mode_count() const { return nmodes_; }
    std::size_t nodes() const { return grid_.nodes(); }

    std::size_t mode_index(int k1, int k2) const;
    std::pair<int, int> mode_of(std::size_t m) const;

    /// Radial profile of one component at one mode (nodes() samples).
    std::span<const cxd> profile(int comp, std::size_t m) const;
    std::span<cxd> raw_profile(int comp, std::size_t m);

    /// Sets the profile at +k and the conjugate at -k. The k = 0 profile is
    /// forced real.
    void set_mode_profile(int comp, int k1, int k2, std::span<const cxd> samples);
    void add_mode_profile(int comp, int k1, int k2, std::span<const cxd> samples);

    bool reality_ok(double tol = 0.0) const;

    /// Zero-mode slice as a radial field (the averaging operator).
    RadialTensorField zero_mode_slice() const;

    TensorField& operator+=(const TensorField& o);
    TensorField& operator-=(const TensorField& o);
    TensorField& operator*=(double s);
    friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
    friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
    friend TensorField operator*(double s, TensorField a) { return a *= s; }

    bool same_layout(const TensorField& o) const {
        return grid_ == o.grid_ && torus_ == o.torus_ && K_ == o.K_;
    }

    /// Fiber area element at node i: e^{-2r} * area(flat).
    double level_area(std::size_t i) const;

private:
    RadialGrid grid_;
    FlatTorusMetric torus_;
    int K_;
    std::size_t nmodes_;
    std::array<std::vector<cxd>, 6> coeff_; // [comp][mode*nodes + node]
};

/// Fiberwise mean over level tori: the zero Fourier mode of every component.
RadialTensorField average(const TensorField& h);

/// Embeds a radial field as the k = 0 slice of a Fourier field.
TensorField embed(const RadialTensorField& h, const FlatTorusMetric& torus, int K);

/// Exact (Parseval) level integrals at node i.
double level_l2_sq(const TensorField& h, std::size_t i);          // int_{T(r)} |h|^2
double level_fluctuation_l2_sq(const TensorField& h, std::size_t i); // int |h - avg h|^2
double level_fiber_grad_l2_sq(const TensorField& h, std::size_t i);  // int |D_fib h|^2

/// Smooth seeded random field: a handful of active modes with |k|_inf <=
/// active_kmax, radial profiles built from decaying exponentials times
/// bounded oscillations.
struct RandomFieldOptions {
    int active_kmax = 2;
    int modes_per_component = 3;
    double decay_min = 0.2;
    double decay_max = 1.5;
    double amplitude = 1.0;
    bool include_zero_mode = true;
};
TensorField random_field(const RadialGrid& grid, const FlatTorusMetric& torus, int K, Rng& rng,
                         const RandomFieldOptions& opt = {});

/// Binary (de)serialization: JSON header (gram, R, dr, K) + columnar payload
/// ordered (component, mode, node).
void save_field(const TensorField& h, const std::string& path);
TensorField load_field(const std::string& path);

/// CSV of the radial (k = 0) slice: r, six components, pointwise norm.
void export_radial_csv(const TensorField& h, const std::string& path);

} // namespace cusplab

#endif
