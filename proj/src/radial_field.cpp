#include "cusplab/radial_field.hpp"

#include "cusplab/errors.hpp"

#include <cmath>

namespace cusplab {

RadialTensorField::RadialTensorField(const RadialGrid& grid) : grid_(grid) {
    for (int c = 0; c < 6; ++c) {
        c_[static_cast<std::size_t>(c)].assign(grid_.nodes(), 0.0);
        c1_[static_cast<std::size_t>(c)].assign(grid_.nodes(), 0.0);
        c2_[static_cast<std::size_t>(c)].assign(grid_.nodes(), 0.0);
    }
}

RadialTensorField RadialTensorField::zero(const RadialGrid& grid) { return RadialTensorField(grid); }

RadialTensorField RadialTensorField::from_samples(const RadialGrid& grid,
                                                  std::array<std::vector<double>, 6> comps) {
    RadialTensorField f(grid);
    for (std::size_t c = 0; c < 6; ++c) {
        if (comps[c].size() != grid.nodes())
            throw GridError("radial field: component sample count mismatch");
        f.c_[c] = std::move(comps[c]);
    }
    f.refresh_derivatives();
    return f;
}

RadialTensorField RadialTensorField::from_analytic(const RadialGrid& grid,
                                                   const std::array<Profile, 6>& c,
                                                   const std::array<Profile, 6>& c1,
                                                   const std::array<Profile, 6>& c2) {
    RadialTensorField f(grid);
    for (std::size_t k = 0; k < 6; ++k) {
        for (std::size_t i = 0; i < grid.nodes(); ++i) {
            const double r = grid.r(i);
            f.c_[k][i] = c[k](r);
            f.c1_[k][i] = c1[k](r);
            f.c2_[k][i] = c2[k](r);
        }
    }
    return f;
}

void RadialTensorField::refresh_derivatives() {
    for (std::size_t c = 0; c < 6; ++c) {
        c1_[c] = grid_.d1(std::span<const double>(c_[c]));
        c2_[c] = grid_.d2(std::span<const double>(c_[c]));
    }
}

double RadialTensorField::pointwise_norm(std::size_t i) const {
    const double r = grid_.r(i);
    double acc = 0.0;
    for (std::size_t c = 0; c < 6; ++c) {
        const double H = std::exp(comp_frame_exponent[c] * r) * c_[c][i];
        acc += comp_multiplicity[c] * H * H;
    }
    return std::sqrt(acc);
}

double RadialTensorField::derivative_norm(std::size_t i, int order) const {
    const double r = grid_.r(i);
    double acc = 0.0;
    for (std::size_t c = 0; c < 6; ++c) {
        const double w = comp_frame_exponent[c];
        const double e = std::exp(w * r);
        // d/dr (e^{wr} h) = e^{wr} (h' + w h); second derivative analogous.
        double d;
        if (order == 1)
            d = e * (c1_[c][i] + w * c_[c][i]);
        else
            d = e * (c2_[c][i] + 2.0 * w * c1_[c][i] + w * w * c_[c][i]);
        acc += comp_multiplicity[c] * d * d;
    }
    return std::sqrt(acc);
}

double RadialTensorField::trace(std::size_t i) const {
    const double e2r = std::exp(2.0 * grid_.r(i));
    return c_[C33][i] + e2r * (c_[C11][i] + c_[C22][i]);
}

double RadialTensorField::trace_d1(std::size_t i) const {
    const double e2r = std::exp(2.0 * grid_.r(i));
    const double s = c_[C11][i] + c_[C22][i];
    const double s1 = c1_[C11][i] + c1_[C22][i];
    return c1_[C33][i] + e2r * (s1 + 2.0 * s);
}

double RadialTensorField::trace_d2(std::size_t i) const {
    const double e2r = std::exp(2.0 * grid_.r(i));
    const double s = c_[C11][i] + c_[C22][i];
    const double s1 = c1_[C11][i] + c1_[C22][i];
    const double s2 = c2_[C11][i] + c2_[C22][i];
    return c2_[C33][i] + e2r * (s2 + 4.0 * s1 + 4.0 * s);
}

double RadialTensorField::max_pointwise_norm() const {
    double m = 0.0;
    for (std::size_t i = 0; i < nodes(); ++i) m = std::max(m, pointwise_norm(i));
    return m;
}

RadialTensorField& RadialTensorField::operator+=(const RadialTensorField& o) {
    for (std::size_t c = 0; c < 6; ++c)
        for (std::size_t i = 0; i < nodes(); ++i) {
            c_[c][i] += o.c_[c][i];
            c1_[c][i] += o.c1_[c][i];
            c2_[c][i] += o.c2_[c][i];
        }
    return *this;
}

RadialTensorField& RadialTensorField::operator-=(const RadialTensorField& o) {
    for (std::size_t c = 0; c < 6; ++c)
        for (std::size_t i = 0; i < nodes(); ++i) {
            c_[c][i] -= o.c_[c][i];
            c1_[c][i] -= o.c1_[c][i];
            c2_[c][i] -= o.c2_[c][i];
        }
    return *this;
}

RadialTensorField& RadialTensorField::operator*=(double s) {
    for (std::size_t c = 0; c < 6; ++c)
        for (std::size_t i = 0; i < nodes(); ++i) {
            c_[c][i] *= s;
            c1_[c][i] *= s;
            c2_[c][i] *= s;
        }
    return *this;
}

TrivialEinsteinVariation TrivialEinsteinVariation::from_matrix(double v11, double v12, double v22) {
    if (v11 + v22 != 0.0)
        throw ParameterError("trivial Einstein variation: matrix must be trace-free");
    return {v11, v12};
}

double TrivialEinsteinVariation::norm() const {
    return std::sqrt(2.0 * v11_ * v11_ + 2.0 * v12_ * v12_);
}

RadialTensorField TrivialEinsteinVariation::to_field(const RadialGrid& grid) const {
    const double a = v11_, b = v12_;
    auto mk = [](double coef) {
        return RadialTensorField::Profile([coef](double r) { return coef * std::exp(-2.0 * r); });
    };
    auto zero = RadialTensorField::Profile([](double) { return 0.0; });
    std::array<RadialTensorField::Profile, 6> c{mk(a), mk(b), mk(-a), zero, zero, zero};
    std::array<RadialTensorField::Profile, 6> c1{mk(-2.0 * a), mk(-2.0 * b), mk(2.0 * a),
                                                 zero, zero, zero};
    std::array<RadialTensorField::Profile, 6> c2{mk(4.0 * a), mk(4.0 * b), mk(-4.0 * a),
                                                 zero, zero, zero};
    return RadialTensorField::from_analytic(grid, c, c1, c2);
}

RadialTensorField TrivialEinsteinVariation::to_field_sampled(const RadialGrid& grid) const {
    std::array<std::vector<double>, 6> comps;
    for (auto& v : comps) v.assign(grid.nodes(), 0.0);
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        const double e = std::exp(-2.0 * grid.r(i));
        comps[C11][i] = v11_ * e;
        comps[C12][i] = v12_ * e;
        comps[C22][i] = -v11_ * e;
    }
    return RadialTensorField::from_samples(grid, std::move(comps));
}

} // namespace cusplab
