#include "cusplab/tensor_field.hpp"

#include "cusplab/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

namespace cusplab {

TensorField::TensorField(const RadialGrid& grid, const FlatTorusMetric& torus, int K)
    : grid_(grid), torus_(torus), K_(K) {
    if (K < 0) throw ParameterError("tensor field: K must be nonnegative");
    const std::size_t side = static_cast<std::size_t>(2 * K + 1);
    nmodes_ = side * side;
    for (auto& c : coeff_) c.assign(nmodes_ * grid_.nodes(), cxd(0.0, 0.0));
}

std::size_t TensorField::mode_index(int k1, int k2) const {
    if (std::abs(k1) > K_ || std::abs(k2) > K_)
        throw DomainError("tensor field: mode outside truncation");
    const std::size_t side = static_cast<std::size_t>(2 * K_ + 1);
    return static_cast<std::size_t>(k1 + K_) * side + static_cast<std::size_t>(k2 + K_);
}

std::pair<int, int> TensorField::mode_of(std::size_t m) const {
    const std::size_t side = static_cast<std::size_t>(2 * K_ + 1);
    return {static_cast<int>(m / side) - K_, static_cast<int>(m % side) - K_};
}

std::span<const cxd> TensorField::profile(int comp, std::size_t m) const {
    return {coeff_[static_cast<std::size_t>(comp)].data() + m * nodes(), nodes()};
}

std::span<cxd> TensorField::raw_profile(int comp, std::size_t m) {
    return {coeff_[static_cast<std::size_t>(comp)].data() + m * nodes(), nodes()};
}

void TensorField::set_mode_profile(int comp, int k1, int k2, std::span<const cxd> samples) {
    if (samples.size() != nodes()) throw GridError("tensor field: profile length mismatch");
    auto dst = raw_profile(comp, mode_index(k1, k2));
    auto mirror = raw_profile(comp, mode_index(-k1, -k2));
    if (k1 == 0 && k2 == 0) {
        for (std::size_t i = 0; i < nodes(); ++i) dst[i] = cxd(samples[i].real(), 0.0);
        return;
    }
    for (std::size_t i = 0; i < nodes(); ++i) {
        dst[i] = samples[i];
        mirror[i] = std::conj(samples[i]);
    }
}

void TensorField::add_mode_profile(int comp, int k1, int k2, std::span<const cxd> samples) {
    if (samples.size() != nodes()) throw GridError("tensor field: profile length mismatch");
    auto dst = raw_profile(comp, mode_index(k1, k2));
    if (k1 == 0 && k2 == 0) {
        for (std::size_t i = 0; i < nodes(); ++i) dst[i] += cxd(samples[i].real(), 0.0);
        return;
    }
    auto mirror = raw_profile(comp, mode_index(-k1, -k2));
    for (std::size_t i = 0; i < nodes(); ++i) {
        dst[i] += samples[i];
        mirror[i] += std::conj(samples[i]);
    }
}

bool TensorField::reality_ok(double tol) const {
    for (int c = 0; c < 6; ++c) {
        for (std::size_t m = 0; m < nmodes_; ++m) {
            const auto [k1, k2] = mode_of(m);
            const auto a = profile(c, m);
            const auto b = profile(c, mode_index(-k1, -k2));
            for (std::size_t i = 0; i < nodes(); ++i) {
                if (std::abs(a[i] - std::conj(b[i])) > tol) return false;
            }
        }
    }
    return true;
}

RadialTensorField TensorField::zero_mode_slice() const {
    std::array<std::vector<double>, 6> comps;
    const std::size_t m0 = mode_index(0, 0);
    for (int c = 0; c < 6; ++c) {
        auto p = profile(c, m0);
        comps[static_cast<std::size_t>(c)].resize(nodes());
        for (std::size_t i = 0; i < nodes(); ++i)
            comps[static_cast<std::size_t>(c)][i] = p[i].real();
    }
    return RadialTensorField::from_samples(grid_, std::move(comps));
}

TensorField& TensorField::operator+=(const TensorField& o) {
    if (!same_layout(o)) throw GridError("tensor field: layout mismatch");
    for (int c = 0; c < 6; ++c)
        for (std::size_t i = 0; i < coeff_[static_cast<std::size_t>(c)].size(); ++i)
            coeff_[static_cast<std::size_t>(c)][i] += o.coeff_[static_cast<std::size_t>(c)][i];
    return *this;
}

TensorField& TensorField::operator-=(const TensorField& o) {
    if (!same_layout(o)) throw GridError("tensor field: layout mismatch");
    for (int c = 0; c < 6; ++c)
        for (std::size_t i = 0; i < coeff_[static_cast<std::size_t>(c)].size(); ++i)
            coeff_[static_cast<std::size_t>(c)][i] -= o.coeff_[static_cast<std::size_t>(c)][i];
    return *this;
}

TensorField& TensorField::operator*=(double s) {
    for (int c = 0; c < 6; ++c)
        for (auto& z : coeff_[static_cast<std::size_t>(c)]) z *= s;
    return *this;
}

double TensorField::level_area(std::size_t i) const {
    return std::exp(-2.0 * grid_.r(i)) * torus_.area();
}

RadialTensorField average(const TensorField& h) { return h.zero_mode_slice(); }

TensorField embed(const RadialTensorField& h, const FlatTorusMetric& torus, int K) {
    TensorField out(h.grid(), torus, K);
    std::vector<cxd> prof(h.nodes());
    for (int c = 0; c < 6; ++c) {
        for (std::size_t i = 0; i < h.nodes(); ++i) prof[i] = cxd(h.comp(c)[i], 0.0);
        out.set_mode_profile(c, 0, 0, prof);
    }
    return out;
}

double level_l2_sq(const TensorField& h, std::size_t i) {
    const double r = h.grid().r(i);
    double acc = 0.0;
    for (int c = 0; c < 6; ++c) {
        const double w = std::exp(2.0 * comp_frame_exponent[c] * r);
        double s = 0.0;
        for (std::size_t m = 0; m < h.mode_count(); ++m) s += std::norm(h.profile(c, m)[i]);
        acc += comp_multiplicity[c] * w * s;
    }
    return acc * h.level_area(i);
}

double level_fluctuation_l2_sq(const TensorField& h, std::size_t i) {
    const double r = h.grid().r(i);
    const std::size_t m0 = h.mode_index(0, 0);
    double acc = 0.0;
    for (int c = 0; c < 6; ++c) {
        const double w = std::exp(2.0 * comp_frame_exponent[c] * r);
        double s = 0.0;
        for (std::size_t m = 0; m < h.mode_count(); ++m) {
            if (m == m0) continue;
            s += std::norm(h.profile(c, m)[i]);
        }
        acc += comp_multiplicity[c] * w * s;
    }
    return acc * h.level_area(i);
}

double level_fiber_grad_l2_sq(const TensorField& h, std::size_t i) {
    const double r = h.grid().r(i);
    double acc = 0.0;
    for (int c = 0; c < 6; ++c) {
        const double w = std::exp(2.0 * (comp_frame_exponent[c] + 1.0) * r);
        double s = 0.0;
        for (std::size_t m = 0; m < h.mode_count(); ++m) {
            const auto [k1, k2] = h.mode_of(m);
            if (k1 == 0 && k2 == 0) continue;
            s += h.torus().mode_eigenvalue(k1, k2) * std::norm(h.profile(c, m)[i]);
        }
        acc += comp_multiplicity[c] * w * s;
    }
    return acc * h.level_area(i);
}

TensorField random_field(const RadialGrid& grid, const FlatTorusMetric& torus, int K, Rng& rng,
                         const RandomFieldOptions& opt) {
    TensorField out(grid, torus, K);
    const int kact = std::min(opt.active_kmax, K);
    std::vector<cxd> prof(grid.nodes());
    for (int c = 0; c < 6; ++c) {
        const int nmodes = opt.modes_per_component + (opt.include_zero_mode ? 1 : 0);
        for (int m = 0; m < nmodes; ++m) {
            int k1 = 0, k2 = 0;
            if (m > 0 || !opt.include_zero_mode) {
                if (kact == 0) break;
                do {
                    k1 = static_cast<int>(rng.index(static_cast<std::uint64_t>(2 * kact + 1))) - kact;
                    k2 = static_cast<int>(rng.index(static_cast<std::uint64_t>(2 * kact + 1))) - kact;
                } while (k1 == 0 && k2 == 0);
            }
            const double a = rng.uniform(opt.decay_min, opt.decay_max);
            const double omega = rng.uniform(0.5, 2.0);
            const double phase = rng.uniform(0.0, 6.283185307179586);
            const double amp = opt.amplitude * rng.symmetric();
            const double cphase = rng.uniform(0.0, 6.283185307179586);
            const cxd z = amp * cxd(std::cos(cphase), (k1 == 0 && k2 == 0) ? 0.0 : std::sin(cphase));
            for (std::size_t i = 0; i < grid.nodes(); ++i) {
                const double r = grid.r(i);
                prof[i] = z * std::exp(-a * r) * (1.0 + 0.5 * std::sin(omega * r + phase));
            }
            out.add_mode_profile(c, k1, k2, prof);
        }
    }
    return out;
}

namespace {
constexpr char kMagic[8] = {'C', 'U', 'S', 'P', 'F', 'L', 'D', '1'};
}

void save_field(const TensorField& h, const std::string& path) {
    nlohmann::ordered_json header;
    header["gram"] = {h.torus().g11(), h.torus().g12(), h.torus().g22()};
    header["R"] = h.grid().R();
    header["dr"] = h.grid().dr();
    header["K"] = h.K();
    const std::string hs = header.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("save_field: cannot open " + path);
    out.write(kMagic, 8);
    const std::uint64_t hlen = hs.size();
    out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    for (int c = 0; c < 6; ++c) {
        for (std::size_t m = 0; m < h.mode_count(); ++m) {
            auto p = h.profile(c, m);
            out.write(reinterpret_cast<const char*>(p.data()),
                      static_cast<std::streamsize>(p.size() * sizeof(cxd)));
        }
    }
    if (!out) throw DataError("save_field: write failed for " + path);
}

TensorField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("load_field: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != std::string(kMagic, 8))
        throw DataError("load_field: bad magic in " + path);
    std::uint64_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    std::string hs(hlen, '\0');
    in.read(hs.data(), static_cast<std::streamsize>(hlen));
    const auto header = nlohmann::json::parse(hs);
    const auto gram = header.at("gram");
    FlatTorusMetric torus(gram.at(0).get<double>(), gram.at(1).get<double>(), gram.at(2).get<double>());
    RadialGrid grid(header.at("R").get<double>(), header.at("dr").get<double>());
    TensorField h(grid, torus, header.at("K").get<int>());
    for (int c = 0; c < 6; ++c) {
        for (std::size_t m = 0; m < h.mode_count(); ++m) {
            auto p = h.raw_profile(c, m);
            in.read(reinterpret_cast<char*>(p.data()),
                    static_cast<std::streamsize>(p.size() * sizeof(cxd)));
        }
    }
    if (!in) throw DataError("load_field: truncated payload in " + path);
    return h;
}

void export_radial_csv(const TensorField& h, const std::string& path) {
    const auto slice = h.zero_mode_slice();
    std::ofstream out(path);
    if (!out) throw DataError("export_radial_csv: cannot open " + path);
    out << "r,h11,h12,h22,h13,h23,h33,norm\n";
    out.precision(17);
    for (std::size_t i = 0; i < slice.nodes(); ++i) {
        out << slice.grid().r(i);
        for (int c = 0; c < 6; ++c) out << ',' << slice.comp(c)[i];
        out << ',' << slice.pointwise_norm(i) << '\n';
    }
}

} // namespace cusplab
