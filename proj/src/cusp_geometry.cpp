#include "cusplab/cusp_geometry.hpp"

#include "cusplab/errors.hpp"
#include "cusplab/kernels.hpp"
#include "cusplab/rng.hpp"

#include <cmath>

namespace cusplab {

CuspMetric::CuspMetric(const FlatTorusMetric& flat, double R)
    : flat_(flat), R_(R), flat_diameter_(flat.diameter()) {
    if (!(R > 0.0)) throw ParameterError("cusp metric: R must be positive");
}

double CuspMetric::level_torus_diameter(double r) const {
    if (r < 0.0 || r > R_) throw DomainError("level torus: r outside [0, R]");
    return std::exp(-r) * flat_diameter_;
}

double CuspMetric::level_torus_area(double r) const {
    if (r < 0.0 || r > R_) throw DomainError("level torus: r outside [0, R]");
    return std::exp(-2.0 * r) * flat_.area();
}

PerturbationEnvelope::PerturbationEnvelope(double epsilon0, double eta, std::uint64_t seed)
    : epsilon0(epsilon0), eta(eta), seed(seed) {
    if (!(epsilon0 >= 0.0)) throw ParameterError("perturbation envelope: epsilon0 must be >= 0");
    if (!(eta > 1.0)) throw ParameterError("perturbation envelope: eta must be > 1");
}

TensorField synthesize_perturbation(const CuspMetric& cusp, const PerturbationEnvelope& env,
                                    const RadialGrid& grid, int K) {
    TensorField p(grid, cusp.flat(), K);
    if (env.epsilon0 == 0.0) return p;

    Rng rng(env.seed);
    const int kact = std::min(2, K);
    std::vector<cxd> prof(grid.nodes());
    for (int c = 0; c < 6; ++c) {
        for (int k1 = 0; k1 <= kact; ++k1) {
            for (int k2 = (k1 == 0 ? 0 : -kact); k2 <= kact; ++k2) {
                const double amp = (0.5 + 0.5 * rng.uniform()) * (rng.coin() ? 1.0 : -1.0);
                const double phase = rng.uniform(0.0, 6.283185307179586);
                const bool zero_mode = (k1 == 0 && k2 == 0);
                const double decay = zero_mode ? env.eta : env.eta + 2.0;
                const cxd z = amp * cxd(std::cos(phase), zero_mode ? 0.0 : std::sin(phase));
                for (std::size_t i = 0; i < grid.nodes(); ++i)
                    prof[i] = z * std::exp(-decay * grid.r(i));
                p.add_mode_profile(c, k1, k2, prof);
            }
        }
    }

    // Rescale so the measured C2 envelope touches epsilon0 e^{-eta r} at its
    // worst node and stays below it everywhere else.
    const FieldScan scan = scan_field(p);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.nodes(); ++i)
        worst = std::max(worst, scan.level[i].sup_c2 * std::exp(env.eta * grid.r(i)));
    if (worst > 0.0) p *= env.epsilon0 / worst;
    return p;
}

} // namespace cusplab
