#include "cusplab/averaging.hpp"

#include "cusplab/errors.hpp"
#include "cusplab/kernels.hpp"

#include <cmath>

namespace cusplab {

AveragingPropertyReport check_averaging_properties(const TensorField& h) {
    AveragingPropertyReport rep;
    const auto& grid = h.grid();
    const RadialTensorField avg = average(h);
    const TensorField fluct = h - embed(avg, h.torus(), h.K());
    const FieldScan scan_h = scan_field(h);
    const FieldScan scan_f = scan_field(fluct);
    const double D = h.torus().diameter();

    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        if (!std::isfinite(scan_h.level[i].int_c2_sq) || !std::isfinite(scan_h.level[i].sup_c2))
            throw DataError("averaging check: non-finite samples");
        const double sup = scan_h.level[i].sup_c0;
        const double avg_norm = avg.pointwise_norm(i);
        if (sup > 0.0) rep.bound_constant = std::max(rep.bound_constant, avg_norm / sup);

        const double denom = D * std::exp(-grid.r(i)) * scan_h.level[i].sup_c1;
        if (denom > 0.0)
            rep.fluctuation_constant =
                std::max(rep.fluctuation_constant, scan_f.level[i].sup_c0 / denom);
    }

    // Radial-derivative commutation: FD of the averaged components against
    // the zero mode of the FD'd components. Both paths run the same stencil
    // on the same numbers, so the deviation is pure rounding.
    for (int c = 0; c < 6; ++c) {
        const std::size_t m0 = h.mode_index(0, 0);
        const auto prof = h.profile(c, m0);
        for (std::size_t i = 0; i < grid.nodes(); ++i) {
            const double via_avg = avg.comp_d1(c)[i];
            const double via_field = grid.d1_at(prof, i).real();
            rep.radial_derivative_deviation =
                std::max(rep.radial_derivative_deviation, std::abs(via_avg - via_field));
        }
    }

    // Trace commutation: tr(avg h) against the zero mode of tr(h).
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        const double e2r = std::exp(2.0 * grid.r(i));
        const std::size_t m0 = h.mode_index(0, 0);
        const double tr_avg = avg.trace(i);
        const double avg_tr = h.profile(C33, m0)[i].real() +
                              e2r * (h.profile(C11, m0)[i].real() + h.profile(C22, m0)[i].real());
        rep.trace_deviation = std::max(rep.trace_deviation, std::abs(tr_avg - avg_tr));
    }
    return rep;
}

} // namespace cusplab
