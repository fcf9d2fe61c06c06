#ifndef CUSPLAB_AVERAGING_HPP
#define CUSPLAB_AVERAGING_HPP

#include "cusplab/tensor_field.hpp"

namespace cusplab {

/// Measured constants for the defining properties of the fiberwise averaging
/// operator. Each entry is the smallest empirical constant over the grid.
struct AveragingPropertyReport {
    /// |avg h|(r) <= c * max_{T(r)} |h|.
    double bound_constant = 0.0;
    /// Max deviation between d/dr(avg h) and avg(d/dr h), discrete radial FD.
    double radial_derivative_deviation = 0.0;
    /// Max deviation between tr(avg h) and avg(tr h).
    double trace_deviation = 0.0;
    /// |h - avg h|(x) <= c * D e^{-r} max_{T(r)} |h|_C1, D = diam(flat).
    double fluctuation_constant = 0.0;
};

AveragingPropertyReport check_averaging_properties(const TensorField& h);

} // namespace cusplab

#endif
