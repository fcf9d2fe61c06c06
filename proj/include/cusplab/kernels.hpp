#ifndef CUSPLAB_KERNELS_HPP
#define CUSPLAB_KERNELS_HPP

#include "cusplab/tensor_field.hpp"

#include <vector>

namespace cusplab {

/// Per-level fiber statistics of a tensor field under the frame-weighted
/// pointwise norms: sups and integrals of |h|, |h|_C1, |h|_C2 over the level
/// torus, evaluated on a uniform fiber grid of eval_grid_size(K)^2 points.
struct LevelScan {
    double sup_c0 = 0.0;
    double sup_c1 = 0.0;
    double sup_c2 = 0.0;
    double int_c0_sq = 0.0;
    double int_c1_sq = 0.0;
    double int_c2_sq = 0.0;
    double int_c2 = 0.0;
};

struct FieldScan {
    std::vector<LevelScan> level;

    double max_sup_c0() const;
    double max_sup_c1() const;
    double max_sup_c2() const;
};

/// Fiber sampling resolution used for sups and non-quadratic integrals.
/// Quadratic integrands of fiber degree <= 2K are integrated exactly at this
/// resolution (no aliased frequency is a multiple of M).
int eval_grid_size(int K);

/// Scans every level in parallel (OpenMP over radial nodes; per-node work is
/// independent, so the result is thread-count invariant).
FieldScan scan_field(const TensorField& h);

/// Serial reference: direct mode summation at every fiber point instead of
/// the separable transform. Kept for testing the fast path.
FieldScan scan_field_reference(const TensorField& h);

/// Scan of a single level (used for boundary data at r = 0).
LevelScan scan_level(const TensorField& h, std::size_t node);

} // namespace cusplab

#endif
