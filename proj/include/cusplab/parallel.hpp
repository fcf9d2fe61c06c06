#ifndef CUSPLAB_PARALLEL_HPP
#define CUSPLAB_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cusplab {

/// Number of OpenMP threads available (1 without OpenMP).
int hardware_threads();

/// Deterministic chunked sum: partial sums are accumulated per fixed-size
/// chunk and combined in chunk order, so the result is independent of the
/// thread count and bit-identical to the serial evaluation of the same
/// chunking. All norm reductions go through this.
double chunked_sum(std::size_t n, const std::function<double(std::size_t)>& term);

/// Serial reference for chunked_sum (same chunking, no OpenMP).
double chunked_sum_serial(std::size_t n, const std::function<double(std::size_t)>& term);

/// Parallel loop over [0, n) with independent bodies (per-index writes only).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace cusplab

#endif
