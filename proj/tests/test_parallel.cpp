#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cusplab/cusp_operator.hpp"
#include "cusplab/kernels.hpp"
#include "cusplab/parallel.hpp"
#include "cusplab/rng.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace cusplab;

namespace {
const FlatTorusMetric kSquare = FlatTorusMetric::square(1.0);
}

TEST_CASE("chunked reduction is thread-count invariant") {
    Rng rng(1);
    std::vector<double> data(10000);
    for (auto& v : data) v = rng.symmetric() * std::exp(rng.uniform(0.0, 10.0));
    auto term = [&](std::size_t i) { return data[i]; };
    const double serial = chunked_sum_serial(data.size(), term);
    const double parallel = chunked_sum(data.size(), term);
    CHECK(serial == parallel); // bit-identical by construction
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const double one = chunked_sum(data.size(), term);
    omp_set_num_threads(4);
    const double four = chunked_sum(data.size(), term);
    omp_set_num_threads(saved);
    CHECK(one == four);
#endif
}

TEST_CASE("modewise operator kernel matches its serial reference bit for bit") {
    const RadialGrid grid(5.0, 0.02);
    Rng rng(2);
    const auto h = random_field(grid, kSquare, 3, rng);
    const auto a = apply_L_full(h);
    const auto b = apply_L_full_reference(h);
    for (int c = 0; c < 6; ++c)
        for (std::size_t m = 0; m < h.mode_count(); ++m)
            for (std::size_t i = 0; i < grid.nodes(); ++i)
                CHECK(a.profile(c, m)[i] == b.profile(c, m)[i]);
}

TEST_CASE("field scan matches the direct-summation reference") {
    const RadialGrid grid(3.0, 0.05);
    Rng rng(3);
    const auto h = random_field(grid, kSquare, 2, rng);
    const auto fast = scan_field(h);
    const auto ref = scan_field_reference(h);
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        const double scale = std::max(1e-30, ref.level[i].sup_c2);
        CHECK(std::abs(fast.level[i].sup_c0 - ref.level[i].sup_c0) <= 1e-11 * scale);
        CHECK(std::abs(fast.level[i].sup_c1 - ref.level[i].sup_c1) <= 1e-11 * scale);
        CHECK(std::abs(fast.level[i].sup_c2 - ref.level[i].sup_c2) <= 1e-11 * scale);
        CHECK(std::abs(fast.level[i].int_c2_sq - ref.level[i].int_c2_sq) <=
              1e-10 * std::max(1e-30, ref.level[i].int_c2_sq));
    }
}

TEST_CASE("field scan is thread-count invariant") {
#ifdef _OPENMP
    const RadialGrid grid(4.0, 0.02);
    Rng rng(4);
    const auto h = random_field(grid, kSquare, 3, rng);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto one = scan_field(h);
    omp_set_num_threads(4);
    const auto four = scan_field(h);
    omp_set_num_threads(saved);
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        CHECK(one.level[i].sup_c2 == four.level[i].sup_c2);
        CHECK(one.level[i].int_c2_sq == four.level[i].int_c2_sq);
        CHECK(one.level[i].int_c0_sq == four.level[i].int_c0_sq);
    }
#endif
}

TEST_CASE("single-level scan agrees with the full scan") {
    const RadialGrid grid(3.0, 0.05);
    Rng rng(5);
    const auto h = random_field(grid, kSquare, 2, rng);
    const auto full = scan_field(h);
    for (std::size_t i : {std::size_t(0), grid.nodes() / 3, grid.nodes() - 1}) {
        const auto one = scan_level(h, i);
        CHECK(one.sup_c2 == full.level[i].sup_c2);
        CHECK(one.int_c2 == full.level[i].int_c2);
    }
}
