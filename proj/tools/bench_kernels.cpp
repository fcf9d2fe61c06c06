// Timing comparison of the OpenMP kernels against their serial references.
#include "cusplab/cusp_operator.hpp"
#include "cusplab/kernels.hpp"
#include "cusplab/parallel.hpp"
#include "cusplab/rng.hpp"
#include "cusplab/tensor_field.hpp"

#include <chrono>
#include <cstdio>
#include <functional>

using namespace cusplab;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn(); // warm up
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

} // namespace

int main(int argc, char** argv) {
    int K = 4;
    double R = 20.0, dr = 0.01;
    if (argc > 1) K = std::atoi(argv[1]);
    if (argc > 2) R = std::atof(argv[2]);
    if (argc > 3) dr = std::atof(argv[3]);

    const RadialGrid grid(R, dr);
    const FlatTorusMetric torus(1.0, 0.2, 1.3);
    Rng rng(7);
    RandomFieldOptions opt;
    opt.active_kmax = std::min(2, K);
    const TensorField h = random_field(grid, torus, K, rng, opt);

    std::printf("grid: R=%.1f dr=%.3g nodes=%zu, K=%d (%zu modes), threads=%d\n", grid.R(),
                grid.dr(), grid.nodes(), K, h.mode_count(), hardware_threads());

    const double t_apply = time_ms([&] { (void)apply_L_full(h); }, 3);
    const double t_apply_ref = time_ms([&] { (void)apply_L_full_reference(h); }, 3);
    std::printf("%-26s %10.2f ms   serial reference %10.2f ms   speedup %.2fx\n",
                "apply_L_full", t_apply, t_apply_ref, t_apply_ref / t_apply);

    const double t_scan = time_ms([&] { (void)scan_field(h); }, 1);
    const double t_scan_ref = time_ms([&] { (void)scan_field_reference(h); }, 1);
    std::printf("%-26s %10.2f ms   serial reference %10.2f ms   speedup %.2fx\n", "scan_field",
                t_scan, t_scan_ref, t_scan_ref / t_scan);

    return 0;
}
