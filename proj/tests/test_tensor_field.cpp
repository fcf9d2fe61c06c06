#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cusplab/averaging.hpp"
#include "cusplab/errors.hpp"
#include "cusplab/kernels.hpp"
#include "cusplab/norms.hpp"
#include "cusplab/radial_field.hpp"
#include "cusplab/rng.hpp"
#include "cusplab/tensor_field.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

using namespace cusplab;
using doctest::Approx;

namespace {
const FlatTorusMetric kSquare = FlatTorusMetric::square(1.0);
}

TEST_CASE("pointwise norm in cusp coordinates") {
    const RadialGrid grid(5.0, 0.05);

    SUBCASE("zero field") {
        const auto h = RadialTensorField::zero(grid);
        for (std::size_t i = 0; i < grid.nodes(); ++i) CHECK(h.pointwise_norm(i) == 0.0);
    }
    SUBCASE("trivial variation has constant norm sqrt(2)") {
        const TrivialEinsteinVariation v(1.0, 0.0); // diag(1,-1)
        const auto f = v.to_field(grid);
        for (std::size_t i = 0; i < grid.nodes(); ++i)
            CHECK(f.pointwise_norm(i) == Approx(std::sqrt(2.0)).epsilon(1e-13));
        CHECK(v.norm() == Approx(std::sqrt(2.0)));
    }
    SUBCASE("pure h33 profile") {
        std::array<std::vector<double>, 6> c;
        for (auto& v : c) v.assign(grid.nodes(), 0.0);
        for (std::size_t i = 0; i < grid.nodes(); ++i) c[C33][i] = std::exp(-grid.r(i));
        const auto h = RadialTensorField::from_samples(grid, std::move(c));
        const std::size_t i1 = static_cast<std::size_t>(std::llround(1.0 / grid.dr()));
        CHECK(h.pointwise_norm(i1) == Approx(std::exp(-1.0)).epsilon(1e-12));
    }
}

TEST_CASE("trace against the cusp metric") {
    const RadialGrid grid(5.0, 0.05);
    SUBCASE("trivial variation is trace free") {
        const auto f = TrivialEinsteinVariation(0.7, -0.2).to_field(grid);
        for (std::size_t i = 0; i < grid.nodes(); ++i)
            CHECK(std::abs(f.trace(i)) < 1e-14);
    }
    SUBCASE("metric itself has trace 3") {
        std::array<std::vector<double>, 6> c;
        for (auto& v : c) v.assign(grid.nodes(), 0.0);
        for (std::size_t i = 0; i < grid.nodes(); ++i) {
            const double e = std::exp(-2.0 * grid.r(i));
            c[C11][i] = e;
            c[C22][i] = e;
            c[C33][i] = 1.0;
        }
        const auto h = RadialTensorField::from_samples(grid, std::move(c));
        for (std::size_t i = 0; i < grid.nodes(); i += 17)
            CHECK(h.trace(i) == Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("pure h33 = 1 has trace 1") {
        std::array<std::vector<double>, 6> c;
        for (auto& v : c) v.assign(grid.nodes(), 0.0);
        for (auto& x : c[C33]) x = 1.0;
        const auto h = RadialTensorField::from_samples(grid, std::move(c));
        CHECK(h.trace(3) == Approx(1.0));
    }
}

TEST_CASE("averaging extracts the zero mode") {
    const RadialGrid grid(4.0, 0.1);
    TensorField h(grid, kSquare, 4);
    std::vector<cxd> prof(grid.nodes());

    SUBCASE("radial fields are fixed points") {
        for (std::size_t i = 0; i < grid.nodes(); ++i)
            prof[i] = cxd(3.0 + std::sin(grid.r(i)), 0.0);
        h.set_mode_profile(C11, 0, 0, prof);
        const auto avg = average(h);
        for (std::size_t i = 0; i < grid.nodes(); ++i)
            CHECK(avg.comp(C11)[i] == Approx(3.0 + std::sin(grid.r(i))).epsilon(1e-14));
    }
    SUBCASE("pure oscillation averages to zero") {
        // h11 = cos(2 pi x1) e^{-r} has only the (1,0) modes
        for (std::size_t i = 0; i < grid.nodes(); ++i)
            prof[i] = cxd(0.5 * std::exp(-grid.r(i)), 0.0);
        h.set_mode_profile(C11, 1, 0, prof);
        const auto avg = average(h);
        for (std::size_t i = 0; i < grid.nodes(); ++i) CHECK(avg.comp(C11)[i] == 0.0);
    }
    SUBCASE("constant plus oscillation keeps the constant") {
        for (std::size_t i = 0; i < grid.nodes(); ++i) prof[i] = cxd(3.0, 0.0);
        h.set_mode_profile(C11, 0, 0, prof);
        for (std::size_t i = 0; i < grid.nodes(); ++i) prof[i] = cxd(0.5, 0.0);
        h.set_mode_profile(C11, 1, 0, prof);
        const auto avg = average(h);
        for (std::size_t i = 0; i < grid.nodes(); ++i)
            CHECK(avg.comp(C11)[i] == Approx(3.0));
    }
    SUBCASE("averaging is a projection") {
        Rng rng(5);
        const auto f = random_field(grid, kSquare, 4, rng);
        const auto once = average(f);
        const auto twice = average(embed(once, kSquare, 4));
        for (int c = 0; c < 6; ++c)
            for (std::size_t i = 0; i < grid.nodes(); ++i)
                CHECK(once.comp(c)[i] == twice.comp(c)[i]);
    }
}

TEST_CASE("triangle inequality for the pointwise norm") {
    const RadialGrid grid(3.0, 0.1);
    Rng rng(11);
    for (int t = 0; t < 10; ++t) {
        const auto a = random_field(grid, kSquare, 3, rng);
        const auto b = random_field(grid, kSquare, 3, rng);
        const auto scan_a = scan_field(a);
        const auto scan_b = scan_field(b);
        const auto scan_ab = scan_field(a + b);
        for (std::size_t i = 0; i < grid.nodes(); ++i)
            CHECK(scan_ab.level[i].sup_c0 <=
                  scan_a.level[i].sup_c0 + scan_b.level[i].sup_c0 + 1e-12);
    }
}

TEST_CASE("reality constraint maintained by the mutation API") {
    const RadialGrid grid(2.0, 0.1);
    Rng rng(3);
    const auto f = random_field(grid, kSquare, 3, rng);
    CHECK(f.reality_ok(0.0));
}

TEST_CASE("averaging property report") {
    const RadialGrid grid(6.0, 0.05);

    SUBCASE("radial field has zero deviations") {
        TensorField h(grid, kSquare, 3);
        std::vector<cxd> prof(grid.nodes());
        for (std::size_t i = 0; i < grid.nodes(); ++i)
            prof[i] = cxd(std::exp(-0.5 * grid.r(i)), 0.0);
        h.set_mode_profile(C33, 0, 0, prof);
        h.set_mode_profile(C12, 0, 0, prof);
        const auto rep = check_averaging_properties(h);
        CHECK(rep.bound_constant <= 1.0 + 1e-12);
        CHECK(rep.radial_derivative_deviation == 0.0);
        CHECK(rep.trace_deviation == 0.0);
        CHECK(rep.fluctuation_constant == 0.0);
    }
    SUBCASE("single mode fluctuation constant stays under 10 for D <= 1") {
        TensorField h(grid, kSquare, 3);
        std::vector<cxd> prof(grid.nodes());
        for (std::size_t i = 0; i < grid.nodes(); ++i)
            prof[i] = cxd(0.8 * std::exp(-grid.r(i)), 0.3 * std::exp(-grid.r(i)));
        h.set_mode_profile(C11, 1, 0, prof);
        const auto rep = check_averaging_properties(h);
        CHECK(kSquare.diameter() <= 1.0);
        CHECK(rep.fluctuation_constant > 0.0);
        CHECK(rep.fluctuation_constant <= 10.0);
    }
    SUBCASE("trace commutation is exact over random fields") {
        Rng rng(17);
        for (int t = 0; t < 20; ++t) {
            const auto h = random_field(grid, kSquare, 3, rng);
            const auto rep = check_averaging_properties(h);
            CHECK(rep.trace_deviation <= 1e-12);
            CHECK(rep.radial_derivative_deviation <= 1e-12);
        }
    }
}

TEST_CASE("non-finite samples trip the data gate") {
    const RadialGrid grid(2.0, 0.1);
    TensorField h(grid, kSquare, 2);
    std::vector<cxd> prof(grid.nodes(), cxd(1.0, 0.0));
    prof[3] = cxd(std::numeric_limits<double>::quiet_NaN(), 0.0);
    h.set_mode_profile(C11, 1, 0, prof);
    CHECK_THROWS_AS(check_averaging_properties(h), DataError);
}

TEST_CASE("binary round trip and csv export") {
    const RadialGrid grid(2.0, 0.1);
    Rng rng(23);
    const auto f = random_field(grid, kSquare, 3, rng);
    const std::string dir = std::filesystem::temp_directory_path().string();
    const std::string path = dir + "/cusplab_field_test.bin";
    save_field(f, path);
    const auto g = load_field(path);
    REQUIRE(g.same_layout(f));
    for (int c = 0; c < 6; ++c)
        for (std::size_t m = 0; m < f.mode_count(); ++m)
            for (std::size_t i = 0; i < grid.nodes(); ++i)
                CHECK(f.profile(c, m)[i] == g.profile(c, m)[i]);
    std::filesystem::remove(path);

    const std::string csv = dir + "/cusplab_slice_test.csv";
    export_radial_csv(f, csv);
    CHECK(std::filesystem::file_size(csv) > 0);
    std::filesystem::remove(csv);
}

TEST_CASE("level integrals match the sampled scan on quadratic quantities") {
    const RadialGrid grid(3.0, 0.1);
    Rng rng(31);
    const auto f = random_field(grid, kSquare, 4, rng);
    const auto scan = scan_field(f);
    for (std::size_t i = 0; i < grid.nodes(); i += 7) {
        const double exact = level_l2_sq(f, i);
        CHECK(scan.level[i].int_c0_sq == Approx(exact).epsilon(1e-10));
    }
}
