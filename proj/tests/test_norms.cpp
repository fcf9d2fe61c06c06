#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cusplab/cusp_operator.hpp"
#include "cusplab/errors.hpp"
#include "cusplab/norms.hpp"
#include "cusplab/rng.hpp"

#include <cmath>
#include <numbers>

using namespace cusplab;
using doctest::Approx;

namespace {
const FlatTorusMetric kSquare = FlatTorusMetric::square(1.0);

TensorField radial_decay_field(const RadialGrid& grid, int comp, double rate, int K = 2) {
    TensorField f(grid, kSquare, K);
    std::vector<cxd> prof(grid.nodes());
    for (std::size_t i = 0; i < grid.nodes(); ++i)
        prof[i] = cxd(std::exp(-rate * grid.r(i)), 0.0);
    f.set_mode_profile(comp, 0, 0, prof);
    return f;
}
} // namespace

TEST_CASE("weight parameter bookkeeping") {
    const WeightParams w(0.5, 1.5);
    CHECK(w.b() == Approx(1.0));
    CHECK(w.sigma_star() == Approx(0.5));
    CHECK(w.s0() == Approx(0.5));
    CHECK(w.mu(0.45) == Approx(0.05));
    CHECK(w.mu(w.b()) == Approx(-0.5));
    CHECK(!w.degenerate());
    CHECK(WeightParams(0.5, 2.8).degenerate());
    CHECK_THROWS_AS(WeightParams(0.0, 1.5), ParameterError);
    CHECK_THROWS_AS(WeightParams(1.0, 1.5), ParameterError);
    CHECK_THROWS_AS(WeightParams(0.5, 1.0), ParameterError);
}

TEST_CASE("weighted L2 norm") {
    const RadialGrid grid(20.0, 0.01);

    SUBCASE("zero field") {
        const TensorField z(grid, kSquare, 2);
        CHECK(weighted_l2(z, 0.0) == 0.0);
    }
    SUBCASE("closed form for a pure decay profile") {
        // |f| = e^{-lambda r} radial, sigma = 0, lambda = 1/2:
        // integral of e^{-3r} over the cusp = 1/3
        const auto f = radial_decay_field(grid, C33, 0.5);
        CHECK(weighted_l2(f, 0.0) == Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-8));
    }
    SUBCASE("homogeneity") {
        const auto f = radial_decay_field(grid, C13, 1.3);
        const double n1 = weighted_l2(f, 0.3);
        TensorField g = f;
        g *= -2.5;
        CHECK(weighted_l2(g, 0.3) == Approx(2.5 * n1).epsilon(1e-13));
    }
}

TEST_CASE("weighted H2 norm") {
    const RadialGrid grid(20.0, 0.01);
    SUBCASE("zero field") {
        const TensorField z(grid, kSquare, 2);
        CHECK(weighted_h2(z, 0.0) == 0.0);
    }
    SUBCASE("dominates the weighted L2 norm") {
        Rng rng(3);
        for (int t = 0; t < 5; ++t) {
            const auto f = random_field(grid, kSquare, 2, rng);
            CHECK(weighted_h2(f, 0.2) >= weighted_l2(f, 0.2) * (1.0 - 1e-9));
        }
    }
    SUBCASE("closed form for the radial h33 = e^{-r} profile") {
        // |h|_C2 = 3 e^{-r}; integrand 9 e^{-4r}; norm = sqrt(9/4) = 1.5
        const auto h = radial_decay_field(grid, C33, 1.0);
        CHECK(weighted_h2(h, 0.0) == Approx(1.5).epsilon(1e-6));
    }
}

TEST_CASE("decay-weighted sup norm") {
    const RadialGrid grid(20.0, 0.01);
    SUBCASE("zero field") {
        const TensorField z(grid, kSquare, 2);
        CHECK(norm_0_lambda(z, 0.5) == 0.0);
    }
    SUBCASE("exact decay profile has norm one") {
        const auto f = radial_decay_field(grid, C33, 0.5);
        CHECK(norm_0_lambda(f, 0.5) == Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("the defining bound holds with equality somewhere") {
        Rng rng(8);
        const auto f = random_field(grid, kSquare, 2, rng);
        const double n = norm_0_lambda(f, 0.5);
        const auto scan = scan_field(f);
        double attained = 0.0;
        for (std::size_t i = 0; i < grid.nodes(); ++i) {
            const double bound = n * std::exp(-0.5 * grid.r(i));
            CHECK(scan.level[i].sup_c0 <= bound * (1.0 + 1e-12));
            attained = std::max(attained, scan.level[i].sup_c0 / bound);
        }
        CHECK(attained == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("level-wise Poincare inequality") {
    const RadialGrid grid(5.0, 0.05);
    SUBCASE("radial fields have vanishing left side") {
        const auto h = radial_decay_field(grid, C11, 0.7);
        const auto pc = poincare_check(h, 10);
        CHECK(pc.lhs == 0.0);
        CHECK(pc.pass);
    }
    SUBCASE("single fiber mode") {
        TensorField h(grid, kSquare, 2);
        std::vector<cxd> prof(grid.nodes(), cxd(0.7, 0.2));
        h.set_mode_profile(C12, 1, 1, prof);
        for (std::size_t node : {std::size_t(0), std::size_t(40), grid.nodes() - 1}) {
            const auto pc = poincare_check(h, node);
            CHECK(pc.pass);
            CHECK(pc.lhs > 0.0);
            CHECK(pc.lhs <= pc.rhs);
        }
    }
    SUBCASE("random tori and fields") {
        Rng rng(15);
        for (int t = 0; t < 10; ++t) {
            const double l = rng.uniform(0.4, 1.5);
            const double k = rng.uniform(1.0, 20.0);
            const FlatTorusMetric torus(l, 0.2 * l, l * k);
            for (int s = 0; s < 5; ++s) {
                const auto h = random_field(grid, torus, 3, rng);
                for (std::size_t node = 0; node < grid.nodes(); node += 25)
                    CHECK(poincare_check(h, node).pass);
            }
        }
    }
}

TEST_CASE("co-area integration") {
    const RadialGrid grid(20.0, 0.01);
    SUBCASE("zero integrand") {
        CHECK(coarea_integrate(grid, [](double) { return 0.0; }) == 0.0);
    }
    SUBCASE("closed form") {
        const double v = coarea_integrate(grid, [](double r) { return std::exp(-2.0 * r); });
        CHECK(v == Approx((1.0 - std::exp(-40.0)) / 2.0).epsilon(1e-10));
    }
    SUBCASE("two quadrature routes agree") {
        Rng rng(21);
        const auto f = random_field(grid, kSquare, 2, rng);
        const double a = weighted_l2(f, 0.4);
        const double b = weighted_l2_direct(f, 0.4);
        CHECK(std::abs(a - b) <= 1e-6 * std::max(1.0, a));
    }
}

TEST_CASE("weighted L2 of the decay norm stays under the closed-form bound") {
    const RadialGrid grid(20.0, 0.01);
    const WeightParams w(0.5, 1.5);
    Rng rng(33);
    for (int t = 0; t < 5; ++t) {
        TensorField f = random_field(grid, kSquare, 2, rng);
        const double n = norm_0_lambda(f, w.lambda);
        REQUIRE(n > 0.0);
        f *= 1.0 / n;
        for (double sigma : {0.0, 0.5 * w.b(), w.b()}) {
            const double lhs = weighted_l2(f, sigma);
            std::vector<double> integ(grid.nodes());
            for (std::size_t i = 0; i < grid.nodes(); ++i)
                integ[i] = std::exp((2.0 * sigma - 2.0 * w.lambda - 2.0) * grid.r(i));
            const double rhs = std::sqrt(grid.integrate(integ) * kSquare.area());
            CHECK(lhs <= rhs * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("kernel variations under the perturbed operator have small weighted image") {
    const RadialGrid grid(10.0, 0.02);
    const double eps0 = 1e-3;
    const OperatorError err(PerturbationEnvelope(eps0, 1.5, 4));
    Rng rng(44);
    for (int t = 0; t < 5; ++t) {
        const TrivialEinsteinVariation v(rng.symmetric(), rng.symmetric());
        if (v.norm() < 0.1) continue;
        const TensorField ve = embed(v.to_field(grid), kSquare, 2);
        const TensorField Lv = apply_L_perturbed(ve, err);
        const double c = weighted_l2(Lv, 0.3) / (eps0 * v.norm());
        CHECK(c <= 1.0);
    }
}

TEST_CASE("integrability flag flips at the analytic threshold") {
    const WeightParams w(0.5, 1.5);
    const double sigma = 0.3;
    const double threshold = sigma + w.eta - 1.0; // 0.8
    const std::vector<double> Rs = {20.0, 40.0, 80.0};
    CHECK(mu_integral_bounded(w, sigma, threshold - 0.1, Rs, 0.01));
    CHECK(mu_integral_bounded(w, sigma, threshold - 0.3, Rs, 0.01));
    CHECK(!mu_integral_bounded(w, sigma, threshold + 0.1, Rs, 0.01));
    CHECK(!mu_integral_bounded(w, sigma, threshold + 0.3, Rs, 0.01));
}
