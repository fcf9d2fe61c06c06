#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cusplab/bootstrap.hpp"
#include "cusplab/errors.hpp"
#include "cusplab/experiments.hpp"
#include "cusplab/rng.hpp"

#include <cmath>

using namespace cusplab;
using doctest::Approx;

namespace {

PipelineSetup small_setup(double lambda, double eta, double eps0, std::uint64_t seed = 1,
                          double R = 10.0, double dr = 0.01, int K = 2) {
    WeightParams w(lambda, eta, 0.05);
    PipelineParams p(w);
    p.epsilon0 = eps0;
    p.seed = seed;
    const FlatTorusMetric torus = FlatTorusMetric::square(1.0);
    return PipelineSetup(CuspMetric(torus, R), RadialGrid(R, dr), K, p);
}

} // namespace

TEST_CASE("compatibility report on the exact cusp operator") {
    const auto setup = small_setup(0.5, 1.5, 0.0);
    const auto rep = check_compatibility(setup, 3);
    REQUIRE(rep.conditions.size() == 7);
    CHECK(rep.b == Approx(1.0));
    CHECK(rep.sigma_star == Approx(0.5));
    CHECK(rep.s0 == Approx(0.5));
    CHECK(!rep.degenerate);
    for (const auto& c : rep.conditions) {
        INFO("condition ", c.id, ": ", c.worst_case);
        CHECK(c.pass);
    }
    CHECK(rep.all_pass());
}

TEST_CASE("compatibility report with the perturbed operator") {
    const auto setup = small_setup(0.5, 1.5, 1e-3);
    const auto rep = check_compatibility(setup, 3);
    for (const auto& c : rep.conditions) {
        INFO("condition ", c.id, ": ", c.worst_case);
        CHECK(c.pass);
    }
}

TEST_CASE("invalid parameters are rejected before any check") {
    CHECK_THROWS_AS(small_setup(0.5, 0.9, 0.0), ParameterError);
    CHECK_THROWS_AS(small_setup(1.2, 1.5, 0.0), ParameterError);
}

TEST_CASE("averaged forcing of a radial solution") {
    const auto setup = small_setup(0.5, 1.5, 0.0);
    const auto& grid = setup.grid;
    // radial h: a trivial variation plus decaying contamination
    const TrivialEinsteinVariation v(0.3, -0.1);
    RadialTensorField hr = v.to_field(grid);
    std::array<std::vector<double>, 6> extra;
    for (auto& e : extra) e.assign(grid.nodes(), 0.0);
    for (std::size_t i = 0; i < grid.nodes(); ++i)
        extra[C33][i] = 0.4 * std::exp(-0.5 * grid.r(i));
    hr += RadialTensorField::from_samples(grid, std::move(extra));
    const TensorField h = embed(hr, setup.cusp.flat(), setup.K);
    const TensorField f = apply_L_full(h);

    const auto s1 = step1_averaged_forcing(h, f, v, setup, 0.0);
    // with eps0 = 0 and radial h, the averaged forcing is average(f) exactly
    const auto favg = average(f);
    double worst = 0.0;
    for (int c = 0; c < 6; ++c)
        for (std::size_t i = 0; i < grid.nodes(); ++i)
            worst = std::max(worst,
                             std::abs(s1.fc_hat.comp(c)[i] - favg.comp(c)[i]));
    CHECK(worst <= 1e-12);
    CHECK(std::isfinite(s1.envelope_constant));
    CHECK(s1.psi_l1_over_B >= 0.0);
    CHECK(std::isfinite(s1.psi_l1_over_B));
}

TEST_CASE("extraction recovers a planted variation") {
    const auto setup = small_setup(0.5, 1.5, 0.0);
    const auto& grid = setup.grid;
    const TrivialEinsteinVariation v(0.3, -0.3);

    SUBCASE("plant plus decaying contamination") {
        RadialTensorField h_hat = v.to_field(grid);
        std::array<std::vector<double>, 6> extra;
        for (auto& e : extra) e.assign(grid.nodes(), 0.0);
        for (int c = 0; c < 6; ++c) {
            const double w = comp_frame_exponent[c];
            for (std::size_t i = 0; i < grid.nodes(); ++i) {
                const double r = grid.r(i);
                extra[static_cast<std::size_t>(c)][i] =
                    std::exp(-w * r) * (0.2 * std::exp(-0.5 * r) - 0.15 * std::exp(-1.3 * r));
            }
        }
        h_hat += RadialTensorField::from_samples(grid, std::move(extra));
        GrowthEnvelope env;
        env.terms.push_back({1.0, -0.5});
        env.terms.push_back({1.0, -1.3});
        // sigma = 0.9: mu = 2 - 1.5 - 0.9 = -0.4 < 0, extraction active
        const auto ex = extract_trivial_einstein(h_hat, env, setup, 0.9, 1.0);
        CHECK(!ex.forced_zero);
        CHECK(ex.v_prime.v11() == Approx(0.3).epsilon(1e-4));
        CHECK(ex.v_prime.v12() == Approx(-0.3).epsilon(1e-4));
        CHECK(ex.c_avg_minus_v > 0.0);
        CHECK(std::isfinite(ex.c_avg_minus_v));
    }
    SUBCASE("zero input gives the zero variation") {
        const auto h_hat = RadialTensorField::zero(grid);
        GrowthEnvelope env;
        env.terms.push_back({1.0, -0.5});
        const auto ex = extract_trivial_einstein(h_hat, env, setup, 0.9, 1.0);
        CHECK(ex.v_prime.is_zero());
        for (const auto& fam : ex.families) CHECK(std::abs(fam.decaying_coeff) <= 1e-10);
    }
    SUBCASE("positive output rate forces the zero variation") {
        // sigma = 0.2: mu = 0.3 > 0
        const auto h_hat = v.to_field(grid);
        GrowthEnvelope env;
        env.terms.push_back({1.0, -0.5});
        const auto ex = extract_trivial_einstein(h_hat, env, setup, 0.2, 1.0);
        CHECK(ex.forced_zero);
        CHECK(ex.v_prime.is_zero());
    }
    SUBCASE("sigma inside the excluded band is rejected") {
        const auto h_hat = v.to_field(grid);
        GrowthEnvelope env;
        env.terms.push_back({1.0, -0.5});
        CHECK_THROWS_AS(extract_trivial_einstein(h_hat, env, setup, 0.52, 1.0), ParameterError);
    }
    SUBCASE("growing content trips the square-integrability gate") {
        RadialTensorField h_hat = v.to_field(grid);
        std::array<std::vector<double>, 6> extra;
        for (auto& e : extra) e.assign(grid.nodes(), 0.0);
        for (std::size_t i = 0; i < grid.nodes(); ++i)
            extra[C33][i] = 1e-3 * std::exp((1.0 + std::sqrt(5.0)) * grid.r(i));
        h_hat += RadialTensorField::from_samples(grid, std::move(extra));
        GrowthEnvelope env;
        env.terms.push_back({1.0, -0.5});
        CHECK_THROWS_AS(extract_trivial_einstein(h_hat, env, setup, 0.9, 1.0), ExtractionError);
    }
}

TEST_CASE("full certification on a planted instance") {
    // reference-scale radial extent: the rate-0 coefficient is only identifiable
    // up to O(e^{mu R}) truncation dust, so R must be generous
    const auto setup = small_setup(0.5, 1.5, 1e-3, 7, 20.0);
    const TrivialEinsteinVariation v(0.3, -0.3);
    const auto inst = make_planted_instance(setup, v, 0.5, 7);
    const auto out = run_growth_certification(inst.h, inst.f, setup, 2);

    CHECK(out.compat.all_pass());
    REQUIRE(out.sigma_trajectory.size() == 4);
    CHECK(out.sigma_trajectory[0] == Approx(0.0));
    CHECK(out.sigma_trajectory[1] == Approx(0.45).epsilon(1e-9));
    CHECK(out.sigma_trajectory[2] == Approx(0.90).epsilon(1e-9));
    CHECK(out.sigma_trajectory[3] == Approx(1.0));
    CHECK(out.v.v11() == Approx(0.3).epsilon(1e-3));
    CHECK(out.v.v12() == Approx(-0.3).epsilon(1e-3));
    CHECK(out.pass);
    CHECK(out.fitted_rate <= -0.5 + 0.05);
    // monotone progress within the step bound
    const double s0 = 0.5;
    const std::size_t max_steps =
        static_cast<std::size_t>(std::ceil(1.0 / (0.9 * std::min(1.0, s0)))) + 1;
    CHECK(out.steps.size() <= max_steps);
    for (std::size_t i = 1; i < out.sigma_trajectory.size(); ++i)
        CHECK(out.sigma_trajectory[i] > out.sigma_trajectory[i - 1]);
}

TEST_CASE("pure kernel element is reproduced with non-increasing bound") {
    const auto setup = small_setup(0.5, 1.5, 0.0, 3);
    const auto& grid = setup.grid;
    const TrivialEinsteinVariation v(0.25, 0.1);
    const TensorField h = embed(v.to_field(grid), setup.cusp.flat(), setup.K);
    const TensorField f = apply_L_full(h); // ~ 0
    const auto out = run_growth_certification(h, f, setup, 2);
    CHECK(out.v.v11() == Approx(0.25).epsilon(1e-6));
    CHECK(out.v.v12() == Approx(0.1).epsilon(1e-6));
    CHECK(out.rate_degenerate);
    for (const auto& s : out.steps) CHECK(s.new_bound <= out.B * 10.0);
}

TEST_CASE("degenerate weight range collapses to a single extraction") {
    const auto setup = small_setup(0.5, 2.8, 0.0, 5, 20.0);
    const TrivialEinsteinVariation v(0.2, 0.0);
    const auto inst = make_planted_instance(setup, v, 0.3, 5);
    const auto out = run_growth_certification(inst.h, inst.f, setup, 2);
    CHECK(out.compat.degenerate);
    CHECK(out.steps.empty());
    REQUIRE(out.sigma_trajectory.size() == 1);
    CHECK(out.sigma_trajectory[0] == 0.0);
    // mu(0) = 2 - 2.8 < 0, so the extraction is active and recovers the plant
    CHECK(out.v.v11() == Approx(0.2).epsilon(1e-3));
}

TEST_CASE("certificates are homogeneous of degree one") {
    const auto setup = small_setup(0.5, 1.5, 1e-3, 21, 20.0);
    const TrivialEinsteinVariation v(0.2, 0.1);
    const auto inst = make_planted_instance(setup, v, 0.4, 21);
    const auto base = run_growth_certification(inst.h, inst.f, setup, 2);
    const double scale = 3.0;
    TensorField hs = inst.h;
    hs *= scale;
    TensorField fs = inst.f;
    fs *= scale;
    const auto scaled = run_growth_certification(hs, fs, setup, 2);
    CHECK(scaled.pass == base.pass);
    CHECK(scaled.B == Approx(scale * base.B).epsilon(1e-9));
    CHECK(scaled.v.v11() == Approx(scale * base.v.v11()).epsilon(1e-6));
    REQUIRE(scaled.certificates.size() == base.certificates.size());
    for (std::size_t i = 0; i < base.certificates.size(); ++i) {
        INFO("certificate ", base.certificates[i].tag);
        CHECK(scaled.certificates[i].pass == base.certificates[i].pass);
        // measured constants are ratios, invariant under the scaling
        if (base.certificates[i].tag != "avg-decay-rate")
            CHECK(scaled.certificates[i].constant ==
                  Approx(base.certificates[i].constant).epsilon(1e-6));
    }
}

TEST_CASE("independent extractions agree") {
    const auto setup = small_setup(0.5, 1.5, 1e-3, 11, 20.0);
    const TrivialEinsteinVariation v(0.3, -0.3);
    const auto a = make_planted_instance(setup, v, 0.5, 101);
    const auto b = make_planted_instance(setup, v, 0.5, 202);
    const auto oa = run_growth_certification(a.h, a.f, setup, 2);
    const auto ob = run_growth_certification(b.h, b.f, setup, 2);
    CHECK(std::abs(oa.v.v11() - ob.v.v11()) <= 1e-4);
    CHECK(std::abs(oa.v.v12() - ob.v.v12()) <= 1e-4);
    // constancy of |v - w| forces uniqueness of the bounded-difference variation
    const auto diff = oa.v - ob.v;
    CHECK(diff.norm() <= 2e-4);
}
