#include <doctest.h>

#include <cmath>

#include "sue/generators.hpp"
#include "test_helpers.hpp"

using namespace sue;
using sue::test::rel_diff;
using sue::test::simpson;

namespace {

// Total mass of the elliptical density with identity dispersion at dimension k,
// by radial quadrature: surface(S^{k-1}) * int_0^R g(r^2) r^{k-1} dr.
double radial_mass(const DensityGenerator& g, int k, double radius, int n) {
    const double surface = 2.0 * std::pow(M_PI, 0.5 * k) / std::tgamma(0.5 * k);
    auto f = [&](double r) {
        return std::exp(g.log_eval(k, r * r)) * std::pow(r, k - 1);
    };
    return surface * simpson(f, 0.0, radius, n);
}

}  // namespace

TEST_CASE("eval_generator: Gaussian and Cauchy anchor values") {
    DensityGenerator gauss = DensityGenerator::gaussian();
    CHECK(eval_generator(gauss, 1, 0.0) == doctest::Approx(0.39894228040143268).epsilon(1e-12));

    DensityGenerator cauchy = DensityGenerator::student_t(1.0);
    CHECK(eval_generator(cauchy, 1, 0.0) == doctest::Approx(0.31830988618379067).epsilon(1e-12));
}

TEST_CASE("eval_generator: large-nu Student approaches Gaussian") {
    DensityGenerator t = DensityGenerator::student_t(1e6);
    DensityGenerator g = DensityGenerator::gaussian();
    CHECK(rel_diff(eval_generator(t, 2, 1.0), eval_generator(g, 2, 1.0)) < 1e-5);
}

TEST_CASE("eval_generator: rejects invalid arguments") {
    DensityGenerator g = DensityGenerator::gaussian();
    CHECK_THROWS_AS(eval_generator(g, 1, -0.5), InvalidArgument);
    CHECK_THROWS_AS(eval_generator(g, 0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(DensityGenerator::student_t(-1.0), InvalidArgument);
    CHECK_THROWS_AS(DensityGenerator::student_t_scaled(2.0, 0.0), InvalidArgument);
}

TEST_CASE("condition_generator: Gaussian is invariant") {
    DensityGenerator g = condition_generator(DensityGenerator::gaussian(), 5, 2, 3.7);
    CHECK(g.family() == GeneratorFamily::Gaussian);
}

TEST_CASE("condition_generator: Student closes into the scaled family") {
    DensityGenerator g = condition_generator(DensityGenerator::student_t(5.0), 4, 2, 0.0);
    REQUIRE(g.family() == GeneratorFamily::StudentTScaled);
    CHECK(g.nu() == doctest::Approx(7.0));
    CHECK(g.scale() == doctest::Approx(5.0 / 7.0));
}

TEST_CASE("condition_generator: conditioned Student density integrates to one") {
    DensityGenerator g = condition_generator(DensityGenerator::student_t(3.0), 2, 1, 3.0);
    // 1-D density with unit dispersion: f(z) = g^(1)(z^2).
    double mass = radial_mass(g, 1, 200.0, 400001);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("condition_generator: validates dimensions") {
    CHECK_THROWS_AS(condition_generator(DensityGenerator::gaussian(), 2, 2, 1.0), InvalidArgument);
    CHECK_THROWS_AS(condition_generator(DensityGenerator::gaussian(), 2, 0, 1.0), InvalidArgument);
}

TEST_CASE("log_c: anchor values and overflow safety") {
    CHECK(log_c(1.0, 1) == doctest::Approx(std::log(1.0 / M_PI)).epsilon(1e-14));
    // Frozen from an arbitrary-precision evaluation of
    // lgamma(4) - lgamma(2.5) - 1.5*log(5*pi).
    CHECK(log_c(5.0, 3) == doctest::Approx(-2.6241750986701150).epsilon(1e-12));
    CHECK(std::isfinite(log_c(100.0, 50)));
}

TEST_CASE("normalization: every closed-form family integrates to one at k = 1..3") {
    std::vector<DensityGenerator> gens = {
        DensityGenerator::gaussian(),
        DensityGenerator::student_t(4.0),
        DensityGenerator::student_t_scaled(6.0, 1.7),
        condition_generator(DensityGenerator::student_t(5.0), 3, 1, 2.0),
        DensityGenerator::conditioned(DensityGenerator::student_t(5.0), 1, 2.0),
    };
    for (const auto& g : gens) {
        for (int k = 1; k <= 3; ++k) {
            // Radii chosen so the truncated tail mass is below 1e-8 for the
            // heaviest tails in the list (Student nu = 4).
            double mass = radial_mass(g, k, 400.0, 400001);
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("generic conditioned path matches the Student closed form") {
    DensityGenerator base = DensityGenerator::student_t(4.5);
    DensityGenerator closed = condition_generator(base, 5, 2, 1.3);
    DensityGenerator generic = DensityGenerator::conditioned(base, 2, 1.3);
    for (int k = 1; k <= 4; ++k) {
        for (double u : {0.0, 0.2, 1.0, 5.0, 40.0}) {
            CHECK(rel_diff(std::exp(closed.log_eval(k, u)), std::exp(generic.log_eval(k, u))) <
                  1e-10);
        }
    }
}

TEST_CASE("conditioned wrapper equals the quotient pointwise") {
    DensityGenerator base = DensityGenerator::student_t(3.0);
    DensityGenerator wrapped = DensityGenerator::conditioned(base, 2, 0.7);
    for (int k = 1; k <= 3; ++k) {
        for (double u : {0.0, 0.5, 2.0, 10.0}) {
            double direct = base.log_eval(k + 2, u + 0.7) - base.log_eval(2, 0.7);
            CHECK(rel_diff(std::exp(wrapped.log_eval(k, u)), std::exp(direct)) < 1e-12);
        }
    }
}

TEST_CASE("eval_generator is strictly decreasing in u") {
    Rng rng(99);
    std::vector<DensityGenerator> gens = {
        DensityGenerator::gaussian(),
        DensityGenerator::student_t(2.5),
        DensityGenerator::student_t_scaled(4.0, 0.6),
        DensityGenerator::conditioned(DensityGenerator::student_t(4.0), 1, 1.0),
    };
    for (const auto& g : gens) {
        for (int rep = 0; rep < 50; ++rep) {
            int k = 1 + static_cast<int>(rng.next_u64() % 4);
            double u1 = 10.0 * rng.uniform();
            double u2 = u1 + 0.1 + 5.0 * rng.uniform();
            CHECK(g.log_eval(k, u1) > g.log_eval(k, u2));
        }
    }
}

TEST_CASE("radial generators evaluate but carry no closed form") {
    DensityGenerator g = DensityGenerator::radial(
        [](int k, double u) { return -0.5 * k * std::log(2.0 * M_PI) - 0.5 * u; });
    CHECK(eval_generator(g, 1, 0.0) == doctest::Approx(0.39894228040143268));
    CHECK_FALSE(g.closed_form());
    CHECK(g.resolved_family() == GeneratorFamily::Radial);
}
