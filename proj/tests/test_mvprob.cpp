#include <doctest.h>

#include <cmath>

#include "sue/mvprob.hpp"
#include "sue/rng.hpp"
#include "test_helpers.hpp"

using namespace sue;

namespace {

VectorXd vec1(double a) {
    VectorXd v(1);
    v << a;
    return v;
}

VectorXd vec2(double a, double b) {
    VectorXd v(2);
    v << a, b;
    return v;
}

SymMatrix corr2(double rho) {
    MatrixXd m(2, 2);
    m << 1, rho, rho, 1;
    return SymMatrix(m);
}

// Plain Monte Carlo rectangle probability, the independent oracle for the QMC
// kernel.
ProbEstimate plain_mc_mvn(const VectorXd& upper, const SymMatrix& Sigma, long long n,
                          std::uint64_t seed) {
    MatrixXd L = cholesky(Sigma);
    const int k = Sigma.dim();
    Rng rng(seed, 777);
    long long hits = 0;
    VectorXd z(k);
    for (long long i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) z(j) = rng.normal();
        VectorXd x = L * z;
        bool in = true;
        for (int j = 0; j < k; ++j) {
            if (x(j) > upper(j)) {
                in = false;
                break;
            }
        }
        hits += in;
    }
    double p = static_cast<double>(hits) / static_cast<double>(n);
    return ProbEstimate{p, std::sqrt(p * (1 - p) / static_cast<double>(n)), n};
}

}  // namespace

TEST_CASE("mvn_cdf: scalar symmetry") {
    ProbEstimate p = mvn_cdf(vec1(0.0), SymMatrix::identity(1), 1e-8, 1);
    CHECK(p.value == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("mvn_cdf: bivariate orthant identity") {
    // P(Z1 <= 0, Z2 <= 0) = 1/4 + asin(rho) / (2 pi)
    for (double rho : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
        ProbEstimate p = mvn_cdf(vec2(0.0, 0.0), corr2(rho), 1e-7, 42);
        double expect = 0.25 + std::asin(rho) / (2.0 * M_PI);
        CHECK(std::abs(p.value - expect) < 1e-6);
        CHECK(p.abs_error < 1e-6);
    }
}

TEST_CASE("mvn_cdf: trivariate case against plain Monte Carlo") {
    Rng rng(5);
    SymMatrix Sigma = sue::test::random_pd(3, rng);
    VectorXd upper(3);
    upper << 1.0, -0.5, 0.3;
    ProbEstimate qmc = mvn_cdf(upper, Sigma, 1e-6, 7);
    ProbEstimate mc = plain_mc_mvn(upper, Sigma, 10000000, 7);
    double combined = 3.0 * std::sqrt(mc.abs_error * mc.abs_error + qmc.abs_error * qmc.abs_error);
    CHECK(std::abs(qmc.value - mc.value) < combined);
}

TEST_CASE("mvn_cdf: argument validation") {
    CHECK_THROWS_AS(mvn_cdf(vec1(0.0), SymMatrix::identity(2), 1e-6, 0), InvalidArgument);
    MatrixXd sing(2, 2);
    sing << 1, 1, 1, 1;
    CHECK_THROWS_AS(mvn_cdf(vec2(0, 0), SymMatrix(sing), 1e-6, 0), NotPositiveDefinite);
    CHECK_THROWS_AS(mvn_cdf(VectorXd::Zero(41), SymMatrix::identity(41), 1e-6, 0), InvalidArgument);
}

TEST_CASE("mvt_cdf: scalar and orthant symmetry") {
    CHECK(mvt_cdf(vec1(0.0), SymMatrix::identity(1), 7.0, 1e-8, 1).value ==
          doctest::Approx(0.5).epsilon(1e-14));
    for (double nu : {0.7, 3.0, 50.0}) {
        ProbEstimate p = mvt_cdf(vec2(0.0, 0.0), SymMatrix::identity(2), nu, 1e-6, 3);
        CHECK(std::abs(p.value - 0.25) < 2e-6);
    }
}

TEST_CASE("mvt_cdf: large-nu limit matches the Gaussian kernel") {
    SymMatrix Sigma = corr2(0.3);
    ProbEstimate t = mvt_cdf(vec2(0.5, 0.5), Sigma, 1e6, 1e-6, 9);
    ProbEstimate g = mvn_cdf(vec2(0.5, 0.5), Sigma, 1e-6, 9);
    CHECK(std::abs(t.value - g.value) < 1e-4);
}

TEST_CASE("mvt_cdf: scalar case standardizes by the dispersion") {
    MatrixXd s(1, 1);
    s << 4.0;
    ProbEstimate p = mvt_cdf(vec1(0.8), SymMatrix(s), 3.0, 1e-8, 1);
    CHECK(p.value == doctest::Approx(t_cdf(0.4, 3.0)).epsilon(1e-14));
}

TEST_CASE("elliptical_cdf: dispatch and scale absorption") {
    CHECK(elliptical_cdf(vec1(0.0), SymMatrix::identity(1), DensityGenerator::gaussian(), 0.0, 1)
              .value == doctest::Approx(0.5));

    // StudentTScaled(5, 2) at x is the plain t5 CDF at x / sqrt(2).
    DensityGenerator scaled = DensityGenerator::student_t_scaled(5.0, 2.0);
    for (double x : {-1.0, 0.3, 1.7}) {
        ProbEstimate p = elliptical_cdf(vec1(x), SymMatrix::identity(1), scaled, 0.0, 1);
        CHECK(p.value == doctest::Approx(t_cdf(x / std::sqrt(2.0), 5.0)).epsilon(1e-13));
    }
}

TEST_CASE("elliptical_cdf: zero-dimensional convention F_0 = 1") {
    ProbEstimate p = elliptical_cdf(VectorXd(0), SymMatrix(), DensityGenerator::gaussian(), 0.0, 1);
    CHECK(p.value == 1.0);
    CHECK(p.abs_error == 0.0);
}

TEST_CASE("elliptical_cdf: generic conditioned path agrees with the closed Student route") {
    DensityGenerator base = DensityGenerator::student_t(5.0);
    DensityGenerator generic = DensityGenerator::conditioned(base, 1, 1.0);
    DensityGenerator closed = condition_generator(base, 2, 1, 1.0);
    REQUIRE(closed.family() == GeneratorFamily::StudentTScaled);
    for (double x : {-0.8, 0.0, 1.2}) {
        ProbEstimate mc = elliptical_cdf(vec1(x), SymMatrix::identity(1), generic, 5e-4, 11);
        ProbEstimate ref = elliptical_cdf(vec1(x), SymMatrix::identity(1), closed, 0.0, 11);
        CHECK(std::abs(mc.value - ref.value) < mc.abs_error + ref.abs_error + 1e-4);
    }
}

TEST_CASE("elliptical_cdf: radial generators are rejected") {
    DensityGenerator g = DensityGenerator::radial(
        [](int k, double u) { return -0.5 * k * std::log(2.0 * M_PI) - 0.5 * u; });
    CHECK_THROWS_AS(elliptical_cdf(vec1(0.0), SymMatrix::identity(1), g, 1e-3, 1),
                    UnsupportedGenerator);
}

TEST_CASE("mvprob: monotonicity in the upper bound") {
    Rng rng(21);
    SymMatrix Sigma = sue::test::random_pd(3, rng);
    VectorXd upper(3);
    upper << 0.3, -0.2, 0.8;
    ProbEstimate base = mvn_cdf(upper, Sigma, 1e-6, 17);
    for (int j = 0; j < 3; ++j) {
        VectorXd raised = upper;
        raised(j) += 0.5;
        ProbEstimate hi = mvn_cdf(raised, Sigma, 1e-6, 17);
        CHECK(hi.value >= base.value - (hi.abs_error + base.abs_error));
    }
}

TEST_CASE("mvprob: 1-D complement identity") {
    for (double x : {-1.3, 0.2, 2.5}) {
        double a = mvn_cdf(vec1(x), SymMatrix::identity(1), 1e-8, 1).value;
        double b = mvn_cdf(vec1(-x), SymMatrix::identity(1), 1e-8, 1).value;
        CHECK(a + b == doctest::Approx(1.0).epsilon(1e-13));
        double at = mvt_cdf(vec1(x), SymMatrix::identity(1), 3.5, 1e-8, 1).value;
        double bt = mvt_cdf(vec1(-x), SymMatrix::identity(1), 3.5, 1e-8, 1).value;
        CHECK(at + bt == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("mvprob: fixed seed gives bit-identical estimates") {
    Rng rng(31);
    SymMatrix Sigma = sue::test::random_pd(4, rng);
    VectorXd upper(4);
    upper << 0.1, 0.9, -0.4, 1.5;
    ProbEstimate a = mvn_cdf(upper, Sigma, 1e-6, 12345);
    ProbEstimate b = mvn_cdf(upper, Sigma, 1e-6, 12345);
    CHECK(a.value == b.value);
    CHECK(a.abs_error == b.abs_error);
    CHECK(a.n_points == b.n_points);
    ProbEstimate c = mvn_cdf(upper, Sigma, 1e-6, 54321);
    CHECK(std::abs(a.value - c.value) < 3.0 * (a.abs_error + c.abs_error) + 1e-9);
}

TEST_CASE("mvprob: permutation invariance within error") {
    Rng rng(41);
    SymMatrix Sigma = sue::test::random_pd(3, rng);
    VectorXd upper(3);
    upper << 0.4, -0.1, 1.1;
    ProbEstimate a = mvn_cdf(upper, Sigma, 1e-6, 5);
    IndexSet perm{2, 0, 1};
    VectorXd up2 = subvector(upper, perm);
    SymMatrix Sig2(submatrix(Sigma.mat(), perm, perm));
    ProbEstimate b = mvn_cdf(up2, Sig2, 1e-6, 5);
    CHECK(std::abs(a.value - b.value) < a.abs_error + b.abs_error + 1e-9);
}
