#include <doctest.h>

#include "sue/linalg.hpp"
#include "test_helpers.hpp"

using namespace sue;

TEST_CASE("cholesky: identity and hand-checkable 2x2") {
    MatrixXd L = cholesky(SymMatrix::identity(3));
    CHECK((L - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    MatrixXd M(2, 2);
    M << 4, 2, 2, 3;
    MatrixXd L2 = cholesky(SymMatrix(M));
    CHECK(L2(0, 0) == doctest::Approx(2.0));
    CHECK(L2(1, 0) == doctest::Approx(1.0));
    CHECK(L2(1, 1) == doctest::Approx(std::sqrt(2.0)));
    CHECK(L2(0, 1) == 0.0);
}

TEST_CASE("cholesky: indefinite matrix is rejected") {
    MatrixXd M(2, 2);
    M << 1, 2, 2, 1;  // eigenvalues 3 and -1
    CHECK_THROWS_AS(cholesky(SymMatrix(M)), NotPositiveDefinite);
    CHECK_FALSE(is_positive_definite(SymMatrix(M)));
}

TEST_CASE("cholesky: reconstruction on random PD matrices") {
    Rng rng(42);
    for (int rep = 0; rep < 50; ++rep) {
        int n = 1 + static_cast<int>(rng.next_u64() % 8);
        SymMatrix M = sue::test::random_pd(n, rng);
        MatrixXd L = cholesky(M);
        double err = (L * L.transpose() - M.mat()).norm() / M.mat().norm();
        CHECK(err < 1e-10);
    }
}

TEST_CASE("schur_complement: trivial and hand-checkable cases") {
    MatrixXd M = MatrixXd::Zero(3, 3);
    M.diagonal() << 2, 3, 4;
    M(0, 1) = M(1, 0) = 0.5;
    SymMatrix out = schur_complement(SymMatrix(M), {0, 1}, {2});
    CHECK(out(0, 0) == doctest::Approx(2.0));
    CHECK(out(0, 1) == doctest::Approx(0.5));
    CHECK(out(1, 1) == doctest::Approx(3.0));

    MatrixXd M2(2, 2);
    M2 << 2, 1, 1, 2;
    SymMatrix s = schur_complement(SymMatrix(M2), {0}, {1});
    CHECK(s.dim() == 1);
    CHECK(s(0, 0) == doctest::Approx(1.5));
}

TEST_CASE("schur_complement: matches the explicit-inverse formula") {
    Rng rng(7);
    SymMatrix M = sue::test::random_pd(4, rng);
    IndexSet bi{0, 1}, bj{2, 3};
    SymMatrix s = schur_complement(M, bi, bj);
    MatrixXd Mii = submatrix(M.mat(), bi, bi);
    MatrixXd Mij = submatrix(M.mat(), bi, bj);
    MatrixXd Mjj = submatrix(M.mat(), bj, bj);
    MatrixXd expect = Mii - Mij * Mjj.inverse() * Mij.transpose();
    CHECK((s.mat() - expect).norm() / expect.norm() < 1e-10);
}

TEST_CASE("schur_complement of a PD matrix is PD") {
    Rng rng(11);
    for (int rep = 0; rep < 200; ++rep) {
        int n = 2 + static_cast<int>(rng.next_u64() % 5);
        int ni = 1 + static_cast<int>(rng.next_u64() % (n - 1));
        SymMatrix M = sue::test::random_pd(n, rng);
        IndexSet bi, bj;
        for (int i = 0; i < n; ++i) (i < ni ? bi : bj).push_back(i);
        CHECK(is_positive_definite(schur_complement(M, bi, bj)));
    }
}

TEST_CASE("schur_complement: bad partitions are rejected") {
    SymMatrix M = SymMatrix::identity(3);
    CHECK_THROWS_AS(schur_complement(M, {0, 1}, {1, 2}), InvalidIndex);
    CHECK_THROWS_AS(schur_complement(M, {0}, {2}), InvalidIndex);
}

TEST_CASE("corr_split: arithmetic and error cases") {
    CorrSplit cs = corr_split(SymMatrix::identity(2));
    CHECK(cs.omega(0) == 1.0);
    CHECK(cs.omega_bar(0, 1) == 0.0);

    MatrixXd M(2, 2);
    M << 4, 2, 2, 9;
    CorrSplit cs2 = corr_split(SymMatrix(M));
    CHECK(cs2.omega(0) == doctest::Approx(2.0));
    CHECK(cs2.omega(1) == doctest::Approx(3.0));
    CHECK(cs2.omega_bar(0, 1) == doctest::Approx(1.0 / 3.0));

    MatrixXd bad(2, 2);
    bad << 4, 0, 0, 0;
    CHECK_THROWS_AS(corr_split(SymMatrix(bad)), DegenerateScale);
}

TEST_CASE("corr_split: round trip omega * omega_bar * omega = Omega") {
    Rng rng(13);
    for (int rep = 0; rep < 40; ++rep) {
        int n = 1 + static_cast<int>(rng.next_u64() % 6);
        SymMatrix M = sue::test::random_pd(n, rng);
        CorrSplit cs = corr_split(M);
        MatrixXd back = cs.omega.asDiagonal() * cs.omega_bar.mat() * cs.omega.asDiagonal();
        CHECK((back - M.mat()).norm() / M.mat().norm() < 1e-12);
    }
}

TEST_CASE("SymMatrix symmetrizes its input") {
    MatrixXd M(2, 2);
    M << 1, 0.5 + 1e-13, 0.5 - 1e-13, 2;
    SymMatrix S(M);
    CHECK(S(0, 1) == S(1, 0));
    CHECK(S(0, 1) == doctest::Approx(0.5));
}
