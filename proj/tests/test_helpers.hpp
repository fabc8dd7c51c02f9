#pragma once

#include <cmath>
#include <functional>

#include "sue/distribution.hpp"
#include "sue/rng.hpp"

namespace sue::test {

/// Random symmetric positive-definite matrix with moderate conditioning.
inline SymMatrix random_pd(int n, Rng& rng, double jitter = 0.5) {
    MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
    return SymMatrix(A * A.transpose() / n + jitter * MatrixXd::Identity(n, n));
}

/// Random correlation matrix (unit diagonal).
inline SymMatrix random_corr(int n, Rng& rng) {
    SymMatrix pd = random_pd(n, rng, 0.8);
    MatrixXd c = pd.mat();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) c(i, j) /= std::sqrt(pd(i, i) * pd(j, j));
    for (int i = 0; i < n; ++i) c(i, i) = 1.0;
    return SymMatrix(c);
}

/// Random SUE instance with a valid extended dispersion. Shape entries are kept
/// modest so the extended matrix stays comfortably positive-definite.
inline SueDistribution random_sue(int m, int q, const DensityGenerator& gen, Rng& rng,
                                  bool zero_shape = false, bool zero_trunc = false) {
    VectorXd xi(m), tau(q);
    for (int i = 0; i < m; ++i) xi(i) = rng.normal();
    for (int i = 0; i < q; ++i) tau(i) = zero_trunc ? 0.0 : 0.5 * rng.normal();
    SymMatrix Omega = random_pd(m, rng);
    SymMatrix Gamma_bar = q > 0 ? random_corr(q, rng) : SymMatrix();
    MatrixXd Delta = MatrixXd::Zero(m, q);
    if (!zero_shape) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < q; ++j) Delta(i, j) = 0.3 * rng.uniform() - 0.15;
    }
    return SueDistribution(std::move(xi), std::move(Omega), std::move(Delta), std::move(tau),
                           std::move(Gamma_bar), gen);
}

/// Composite Simpson rule (test-side quadrature, independent of the library's
/// oracle module where independence matters).
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
    if (n % 2 == 0) ++n;
    const double h = (hi - lo) / (n - 1);
    double s = f(lo) + f(hi);
    for (int i = 1; i < n - 1; ++i) s += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

inline double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace sue::test
