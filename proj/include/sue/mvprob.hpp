#pragma once

#include <cstdint>

#include "sue/generators.hpp"
#include "sue/linalg.hpp"

namespace sue {

/// Result of a rectangle-probability evaluation.
struct ProbEstimate {
    double value = 0.0;      // clamped to [0, 1]
    double abs_error = 0.0;  // estimated absolute error (99% confidence)
    long long n_points = 0;  // integration effort used
};

inline constexpr double kDefaultTolGaussian = 1e-6;
inline constexpr double kDefaultTolStudent = 1e-5;
inline constexpr double kDefaultTolGeneric = 1e-3;
inline constexpr int kMaxCdfDim = 40;

// Scalar kernels (shared by the multivariate routines).
double norm_cdf(double x);
double norm_quantile(double p);
double t_cdf(double x, double nu);
double chi2_quantile(double p, double nu);

/// P(Z <= upper) for Z ~ N(0, Sigma). Dimension 1 is the exact erfc-based CDF;
/// dimensions 2..40 use randomized QMC (separation of variables with variable
/// reordering, 12 shifted Richtmyer sequences keyed by the seed).
/// tol <= 0 selects the family default. Throws NonConvergence only when the
/// reported error still exceeds 10*tol after the point budget.
ProbEstimate mvn_cdf(const VectorXd& upper, const SymMatrix& Sigma, double tol, std::uint64_t seed);

/// P(T <= upper) for centered multivariate t with dispersion Sigma and nu
/// degrees of freedom; the chi-mixture extension of the same QMC kernel.
/// Dimension 1 uses the scalar t CDF via the incomplete beta function.
ProbEstimate mvt_cdf(const VectorXd& upper, const SymMatrix& Sigma, double nu, double tol,
                     std::uint64_t seed);

/// F_k(upper; Sigma, g): dispatch on the generator family. Gaussian and
/// Student routes use the closed kernels above; Conditioned generators are
/// integrated by importance-sampling Monte Carlo over the quotient-weighted
/// integrand. Radial generators are rejected (UnsupportedGenerator).
ProbEstimate elliptical_cdf(const VectorXd& upper, const SymMatrix& Sigma,
                            const DensityGenerator& g, double tol, std::uint64_t seed);

/// The family-default tolerance used when the caller passes tol <= 0.
double default_cdf_tol(const DensityGenerator& g);

}  // namespace sue
