#pragma once

#include <string>

#include "sue/distribution.hpp"

namespace sue {

enum class ObservationModel { Linear, Binary, Censored };

std::string to_string(ObservationModel m);

/// A joint SUE law over (beta, eps) of dimension p + n (first p coordinates are
/// beta) plus the design matrix and the observation-model tag. Input to all
/// conjugacy engines. The joint specification is what makes the closed-form
/// posterior maps below exact; an arbitrary (prior, likelihood) pair generally
/// breaks conjugacy outside the Gaussian case.
struct RegressionJoint {
    int p = 0;
    int n = 0;
    SueDistribution joint;  // over (beta, eps), dimension p + n
    MatrixXd X;             // n x p
    ObservationModel model = ObservationModel::Linear;

    RegressionJoint(int p_, int n_, SueDistribution joint_, MatrixXd X_, ObservationModel model_);
};

/// Model-tagged response payload. Binary entries are 0/1; censored entries are
/// >= 0 with an exact floating-point zero marking a censored coordinate.
struct Observation {
    ObservationModel model = ObservationModel::Linear;
    VectorXd y;

    Observation(ObservationModel model_, VectorXd y_);
};

/// How the density generator evolved through a conjugate update. For Student
/// pipelines this records the Corollary-style degrees-of-freedom bump and the
/// dispersion scaling factor absorbed into the posterior parameters; Gaussian
/// pipelines record alpha = 1 and an unchanged family.
struct GeneratorRecord {
    std::string family;      // "gaussian" or "student_t"
    double nu_before = 0.0;  // 0 for Gaussian
    double nu_after = 0.0;
    double alpha = 1.0;      // dispersion scale absorbed into Omega / tau
};

struct PosteriorReport {
    SueDistribution posterior;  // over beta, canonicalized (standardized + reduced)
    int latent_growth = 0;      // 0 linear, n binary, n0 censored
    GeneratorRecord generator;
    double cdf_error_consumed = 0.0;  // posterior parameters are exact algebra
};

/// Joint law of (beta, y) [or (beta, y_bar) for binary/censored models] under
/// y = X beta + eps, via the block map [[I, 0], [X, I]].
SueDistribution build_joint_response(const RegressionJoint& rj);

/// Marginal law of beta (the prior); independent of X and the model tag.
SueDistribution prior_of(const RegressionJoint& rj);

/// Law of (y | beta) for the linear model.
SueDistribution linear_likelihood(const RegressionJoint& rj, const VectorXd& beta);

/// Closed-form posterior of beta given a fully observed y.
PosteriorReport linear_posterior(const RegressionJoint& rj, const VectorXd& y);

/// Pr(y | beta) for a binary configuration y in {0,1}^n: the orthant
/// probability of the sign-flipped latent response.
ProbEstimate binary_likelihood(const RegressionJoint& rj, const VectorXd& beta, const VectorXd& y,
                               double tol = 0.0, std::uint64_t seed = 0);

/// Closed-form posterior of beta given binary data; latent dimension grows by n.
PosteriorReport binary_posterior(const RegressionJoint& rj, const VectorXd& y);

/// p(y | beta) for a censored observation: the density of the uncensored block
/// times the CDF-at-zero of the censored block given it.
DensityValue censored_likelihood(const RegressionJoint& rj, const VectorXd& beta,
                                 const Observation& y, double tol = 0.0, std::uint64_t seed = 0);

/// Closed-form posterior of beta given censored data; latent dimension grows
/// by the number of censored coordinates.
PosteriorReport censored_posterior(const RegressionJoint& rj, const Observation& y);

/// Skew-normal regression block construction: Gaussian-generator prior plus
/// i.i.d. skew-normal noise with variance sigma2 and slant alpha.
RegressionJoint make_skewnormal_regression(const MatrixXd& X, double sigma2, double alpha,
                                           const SueDistribution& prior, ObservationModel model);

/// Student regression block construction: T prior (Delta_beta = 0, tau = 0,
/// no beta/eps covariance) with unified skew-t noise blocks.
RegressionJoint make_student_regression(const MatrixXd& X, const SymMatrix& Omega_eps,
                                        const MatrixXd& Delta_eps, const SymMatrix& Gamma_bar,
                                        double nu, const VectorXd& prior_xi,
                                        const SymMatrix& prior_Omega, ObservationModel model);

}  // namespace sue
