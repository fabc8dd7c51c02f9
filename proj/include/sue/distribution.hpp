#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>

#include "sue/generators.hpp"
#include "sue/linalg.hpp"
#include "sue/mvprob.hpp"

namespace sue {

/// Index split of an m-dimensional vector into two sub-blocks, both honored in
/// declared order. Drives conditioning and marginalization.
struct BlockPartition {
    IndexSet idx_1;  // kept block
    IndexSet idx_2;  // conditioned block
};

struct MomentEstimate {
    VectorXd mean;
    SymMatrix cov;
    VectorXd se_mean;
    long long n_samples = 0;
};

/// Density value with a propagated error bound (the skewing factor is itself a
/// numerical estimate).
struct DensityValue {
    double value = 0.0;
    double abs_error = 0.0;
    double log_value = 0.0;
};

struct SampleResult {
    MatrixXd draws;  // n x m
    double acceptance_rate = 1.0;
    long long n_proposals = 0;
};

/// Unified skew-elliptical distribution SUE_{m,q}(xi, Omega, Delta, tau,
/// Gamma_bar, g). Values are immutable after construction and freely shareable.
///
/// Construction enforces: Gamma_bar is a correlation matrix (unit diagonal to
/// 1e-10), Omega is positive-definite, and the extended dispersion
/// [[Omega_bar, Delta], [Delta^T, Gamma_bar]] of the selection representation
/// is positive-definite (which implies the conditional skewing dispersion
/// Gamma_bar - Delta^T Omega_bar^{-1} Delta is too). q = 0 is the elliptical
/// degenerate case with empty Delta and tau; orthant factors are then 1 by
/// convention.
class SueDistribution {
public:
    SueDistribution(VectorXd xi, SymMatrix Omega, MatrixXd Delta, VectorXd tau,
                    SymMatrix Gamma_bar, DensityGenerator generator);

    /// q = 0 elliptical case.
    static SueDistribution elliptical(VectorXd xi, SymMatrix Omega, DensityGenerator generator);

    int m() const { return static_cast<int>(xi_.size()); }
    int q() const { return static_cast<int>(tau_.size()); }

    const VectorXd& xi() const { return xi_; }
    const SymMatrix& Omega() const { return Omega_; }
    const MatrixXd& Delta() const { return Delta_; }
    const VectorXd& tau() const { return tau_; }
    const SymMatrix& Gamma_bar() const { return Gamma_bar_; }
    const DensityGenerator& generator() const { return generator_; }

    /// Scales omega = diag(Omega)^{1/2} and correlation Omega_bar.
    const VectorXd& omega() const { return omega_; }
    const SymMatrix& Omega_bar() const { return Omega_bar_; }
    /// Gamma_bar - Delta^T Omega_bar^{-1} Delta (the skewing-factor dispersion).
    const SymMatrix& skew_dispersion() const { return skew_disp_; }

    const MatrixXd& chol_Omega() const { return chol_Omega_; }
    double logdet_Omega() const { return logdet_Omega_; }

    /// F_q(tau; Gamma_bar, g): the density's normalizing orthant probability.
    /// Cached per (tolerance, seed) key; values are immutable so the cache is
    /// shared across copies and safe under concurrent calls.
    ProbEstimate normalizing_orthant(double tol, std::uint64_t seed) const;

private:
    VectorXd xi_;
    SymMatrix Omega_;
    MatrixXd Delta_;
    VectorXd tau_;
    SymMatrix Gamma_bar_;
    DensityGenerator generator_;

    VectorXd omega_;
    SymMatrix Omega_bar_;
    SymMatrix skew_disp_;
    MatrixXd chol_Omega_;
    MatrixXd chol_Omega_bar_;
    double logdet_Omega_ = 0.0;

    struct OrthantCache {
        std::mutex mu;
        std::map<std::pair<double, std::uint64_t>, ProbEstimate> entries;
    };
    std::shared_ptr<OrthantCache> orthant_cache_ = std::make_shared<OrthantCache>();

    friend DensityValue sue_pdf(const SueDistribution&, const VectorXd&, double, std::uint64_t);
};

/// Density at z with propagated error bound. tol <= 0 selects the family
/// default for the internal CDF factors.
DensityValue sue_pdf(const SueDistribution& d, const VectorXd& z, double tol = 0.0,
                     std::uint64_t seed = 0);

/// P(Z <= z).
ProbEstimate sue_cdf(const SueDistribution& d, const VectorXd& z, double tol = 0.0,
                     std::uint64_t seed = 0);

/// i.i.d. draws via the selection representation: propose from the joint
/// elliptical law of (z_bar, z_bar_0) and accept when every latent coordinate
/// is positive. Per-chunk streams are derived from (seed, chunk index), so the
/// output is independent of any internal chunking. Throws LowAcceptance when
/// the running acceptance estimate drops below 1e-4 after 1e5 proposals, and
/// UnsupportedGenerator outside the Gaussian/Student families.
SampleResult sue_sample(const SueDistribution& d, long long n, std::uint64_t seed);

/// Monte Carlo mean/covariance with standard errors.
MomentEstimate sue_moments(const SueDistribution& d, long long n_mc, std::uint64_t seed);

/// A z + b for full-row-rank A (checked to tolerance 1e-10 * ||A||).
SueDistribution linear_transform(const SueDistribution& d, const MatrixXd& A, const VectorXd& b);

/// Sub-vector law for the indices in C.
SueDistribution marginal(const SueDistribution& d, const IndexSet& C);

/// Law of the idx_1 block given the idx_2 block equals z_j. The returned tau
/// and Gamma_bar are already standardized, and the generator is the
/// conditional one keyed by the quadratic form of z_j.
SueDistribution condition_on_value(const SueDistribution& d, const BlockPartition& p,
                                   const VectorXd& z_j);

/// Law of the idx_1 block given every idx_2 coordinate is positive. The latent
/// dimension grows by |idx_2|; the base generator is unchanged.
SueDistribution condition_on_positivity(const SueDistribution& d, const BlockPartition& p);

/// Converts a parameterization with a full (non-correlation) positive-definite
/// Gamma into the equivalent standard form with a correlation Gamma_bar.
SueDistribution standardize_gamma(const VectorXd& xi, const SymMatrix& Omega,
                                  const MatrixXd& Delta, const VectorXd& tau,
                                  const SymMatrix& Gamma, const DensityGenerator& generator);

/// Drops redundant latent dimensions: any latent block with zero shape column
/// and zero correlation to the kept block, provided its truncation entry is
/// zero (Gaussian generators waive the truncation requirement). Returns the
/// q = 0 elliptical form when everything drops. The density is pointwise
/// invariant.
SueDistribution reduce_latent(const SueDistribution& d);

/// Rewrites a StudentTScaled generator as a plain Student generator by
/// absorbing the scale into Omega and tau (Omega -> s*Omega, tau -> tau/sqrt(s)).
/// The density is pointwise invariant. Other generators pass through.
SueDistribution absorb_scale(const SueDistribution& d);

}  // namespace sue
