#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sue/errors.hpp"
#include "sue/linalg.hpp"
#include "sue/rng.hpp"

namespace sue::oracle {

/// Dense evaluation grid, dimension 1 or 2, >= 11 points per axis.
struct Grid {
    struct Axis {
        double lo = 0.0;
        double hi = 0.0;
        int n_points = 0;
    };
    std::vector<Axis> axes;
    std::vector<double> values;  // row-major for 2-D: values[i*axes[1].n + j]

    int dim() const { return static_cast<int>(axes.size()); }
    double node(int axis, int i) const;
    double value_at(int i) const { return values[static_cast<size_t>(i)]; }
    double value_at(int i, int j) const;
};

using Fn1 = std::function<double(double)>;
using FnV = std::function<double(const VectorXd&)>;

/// Pointwise product prior(x) * likelihood(x) on the grid, trapezoid-normalized
/// to integrate to one. Throws SupportTruncated when the boundary values exceed
/// 1e-10 times the grid maximum (the grid must cover the effective support).
Grid grid_posterior(const FnV& prior_pdf, const FnV& likelihood, std::vector<Grid::Axis> axes);

/// Composite Simpson estimate of the integral of pdf over [lo, hi] with n
/// function evaluations (n is bumped to the next odd count).
double quadrature_mass(const Fn1& pdf, double lo, double hi, int n);

struct McConditionResult {
    MatrixXd accepted;  // one row per accepted draw
    double acceptance_rate = 0.0;
    long long n_proposals = 0;
};

/// Draws n samples from joint_sampler, keeps those satisfying the predicate.
/// Throws LowAcceptance when the running acceptance estimate drops below 1e-4
/// after 1e5 proposals. The sampler receives per-chunk streams derived from
/// (seed, chunk index), so results do not depend on chunking.
McConditionResult mc_condition(const std::function<VectorXd(Rng&)>& joint_sampler,
                               const std::function<bool(const VectorXd&)>& predicate, long long n,
                               std::uint64_t seed);

// Reference CDFs, deliberately independent of the QMC kernel in mvprob:
// the scalar case goes straight through erfc, the bivariate case through a
// one-dimensional quadrature of the tetrachoric integral.
double norm_cdf(double x);
double norm_pdf(double x);
/// P(X <= h, Y <= k) for standard bivariate normal with correlation rho.
double bvn_cdf(double h, double k, double rho);

}  // namespace sue::oracle
