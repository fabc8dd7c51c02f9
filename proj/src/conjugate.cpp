#include "sue/conjugate.hpp"

#include <cmath>

#include "sue/rng.hpp"

namespace sue {

namespace {

IndexSet range_set(int lo, int hi) {
    IndexSet out;
    for (int i = lo; i < hi; ++i) out.push_back(i);
    return out;
}

bool is_student(const SueDistribution& d) {
    GeneratorFamily f = d.generator().resolved_family();
    return f == GeneratorFamily::StudentT || f == GeneratorFamily::StudentTScaled;
}

/// Canonical posterior form: Student scale factors absorbed (plain SUT values,
/// never symbolic conditionals), then redundant latent dimensions dropped.
PosteriorReport finalize_posterior(SueDistribution posterior, int latent_growth,
                                   const RegressionJoint& rj) {
    GeneratorRecord rec;
    if (is_student(rj.joint)) {
        rec.family = "student_t";
        rec.nu_before = rj.joint.generator().nu();
        if (posterior.generator().family() == GeneratorFamily::StudentTScaled) {
            rec.alpha = posterior.generator().scale();
            posterior = absorb_scale(posterior);
        }
        rec.nu_after = posterior.generator().nu();
    } else if (rj.joint.generator().resolved_family() == GeneratorFamily::Gaussian) {
        rec.family = "gaussian";
    } else {
        rec.family = "generic";
    }
    posterior = reduce_latent(posterior);
    return PosteriorReport{std::move(posterior), latent_growth, std::move(rec), 0.0};
}

void validate_response(ObservationModel model, const VectorXd& y) { Observation check(model, y); (void)check; }

}  // namespace

std::string to_string(ObservationModel m) {
    switch (m) {
        case ObservationModel::Linear:
            return "linear";
        case ObservationModel::Binary:
            return "binary";
        case ObservationModel::Censored:
            return "censored";
    }
    return "?";
}

RegressionJoint::RegressionJoint(int p_, int n_, SueDistribution joint_, MatrixXd X_,
                                 ObservationModel model_)
    : p(p_), n(n_), joint(std::move(joint_)), X(std::move(X_)), model(model_) {
    if (p < 1 || n < 1) throw InvalidArgument("RegressionJoint: need p >= 1 and n >= 1");
    if (joint.m() != p + n) throw InvalidArgument("RegressionJoint: joint dimension must be p + n");
    if (X.rows() != n || X.cols() != p) throw InvalidArgument("RegressionJoint: X must be n x p");
    if (!X.allFinite()) throw InvalidArgument("RegressionJoint: X has non-finite entries");
}

Observation::Observation(ObservationModel model_, VectorXd y_) : model(model_), y(std::move(y_)) {
    if (!y.allFinite()) throw InvalidArgument("Observation: non-finite entries");
    if (model == ObservationModel::Binary) {
        for (int i = 0; i < y.size(); ++i) {
            if (y(i) != 0.0 && y(i) != 1.0) {
                throw InvalidArgument("Observation: binary responses must be 0 or 1");
            }
        }
    } else if (model == ObservationModel::Censored) {
        for (int i = 0; i < y.size(); ++i) {
            if (y(i) < 0.0) throw InvalidArgument("Observation: censored responses must be >= 0");
        }
    }
}

SueDistribution build_joint_response(const RegressionJoint& rj) {
    const int p = rj.p;
    const int n = rj.n;
    MatrixXd A = MatrixXd::Identity(p + n, p + n);
    A.bottomLeftCorner(n, p) = rj.X;
    return linear_transform(rj.joint, A, VectorXd::Zero(p + n));
}

SueDistribution prior_of(const RegressionJoint& rj) { return marginal(rj.joint, range_set(0, rj.p)); }

SueDistribution linear_likelihood(const RegressionJoint& rj, const VectorXd& beta) {
    if (beta.size() != rj.p) throw InvalidArgument("linear_likelihood: beta dimension mismatch");
    SueDistribution joint_by = build_joint_response(rj);
    BlockPartition part{range_set(rj.p, rj.p + rj.n), range_set(0, rj.p)};
    SueDistribution lik = condition_on_value(joint_by, part, beta);
    return absorb_scale(lik);
}

PosteriorReport linear_posterior(const RegressionJoint& rj, const VectorXd& y) {
    if (y.size() != rj.n) throw InvalidArgument("linear_posterior: y dimension mismatch");
    SueDistribution joint_by = build_joint_response(rj);
    BlockPartition part{range_set(0, rj.p), range_set(rj.p, rj.p + rj.n)};
    SueDistribution post = condition_on_value(joint_by, part, y);
    return finalize_posterior(std::move(post), 0, rj);
}

ProbEstimate binary_likelihood(const RegressionJoint& rj, const VectorXd& beta, const VectorXd& y,
                               double tol, std::uint64_t seed) {
    if (rj.model != ObservationModel::Binary) {
        throw InvalidArgument("binary_likelihood: model tag is not binary");
    }
    if (y.size() != rj.n) throw InvalidArgument("binary_likelihood: y dimension mismatch");
    validate_response(ObservationModel::Binary, y);
    if (beta.size() != rj.p) throw InvalidArgument("binary_likelihood: beta dimension mismatch");

    SueDistribution joint_by = build_joint_response(rj);
    BlockPartition part{range_set(rj.p, rj.p + rj.n), range_set(0, rj.p)};
    SueDistribution lat = condition_on_value(joint_by, part, beta);

    // Pr(y | beta) = Pr(D_y y_bar > 0 | beta) = CDF at 0 of (-D_y y_bar | beta).
    MatrixXd neg_sign = MatrixXd::Zero(rj.n, rj.n);
    for (int i = 0; i < rj.n; ++i) neg_sign(i, i) = -(2.0 * y(i) - 1.0);
    SueDistribution flipped = linear_transform(lat, neg_sign, VectorXd::Zero(rj.n));
    return sue_cdf(flipped, VectorXd::Zero(rj.n), tol, seed);
}

PosteriorReport binary_posterior(const RegressionJoint& rj, const VectorXd& y) {
    if (rj.model != ObservationModel::Binary) {
        throw InvalidArgument("binary_posterior: model tag is not binary");
    }
    if (y.size() != rj.n) throw InvalidArgument("binary_posterior: y dimension mismatch");
    validate_response(ObservationModel::Binary, y);

    SueDistribution joint_by = build_joint_response(rj);
    MatrixXd A = MatrixXd::Identity(rj.p + rj.n, rj.p + rj.n);
    for (int i = 0; i < rj.n; ++i) A(rj.p + i, rj.p + i) = 2.0 * y(i) - 1.0;
    SueDistribution signed_joint = linear_transform(joint_by, A, VectorXd::Zero(rj.p + rj.n));
    BlockPartition part{range_set(0, rj.p), range_set(rj.p, rj.p + rj.n)};
    SueDistribution post = condition_on_positivity(signed_joint, part);
    return finalize_posterior(std::move(post), rj.n, rj);
}

DensityValue censored_likelihood(const RegressionJoint& rj, const VectorXd& beta,
                                 const Observation& y, double tol, std::uint64_t seed) {
    if (rj.model != ObservationModel::Censored || y.model != ObservationModel::Censored) {
        throw InvalidArgument("censored_likelihood: model tag is not censored");
    }
    if (y.y.size() != rj.n) throw InvalidArgument("censored_likelihood: y dimension mismatch");
    if (beta.size() != rj.p) throw InvalidArgument("censored_likelihood: beta dimension mismatch");

    IndexSet obs_idx, cens_idx;
    for (int i = 0; i < rj.n; ++i) {
        if (y.y(i) == 0.0) {
            cens_idx.push_back(rj.p + i);
        } else {
            obs_idx.push_back(rj.p + i);
        }
    }
    const int n1 = static_cast<int>(obs_idx.size());
    const int n0 = static_cast<int>(cens_idx.size());
    SueDistribution joint_by = build_joint_response(rj);
    IndexSet beta_idx = range_set(0, rj.p);

    VectorXd y1(n1);
    {
        int k = 0;
        for (int i = 0; i < rj.n; ++i) {
            if (y.y(i) > 0.0) y1(k++) = y.y(i);
        }
    }

    DensityValue dens{1.0, 0.0, 0.0};
    if (n1 > 0) {
        IndexSet keep = beta_idx;
        keep.insert(keep.end(), obs_idx.begin(), obs_idx.end());
        SueDistribution sub = marginal(joint_by, keep);
        BlockPartition part{range_set(rj.p, rj.p + n1), range_set(0, rj.p)};
        SueDistribution lik1 = condition_on_value(sub, part, beta);
        dens = sue_pdf(lik1, y1, tol, mix_seed(seed, 0xc1));
    }
    if (n0 == 0) return dens;

    // CDF-at-zero of the censored block given (beta, y1).
    IndexSet eta_idx = beta_idx;
    eta_idx.insert(eta_idx.end(), obs_idx.begin(), obs_idx.end());
    BlockPartition part0;
    part0.idx_1 = cens_idx;
    part0.idx_2 = eta_idx;
    VectorXd eta(rj.p + n1);
    eta.head(rj.p) = beta;
    eta.tail(n1) = y1;
    SueDistribution cond0 = condition_on_value(joint_by, part0, eta);
    ProbEstimate cdf0 = sue_cdf(cond0, VectorXd::Zero(n0), tol, mix_seed(seed, 0xc2));

    double value = dens.value * cdf0.value;
    double abs_error = dens.value * cdf0.abs_error + cdf0.value * dens.abs_error;
    double log_value = dens.log_value + std::log(cdf0.value);
    return DensityValue{value, abs_error, log_value};
}

PosteriorReport censored_posterior(const RegressionJoint& rj, const Observation& y) {
    if (rj.model != ObservationModel::Censored || y.model != ObservationModel::Censored) {
        throw InvalidArgument("censored_posterior: model tag is not censored");
    }
    if (y.y.size() != rj.n) throw InvalidArgument("censored_posterior: y dimension mismatch");

    IndexSet obs_idx, cens_idx;
    for (int i = 0; i < rj.n; ++i) {
        if (y.y(i) == 0.0) {
            cens_idx.push_back(rj.p + i);
        } else {
            obs_idx.push_back(rj.p + i);
        }
    }
    const int n1 = static_cast<int>(obs_idx.size());
    const int n0 = static_cast<int>(cens_idx.size());
    SueDistribution joint_by = build_joint_response(rj);
    IndexSet beta_idx = range_set(0, rj.p);

    VectorXd y1(n1);
    {
        int k = 0;
        for (int i = 0; i < rj.n; ++i) {
            if (y.y(i) > 0.0) y1(k++) = y.y(i);
        }
    }

    if (n0 == 0) {
        BlockPartition part{beta_idx, obs_idx};
        SueDistribution post = condition_on_value(joint_by, part, y1);
        return finalize_posterior(std::move(post), 0, rj);
    }

    SueDistribution given_y1 = joint_by;
    if (n1 > 0) {
        BlockPartition part1;
        part1.idx_1 = beta_idx;
        part1.idx_1.insert(part1.idx_1.end(), cens_idx.begin(), cens_idx.end());
        part1.idx_2 = obs_idx;
        given_y1 = condition_on_value(joint_by, part1, y1);
    }
    // given_y1 is now over (beta, y_bar_0); flip the censored block so the
    // conditioning event y_bar_0 <= 0 becomes a positivity event.
    MatrixXd flip = MatrixXd::Identity(rj.p + n0, rj.p + n0);
    for (int i = 0; i < n0; ++i) flip(rj.p + i, rj.p + i) = -1.0;
    SueDistribution flipped = linear_transform(given_y1, flip, VectorXd::Zero(rj.p + n0));
    BlockPartition part0{range_set(0, rj.p), range_set(rj.p, rj.p + n0)};
    SueDistribution post = condition_on_positivity(flipped, part0);
    return finalize_posterior(std::move(post), n0, rj);
}

RegressionJoint make_skewnormal_regression(const MatrixXd& X, double sigma2, double alpha,
                                           const SueDistribution& prior, ObservationModel model) {
    if (!(sigma2 > 0.0)) throw InvalidArgument("make_skewnormal_regression: sigma2 must be > 0");
    if (prior.generator().resolved_family() != GeneratorFamily::Gaussian) {
        throw InvalidArgument("make_skewnormal_regression: prior must have a Gaussian generator");
    }
    const int n = static_cast<int>(X.rows());
    const int p = prior.m();
    const int qb = prior.q();
    const double alpha_bar = alpha / std::sqrt(1.0 + alpha * alpha);

    VectorXd xi = VectorXd::Zero(p + n);
    xi.head(p) = prior.xi();
    MatrixXd Omega = MatrixXd::Zero(p + n, p + n);
    Omega.topLeftCorner(p, p) = prior.Omega().mat();
    Omega.bottomRightCorner(n, n) = sigma2 * MatrixXd::Identity(n, n);
    MatrixXd Delta = MatrixXd::Zero(p + n, qb + n);
    Delta.topLeftCorner(p, qb) = prior.Delta();
    Delta.bottomRightCorner(n, n) = alpha_bar * MatrixXd::Identity(n, n);
    VectorXd tau = VectorXd::Zero(qb + n);
    tau.head(qb) = prior.tau();
    MatrixXd Gbar = MatrixXd::Identity(qb + n, qb + n);
    Gbar.topLeftCorner(qb, qb) = prior.Gamma_bar().mat();

    SueDistribution joint(std::move(xi), SymMatrix(std::move(Omega)), std::move(Delta),
                          std::move(tau), SymMatrix(std::move(Gbar)),
                          DensityGenerator::gaussian());
    return RegressionJoint(p, n, std::move(joint), X, model);
}

RegressionJoint make_student_regression(const MatrixXd& X, const SymMatrix& Omega_eps,
                                        const MatrixXd& Delta_eps, const SymMatrix& Gamma_bar,
                                        double nu, const VectorXd& prior_xi,
                                        const SymMatrix& prior_Omega, ObservationModel model) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(prior_xi.size());
    const int q = Gamma_bar.dim();
    if (Omega_eps.dim() != n) throw InvalidArgument("make_student_regression: Omega_eps must be n x n");
    if (Delta_eps.rows() != n || Delta_eps.cols() != q) {
        throw InvalidArgument("make_student_regression: Delta_eps must be n x q");
    }
    if (prior_Omega.dim() != p) throw InvalidArgument("make_student_regression: prior_Omega must be p x p");

    VectorXd xi = VectorXd::Zero(p + n);
    xi.head(p) = prior_xi;
    MatrixXd Omega = MatrixXd::Zero(p + n, p + n);
    Omega.topLeftCorner(p, p) = prior_Omega.mat();
    Omega.bottomRightCorner(n, n) = Omega_eps.mat();
    MatrixXd Delta = MatrixXd::Zero(p + n, q);
    Delta.bottomRows(n) = Delta_eps;

    SueDistribution joint(std::move(xi), SymMatrix(std::move(Omega)), std::move(Delta),
                          VectorXd::Zero(q), Gamma_bar, DensityGenerator::student_t(nu));
    return RegressionJoint(p, n, std::move(joint), X, model);
}

}  // namespace sue
