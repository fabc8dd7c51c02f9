#include "sue/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sue/rng.hpp"

namespace sue {

namespace {

constexpr double kZeroTol = 1e-13;  // exact-zero tolerance for latent reduction

void check_partition(const BlockPartition& p, int m) {
    check_index_set(p.idx_1, m, "BlockPartition(idx_1)");
    check_index_set(p.idx_2, m, "BlockPartition(idx_2)");
    if (p.idx_1.empty() || p.idx_2.empty()) {
        throw InvalidIndex("BlockPartition: both blocks must be nonempty");
    }
    if (static_cast<int>(p.idx_1.size() + p.idx_2.size()) != m) {
        throw InvalidIndex("BlockPartition: blocks must cover the full index range");
    }
    std::vector<bool> seen(static_cast<size_t>(m), false);
    for (int i : p.idx_1) seen[static_cast<size_t>(i)] = true;
    for (int j : p.idx_2) {
        if (seen[static_cast<size_t>(j)]) throw InvalidIndex("BlockPartition: blocks overlap");
    }
}

MatrixXd subrows(const MatrixXd& M, const IndexSet& rows) {
    MatrixXd out(rows.size(), M.cols());
    for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = M.row(rows[i]);
    return out;
}

MatrixXd subcols(const MatrixXd& M, const IndexSet& cols) {
    MatrixXd out(M.rows(), cols.size());
    for (size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = M.col(cols[j]);
    return out;
}

}  // namespace

SueDistribution::SueDistribution(VectorXd xi, SymMatrix Omega, MatrixXd Delta, VectorXd tau,
                                 SymMatrix Gamma_bar, DensityGenerator generator)
    : xi_(std::move(xi)),
      Omega_(std::move(Omega)),
      Delta_(std::move(Delta)),
      tau_(std::move(tau)),
      Gamma_bar_(std::move(Gamma_bar)),
      generator_(std::move(generator)) {
    const int m = static_cast<int>(xi_.size());
    const int q = static_cast<int>(tau_.size());
    if (m < 1) throw InvalidArgument("SueDistribution: observed dimension must be >= 1");
    if (Omega_.dim() != m) throw InvalidArgument("SueDistribution: Omega dimension mismatch");
    if (Delta_.rows() != m || Delta_.cols() != q) {
        throw InvalidArgument("SueDistribution: Delta must be m x q");
    }
    if (Gamma_bar_.dim() != q) throw InvalidArgument("SueDistribution: Gamma_bar dimension mismatch");
    for (int i = 0; i < q; ++i) {
        if (std::abs(Gamma_bar_(i, i) - 1.0) > 1e-10) {
            throw InvalidArgument("SueDistribution: Gamma_bar must have unit diagonal "
                                  "(use standardize_gamma for a raw Gamma)");
        }
    }
    if (!xi_.allFinite() || !Delta_.allFinite() || !tau_.allFinite()) {
        throw InvalidArgument("SueDistribution: non-finite parameter entries");
    }

    CorrSplit cs = corr_split(Omega_);
    omega_ = std::move(cs.omega);
    Omega_bar_ = std::move(cs.omega_bar);
    chol_Omega_ = cholesky(Omega_);
    logdet_Omega_ = logdet_from_chol(chol_Omega_);
    chol_Omega_bar_ = cholesky(Omega_bar_);

    if (q > 0) {
        // Dispersion of the selection representation; PD here makes the law proper.
        MatrixXd ext(m + q, m + q);
        ext.topLeftCorner(m, m) = Omega_bar_.mat();
        ext.topRightCorner(m, q) = Delta_;
        ext.bottomLeftCorner(q, m) = Delta_.transpose();
        ext.bottomRightCorner(q, q) = Gamma_bar_.mat();
        try {
            cholesky(SymMatrix(std::move(ext)));
        } catch (const NotPositiveDefinite&) {
            throw NotPositiveDefinite(
                "SueDistribution: extended dispersion [[Omega_bar, Delta],[Delta^T, Gamma_bar]] "
                "is not positive-definite");
        }
        MatrixXd W = chol_Omega_bar_.triangularView<Eigen::Lower>().solve(Delta_);
        skew_disp_ = SymMatrix(Gamma_bar_.mat() - W.transpose() * W);
    } else {
        skew_disp_ = SymMatrix();
    }
}

SueDistribution SueDistribution::elliptical(VectorXd xi, SymMatrix Omega,
                                            DensityGenerator generator) {
    const int m = static_cast<int>(xi.size());
    return SueDistribution(std::move(xi), std::move(Omega), MatrixXd(m, 0), VectorXd(0),
                           SymMatrix(), std::move(generator));
}

ProbEstimate SueDistribution::normalizing_orthant(double tol, std::uint64_t seed) const {
    if (q() == 0) return ProbEstimate{1.0, 0.0, 0};
    const double tol_key = tol > 0.0 ? tol : default_cdf_tol(generator_);
    const auto key = std::make_pair(tol_key, seed);
    {
        std::lock_guard<std::mutex> lock(orthant_cache_->mu);
        auto it = orthant_cache_->entries.find(key);
        if (it != orthant_cache_->entries.end()) return it->second;
    }
    ProbEstimate p = elliptical_cdf(tau_, Gamma_bar_, generator_, tol_key, seed);
    std::lock_guard<std::mutex> lock(orthant_cache_->mu);
    orthant_cache_->entries.emplace(key, p);
    return p;
}

DensityValue sue_pdf(const SueDistribution& d, const VectorXd& z, double tol,
                     std::uint64_t seed) {
    const int m = d.m();
    const int q = d.q();
    if (z.size() != m) throw InvalidArgument("sue_pdf: point dimension mismatch");

    VectorXd dz = z - d.xi();
    VectorXd u = d.chol_Omega().triangularView<Eigen::Lower>().solve(dz);
    const double Q = u.squaredNorm();
    const double log_fm = -0.5 * d.logdet_Omega() + d.generator().log_eval(m, Q);

    if (q == 0) {
        double v = std::exp(log_fm);
        return DensityValue{v, 0.0, log_fm};
    }

    VectorXd s = dz.cwiseQuotient(d.omega());
    VectorXd t = chol_solve(d.chol_Omega_bar_, s);
    VectorXd arg = d.tau() + d.Delta().transpose() * t;

    DensityGenerator g_cond = condition_generator(d.generator(), m + q, m, Q);
    ProbEstimate num = elliptical_cdf(arg, d.skew_dispersion(), g_cond, tol, mix_seed(seed, 0xa1));
    ProbEstimate den = d.normalizing_orthant(tol, mix_seed(seed, 0xa2));
    if (!(den.value > 0.0)) {
        throw NonConvergence("sue_pdf: normalizing orthant probability underflowed to zero");
    }

    const double fm = std::exp(log_fm);
    const double value = fm * num.value / den.value;
    const double abs_error = fm / den.value * (num.abs_error + (num.value / den.value) * den.abs_error);
    const double log_value = log_fm + std::log(num.value) - std::log(den.value);
    return DensityValue{value, abs_error, log_value};
}

ProbEstimate sue_cdf(const SueDistribution& d, const VectorXd& z, double tol, std::uint64_t seed) {
    const int m = d.m();
    const int q = d.q();
    if (z.size() != m) throw InvalidArgument("sue_cdf: point dimension mismatch");

    if (q == 0) return elliptical_cdf(z - d.xi(), d.Omega(), d.generator(), tol, seed);

    VectorXd upper(m + q);
    upper.head(m) = z - d.xi();
    upper.tail(q) = d.tau();
    MatrixXd J(m + q, m + q);
    J.topLeftCorner(m, m) = d.Omega().mat();
    MatrixXd cross = d.omega().asDiagonal() * d.Delta();
    J.topRightCorner(m, q) = -cross;
    J.bottomLeftCorner(q, m) = -cross.transpose();
    J.bottomRightCorner(q, q) = d.Gamma_bar().mat();

    ProbEstimate num = elliptical_cdf(upper, SymMatrix(std::move(J)), d.generator(), tol,
                                      mix_seed(seed, 0xb1));
    ProbEstimate den = d.normalizing_orthant(tol, mix_seed(seed, 0xb2));
    if (!(den.value > 0.0)) {
        throw NonConvergence("sue_cdf: normalizing orthant probability underflowed to zero");
    }
    double value = std::clamp(num.value / den.value, 0.0, 1.0);
    double err = (num.abs_error + value * den.abs_error) / den.value;
    return ProbEstimate{value, err, num.n_points + den.n_points};
}

SampleResult sue_sample(const SueDistribution& d, long long n, std::uint64_t seed) {
    if (n < 1) throw InvalidArgument("sue_sample: n must be >= 1");
    if (!d.generator().closed_form()) {
        throw UnsupportedGenerator("sue_sample: sampling requires a Gaussian or Student generator");
    }
    const int m = d.m();
    const int q = d.q();
    const int k = m + q;
    const GeneratorFamily fam = d.generator().family();
    const double nu = d.generator().nu();
    const double root_scale =
        fam == GeneratorFamily::StudentTScaled ? std::sqrt(d.generator().scale()) : 1.0;

    MatrixXd J(k, k);
    J.topLeftCorner(m, m) = d.Omega().mat();
    MatrixXd cross = d.omega().asDiagonal() * d.Delta();
    J.topRightCorner(m, q) = cross;
    J.bottomLeftCorner(q, m) = cross.transpose();
    J.bottomRightCorner(q, q) = d.Gamma_bar().mat();
    MatrixXd L = cholesky(SymMatrix(std::move(J)));

    VectorXd mu(k);
    mu.head(m) = d.xi();
    mu.tail(q) = d.tau();

    MatrixXd draws(n, m);
    long long accepted = 0;
    long long proposals = 0;
    constexpr long long kChunk = 4096;
    constexpr long long kGuardProposals = 100000;

    VectorXd v(k), x(k);
    for (std::uint64_t chunk = 0; accepted < n; ++chunk) {
        Rng rng(seed, chunk);
        for (long long t = 0; t < kChunk && accepted < n; ++t) {
            for (int i = 0; i < k; ++i) v(i) = rng.normal();
            double mix = root_scale;
            if (fam != GeneratorFamily::Gaussian) {
                mix *= std::sqrt(nu / chi2_quantile(rng.uniform(), nu));
            }
            x = mu + L * (v * mix);
            ++proposals;
            bool accept = true;
            for (int i = 0; i < q; ++i) {
                if (!(x(m + i) > 0.0)) {
                    accept = false;
                    break;
                }
            }
            if (accept) {
                draws.row(accepted) = x.head(m);
                ++accepted;
            }
        }
        if (proposals >= kGuardProposals &&
            static_cast<double>(accepted) / static_cast<double>(proposals) < 1e-4) {
            throw LowAcceptance("sue_sample: acceptance rate below 1e-4 after " +
                                std::to_string(proposals) + " proposals");
        }
    }
    return SampleResult{std::move(draws),
                        static_cast<double>(accepted) / static_cast<double>(proposals), proposals};
}

MomentEstimate sue_moments(const SueDistribution& d, long long n_mc, std::uint64_t seed) {
    SampleResult s = sue_sample(d, n_mc, seed);
    const int m = d.m();
    VectorXd mean = s.draws.colwise().mean();
    MatrixXd centered = s.draws.rowwise() - mean.transpose();
    MatrixXd cov = centered.transpose() * centered / static_cast<double>(n_mc - 1);
    VectorXd se(m);
    for (int i = 0; i < m; ++i) se(i) = std::sqrt(cov(i, i) / static_cast<double>(n_mc));
    return MomentEstimate{std::move(mean), SymMatrix(std::move(cov)), std::move(se), n_mc};
}

SueDistribution linear_transform(const SueDistribution& d, const MatrixXd& A, const VectorXd& b) {
    const int m = d.m();
    const int r = static_cast<int>(A.rows());
    if (A.cols() != m) throw InvalidArgument("linear_transform: A column count must equal m");
    if (b.size() != r) throw InvalidArgument("linear_transform: b size must equal rows of A");
    if (r < 1 || r > m) {
        throw RankDeficient("linear_transform: A must have 1 <= rows <= m for full row rank");
    }
    Eigen::JacobiSVD<MatrixXd> svd(A);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (!(smin > 1e-10 * smax)) {
        throw RankDeficient("linear_transform: A is rank-deficient at tolerance 1e-10*||A||");
    }

    SymMatrix Omega_A(A * d.Omega().mat() * A.transpose());
    VectorXd omega_A = corr_split(Omega_A).omega;
    MatrixXd Delta_A =
        omega_A.cwiseInverse().asDiagonal() * (A * (d.omega().asDiagonal() * d.Delta()));
    return SueDistribution(A * d.xi() + b, std::move(Omega_A), std::move(Delta_A), d.tau(),
                           d.Gamma_bar(), d.generator());
}

SueDistribution marginal(const SueDistribution& d, const IndexSet& C) {
    if (C.empty()) throw InvalidIndex("marginal: index set must be nonempty");
    check_index_set(C, d.m(), "marginal");
    return SueDistribution(subvector(d.xi(), C), SymMatrix(submatrix(d.Omega().mat(), C, C)),
                           subrows(d.Delta(), C), d.tau(), d.Gamma_bar(), d.generator());
}

SueDistribution condition_on_value(const SueDistribution& d, const BlockPartition& p,
                                   const VectorXd& z_j) {
    const int m = d.m();
    const int q = d.q();
    check_partition(p, m);
    const IndexSet& bi = p.idx_1;
    const IndexSet& bj = p.idx_2;
    const int mj = static_cast<int>(bj.size());
    if (z_j.size() != mj) throw InvalidArgument("condition_on_value: z_j size mismatch");

    VectorXd xi_i = subvector(d.xi(), bi);
    VectorXd xi_j = subvector(d.xi(), bj);
    MatrixXd Omega_ii = submatrix(d.Omega().mat(), bi, bi);
    MatrixXd Omega_ij = submatrix(d.Omega().mat(), bi, bj);
    MatrixXd Omega_jj = submatrix(d.Omega().mat(), bj, bj);
    MatrixXd Delta_i = subrows(d.Delta(), bi);
    MatrixXd Delta_j = subrows(d.Delta(), bj);
    VectorXd omega_i = subvector(d.omega(), bi);
    VectorXd omega_j = subvector(d.omega(), bj);
    MatrixXd Obar_jj = submatrix(d.Omega_bar().mat(), bj, bj);

    MatrixXd L_jj = cholesky(SymMatrix(Omega_jj));
    VectorXd resid = z_j - xi_j;
    VectorXd alpha = chol_solve(L_jj, resid);
    const double Q_j = resid.dot(alpha);

    VectorXd xi_c = xi_i + Omega_ij * alpha;
    MatrixXd W = L_jj.triangularView<Eigen::Lower>().solve(Omega_ij.transpose());
    SymMatrix Omega_c(Omega_ii - W.transpose() * W);

    DensityGenerator gen_c = condition_generator(d.generator(), m + q, mj, Q_j);

    if (q == 0) {
        return SueDistribution(std::move(xi_c), std::move(Omega_c),
                               MatrixXd(static_cast<int>(bi.size()), 0), VectorXd(0), SymMatrix(),
                               std::move(gen_c));
    }

    MatrixXd L_bar_jj = cholesky(SymMatrix(Obar_jj));
    MatrixXd V = L_bar_jj.triangularView<Eigen::Lower>().solve(Delta_j);
    MatrixXd S = d.Gamma_bar().mat() - V.transpose() * V;
    VectorXd gamma(q);
    for (int i = 0; i < q; ++i) {
        if (!(S(i, i) > 0.0)) {
            throw NotPositiveDefinite("condition_on_value: conditional latent dispersion is not PD");
        }
        gamma(i) = std::sqrt(S(i, i));
    }

    VectorXd u = chol_solve(L_bar_jj, VectorXd(resid.cwiseQuotient(omega_j)));
    VectorXd tau_c = (d.tau() + Delta_j.transpose() * u).cwiseQuotient(gamma);
    MatrixXd Gbar_c = gamma.cwiseInverse().asDiagonal() * S * gamma.cwiseInverse().asDiagonal();

    VectorXd omega_c = corr_split(Omega_c).omega;
    MatrixXd Delta_c = omega_c.cwiseInverse().asDiagonal() *
                       (omega_i.asDiagonal() * Delta_i -
                        Omega_ij * chol_solve(L_jj, MatrixXd(omega_j.asDiagonal() * Delta_j))) *
                       gamma.cwiseInverse().asDiagonal();

    return SueDistribution(std::move(xi_c), std::move(Omega_c), std::move(Delta_c),
                           std::move(tau_c), SymMatrix(std::move(Gbar_c)), std::move(gen_c));
}

SueDistribution condition_on_positivity(const SueDistribution& d, const BlockPartition& p) {
    const int m = d.m();
    const int q = d.q();
    check_partition(p, m);
    const IndexSet& bi = p.idx_1;
    const IndexSet& bj = p.idx_2;
    const int mi = static_cast<int>(bi.size());
    const int mj = static_cast<int>(bj.size());

    MatrixXd Obar_ij = submatrix(d.Omega_bar().mat(), bi, bj);
    MatrixXd Obar_jj = submatrix(d.Omega_bar().mat(), bj, bj);
    MatrixXd Delta_i = subrows(d.Delta(), bi);
    MatrixXd Delta_j = subrows(d.Delta(), bj);

    MatrixXd Delta_t(mi, mj + q);
    Delta_t.leftCols(mj) = Obar_ij;
    Delta_t.rightCols(q) = Delta_i;

    VectorXd tau_t(mj + q);
    tau_t.head(mj) = subvector(d.xi(), bj).cwiseQuotient(subvector(d.omega(), bj));
    tau_t.tail(q) = d.tau();

    MatrixXd Gbar_t(mj + q, mj + q);
    Gbar_t.topLeftCorner(mj, mj) = Obar_jj;
    Gbar_t.topRightCorner(mj, q) = Delta_j;
    Gbar_t.bottomLeftCorner(q, mj) = Delta_j.transpose();
    Gbar_t.bottomRightCorner(q, q) = d.Gamma_bar().mat();

    return SueDistribution(subvector(d.xi(), bi), SymMatrix(submatrix(d.Omega().mat(), bi, bi)),
                           std::move(Delta_t), std::move(tau_t), SymMatrix(std::move(Gbar_t)),
                           d.generator());
}

SueDistribution standardize_gamma(const VectorXd& xi, const SymMatrix& Omega,
                                  const MatrixXd& Delta, const VectorXd& tau,
                                  const SymMatrix& Gamma, const DensityGenerator& generator) {
    const int q = Gamma.dim();
    VectorXd gamma(q);
    for (int i = 0; i < q; ++i) {
        if (!(Gamma(i, i) > 0.0)) {
            throw NotPositiveDefinite("standardize_gamma: Gamma has a non-positive diagonal entry");
        }
        gamma(i) = std::sqrt(Gamma(i, i));
    }
    MatrixXd Gbar = gamma.cwiseInverse().asDiagonal() * Gamma.mat() * gamma.cwiseInverse().asDiagonal();
    for (int i = 0; i < q; ++i) Gbar(i, i) = 1.0;
    return SueDistribution(xi, Omega, Delta * gamma.cwiseInverse().asDiagonal(),
                           tau.cwiseQuotient(gamma), SymMatrix(std::move(Gbar)), generator);
}

SueDistribution reduce_latent(const SueDistribution& d) {
    const int q = d.q();
    if (q == 0) return d;
    const bool gaussian = d.generator().resolved_family() == GeneratorFamily::Gaussian;

    std::vector<bool> drop(static_cast<size_t>(q), false);
    for (int i = 0; i < q; ++i) {
        bool shape_zero = d.Delta().col(i).cwiseAbs().maxCoeff() <= kZeroTol;
        bool trunc_ok = gaussian || std::abs(d.tau()(i)) <= kZeroTol;
        drop[static_cast<size_t>(i)] = shape_zero && trunc_ok;
    }
    // A dropped block may only correlate with other dropped dimensions.
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < q; ++i) {
            if (!drop[static_cast<size_t>(i)]) continue;
            for (int j = 0; j < q; ++j) {
                if (j == i || drop[static_cast<size_t>(j)]) continue;
                if (std::abs(d.Gamma_bar()(i, j)) > kZeroTol) {
                    drop[static_cast<size_t>(i)] = false;
                    changed = true;
                    break;
                }
            }
        }
    }

    IndexSet keep;
    for (int i = 0; i < q; ++i) {
        if (!drop[static_cast<size_t>(i)]) keep.push_back(i);
    }
    if (static_cast<int>(keep.size()) == q) return d;
    if (keep.empty()) {
        return SueDistribution::elliptical(d.xi(), d.Omega(), d.generator());
    }
    return SueDistribution(d.xi(), d.Omega(), subcols(d.Delta(), keep), subvector(d.tau(), keep),
                           SymMatrix(submatrix(d.Gamma_bar().mat(), keep, keep)), d.generator());
}

SueDistribution absorb_scale(const SueDistribution& d) {
    if (d.generator().family() != GeneratorFamily::StudentTScaled) return d;
    const double s = d.generator().scale();
    return SueDistribution(d.xi(), SymMatrix(s * d.Omega().mat()), d.Delta(),
                           d.tau() / std::sqrt(s), d.Gamma_bar(),
                           DensityGenerator::student_t(d.generator().nu()));
}

}  // namespace sue
