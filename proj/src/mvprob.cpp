#include "sue/mvprob.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "sue/rng.hpp"

namespace sue {

double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double norm_quantile(double p) {
    p = std::clamp(p, 1e-300, 1.0 - 1e-16);
    return -M_SQRT2 * boost::math::erfc_inv(2.0 * p);
}

double t_cdf(double x, double nu) {
    if (!(nu > 0.0)) throw InvalidArgument("t_cdf: nu must be > 0");
    boost::math::students_t_distribution<double> dist(nu);
    return boost::math::cdf(dist, x);
}

double chi2_quantile(double p, double nu) {
    p = std::clamp(p, 1e-300, 1.0 - 1e-16);
    return 2.0 * boost::math::gamma_p_inv(0.5 * nu, p);
}

double default_cdf_tol(const DensityGenerator& g) {
    switch (g.family()) {
        case GeneratorFamily::Gaussian:
            return kDefaultTolGaussian;
        case GeneratorFamily::StudentT:
        case GeneratorFamily::StudentTScaled:
            return kDefaultTolStudent;
        default:
            return kDefaultTolGeneric;
    }
}

namespace {

constexpr int kNumShifts = 12;
constexpr long long kMinPointsPerShift = 256;
constexpr long long kMaxPointsPerShift = 1 << 18;

const double kSqrtPrimes[] = {
    1.4142135623730951, 1.7320508075688772, 2.23606797749979,  2.6457513110645907,
    3.3166247903554,    3.605551275463989,  4.123105625617661, 4.358898943540674,
    4.795831523312719,  5.385164807134504,  5.5677643628300215, 6.082762530298219,
    6.4031242374328485, 6.557438524302,     6.855654600401044, 7.280109889280518,
    7.681145747868608,  7.810249675906654,  8.18535277187245,  8.426149773176359,
    8.54400374531753,   8.888194417315589,  9.110433579144299, 9.433981132056603,
    9.848857801796104,  10.04987562112089,  10.14889156509222, 10.344080432788601,
    10.44030650891055,  10.63014581273465,  11.269427669584644, 11.445523142259598,
    11.704699910719626, 11.789826122551595, 12.206555615733702, 12.288205727444508,
    12.529964086141668, 12.767145334803704, 12.922847983320086, 13.152946437965905,
    13.379088160259652, 13.45362404707371,  13.820274961085254, 13.892443989449804,
};

struct QmcPrep {
    VectorXd b;     // standardized upper bounds, reordered
    MatrixXd chol;  // lower Cholesky factor of the reordered correlation
};

// Piecewise-Hermite table for u -> sqrt(chi2_quantile(u, nu) / nu), the chi
// mixing transform of the Student kernel. Exact values and derivatives at the
// nodes (dq/du = 1/pdf); points outside the tabulated interior fall back to
// the direct quantile. Keeps the per-point cost of the t kernel near the
// Gaussian one.
class ChiMixTable {
public:
    explicit ChiMixTable(double nu) : nu_(nu) {
        val_.resize(kNodes);
        der_.resize(kNodes);
        boost::math::chi_squared_distribution<double> chi(nu);
        for (int i = 1; i + 1 < kNodes; ++i) {
            double u = static_cast<double>(i) / (kNodes - 1);
            double q = boost::math::quantile(chi, u);
            val_[static_cast<size_t>(i)] = q;
            der_[static_cast<size_t>(i)] = 1.0 / boost::math::pdf(chi, q);
        }
    }

    double mix(double u) const {
        const double x = u * (kNodes - 1);
        const int i = static_cast<int>(x);
        if (i < 1 || i + 2 >= kNodes) return std::sqrt(chi2_quantile(u, nu_) / nu_);
        const double t = x - i;
        const double h = 1.0 / (kNodes - 1);
        const double y0 = val_[static_cast<size_t>(i)], y1 = val_[static_cast<size_t>(i) + 1];
        const double d0 = der_[static_cast<size_t>(i)] * h, d1 = der_[static_cast<size_t>(i) + 1] * h;
        const double t2 = t * t, t3 = t2 * t;
        double q = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 +
                   (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d1;
        return std::sqrt(q / nu_);
    }

private:
    static constexpr int kNodes = 2049;
    double nu_;
    std::vector<double> val_;
    std::vector<double> der_;
};

// Standardize Sigma to a correlation matrix, reject near-singular input, and
// reorder variables by standardized bound (smallest first) before factorizing.
QmcPrep prepare_qmc(const VectorXd& upper, const SymMatrix& Sigma) {
    const int k = Sigma.dim();
    CorrSplit cs = corr_split(Sigma);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Sigma.mat(), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12) {
        throw NotPositiveDefinite("mvprob: dispersion is singular or near-singular "
                                  "(condition number above 1e12); add jitter explicitly");
    }

    VectorXd b(k);
    for (int i = 0; i < k; ++i) b(i) = upper(i) / cs.omega(i);

    std::vector<int> order(static_cast<size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int c) { return b(a) < b(c); });

    VectorXd b_ord(k);
    MatrixXd corr_ord(k, k);
    for (int i = 0; i < k; ++i) {
        b_ord(i) = b(order[static_cast<size_t>(i)]);
        for (int j = 0; j < k; ++j)
            corr_ord(i, j) = cs.omega_bar(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
    }
    return QmcPrep{b_ord, cholesky(SymMatrix(corr_ord))};
}

// Genz separation-of-variables integrand for P(Z <= b), Z ~ N(0, L L^T),
// driven by a point w in the unit cube of dimension k-1.
double sov_integrand(const VectorXd& b, const MatrixXd& L, const double* w, double bound_scale,
                     double* y) {
    const int k = static_cast<int>(b.size());
    double e = norm_cdf(bound_scale * b(0) / L(0, 0));
    double f = e;
    for (int i = 1; i < k; ++i) {
        if (!(e > 0.0)) return 0.0;
        double z = std::min(w[i - 1] * e, 1.0 - 1e-16);
        y[i - 1] = norm_quantile(z);
        double s = 0.0;
        for (int j = 0; j < i; ++j) s += L(i, j) * y[j];
        e = norm_cdf((bound_scale * b(i) - s) / L(i, i));
        f *= e;
    }
    return f;
}

// Randomized-QMC driver shared by the Gaussian and Student kernels. For the
// Student case one extra cube coordinate feeds the chi mixing variable.
ProbEstimate qmc_integrate(const QmcPrep& prep, double nu, bool student, double tol,
                           std::uint64_t seed) {
    const int k = static_cast<int>(prep.b.size());
    const int cube_dim = student ? k : k - 1;
    std::unique_ptr<ChiMixTable> chi_table;
    if (student) chi_table = std::make_unique<ChiMixTable>(nu);

    std::vector<double> shift(static_cast<size_t>(kNumShifts * std::max(cube_dim, 1)));
    for (int r = 0; r < kNumShifts; ++r) {
        Rng rng(seed, static_cast<std::uint64_t>(r) + 1);
        for (int j = 0; j < cube_dim; ++j) shift[static_cast<size_t>(r * cube_dim + j)] = rng.uniform();
    }

    std::vector<double> sums(kNumShifts, 0.0);
    std::vector<double> w(static_cast<size_t>(std::max(cube_dim, 1)));
    std::vector<double> y(static_cast<size_t>(std::max(k - 1, 1)));

    long long n_done = 0;
    long long target = kMinPointsPerShift;
    double value = 0.0;
    double err = 0.0;
    while (true) {
        for (int r = 0; r < kNumShifts; ++r) {
            for (long long n = n_done + 1; n <= target; ++n) {
                for (int j = 0; j < cube_dim; ++j) {
                    double v = static_cast<double>(n) * kSqrtPrimes[j] +
                               shift[static_cast<size_t>(r * cube_dim + j)];
                    v -= std::floor(v);
                    // Tent-map periodization; recovers near O(N^-2) convergence
                    // for smooth non-periodic integrands.
                    w[static_cast<size_t>(j)] = 1.0 - std::abs(2.0 * v - 1.0);
                }
                double scale = 1.0;
                const double* wz = w.data();
                if (student) {
                    scale = chi_table->mix(w[0]);
                    wz = w.data() + 1;
                }
                sums[static_cast<size_t>(r)] += sov_integrand(prep.b, prep.chol, wz, scale, y.data());
            }
        }
        n_done = target;

        double mean = 0.0;
        for (double s : sums) mean += s / static_cast<double>(n_done);
        mean /= kNumShifts;
        double var = 0.0;
        for (double s : sums) {
            double d = s / static_cast<double>(n_done) - mean;
            var += d * d;
        }
        var /= (kNumShifts - 1);
        value = mean;
        err = 3.0 * std::sqrt(var / kNumShifts);

        if (err <= tol || n_done >= kMaxPointsPerShift) break;
        target = n_done * 2;
    }

    if (err > 10.0 * tol) {
        throw NonConvergence("mvprob: QMC error " + std::to_string(err) +
                             " exceeds 10x tolerance " + std::to_string(tol) +
                             " after the point budget");
    }
    return ProbEstimate{std::clamp(value, 0.0, 1.0), err, kNumShifts * n_done};
}

void check_cdf_args(const VectorXd& upper, const SymMatrix& Sigma, double tol) {
    if (Sigma.dim() < 1) throw InvalidArgument("mvprob: dimension must be >= 1");
    if (upper.size() != Sigma.dim()) throw InvalidArgument("mvprob: bound/dispersion size mismatch");
    if (Sigma.dim() > kMaxCdfDim) {
        throw InvalidArgument("mvprob: dimension exceeds the supported cap of 40");
    }
    if (!(tol > 0.0)) throw InvalidArgument("mvprob: tolerance must be > 0");
}

// Importance-sampling Monte Carlo for conditioned (quotient-form) generators:
// integrate the target elliptical density against a heavy-tailed multivariate-t
// proposal and weight by the density ratio.
ProbEstimate mc_generic_cdf(const VectorXd& upper, const SymMatrix& Sigma,
                            const DensityGenerator& g, double tol, std::uint64_t seed) {
    const int k = Sigma.dim();
    GeneratorFamily base = g.resolved_family();
    if (base == GeneratorFamily::Radial) {
        throw UnsupportedGenerator("elliptical_cdf: radial generators have no samplable "
                                   "reference law; CDF evaluation is not available");
    }
    double prop_nu = 4.0;
    if (base == GeneratorFamily::StudentT || base == GeneratorFamily::StudentTScaled) {
        prop_nu = std::min(g.resolved_nu(), 4.0);
    }
    const double prop_scale = 3.0;  // dispersion inflation keeps weights bounded

    MatrixXd L = cholesky(Sigma);
    const double logdet = logdet_from_chol(L);
    DensityGenerator prop = DensityGenerator::student_t(prop_nu);
    const double log_prop_norm = -0.5 * k * std::log(prop_scale) - 0.5 * logdet;
    const double log_target_norm = -0.5 * logdet;

    Rng rng(seed, 0x6d63ULL);
    const long long max_n = 1 << 22;
    long long n = 0;
    double sum = 0.0, sum2 = 0.0;
    VectorXd zstd(k), z(k);
    double value = 0.0, err = 0.0;
    long long target = 4096;
    while (true) {
        for (; n < target; ++n) {
            for (int i = 0; i < k; ++i) zstd(i) = rng.normal();
            double chi = chi2_quantile(rng.uniform(), prop_nu);
            double mix = std::sqrt(prop_nu / chi) * std::sqrt(prop_scale);
            z = L * (zstd * mix);
            bool inside = true;
            for (int i = 0; i < k; ++i) {
                if (z(i) > upper(i)) {
                    inside = false;
                    break;
                }
            }
            if (!inside) continue;
            double q = zstd.squaredNorm() * mix * mix;  // z^T Sigma^{-1} z
            double lw = log_target_norm + g.log_eval(k, q) -
                        (log_prop_norm + prop.log_eval(k, q / prop_scale));
            double wgt = std::exp(lw);
            sum += wgt;
            sum2 += wgt * wgt;
        }
        double mean = sum / static_cast<double>(n);
        double var = std::max(0.0, sum2 / static_cast<double>(n) - mean * mean);
        value = mean;
        err = 3.0 * std::sqrt(var / static_cast<double>(n));
        if ((err <= tol && n >= 65536) || n >= max_n) break;
        target = n * 2;
    }
    if (err > 10.0 * tol) {
        throw NonConvergence("elliptical_cdf: Monte Carlo error " + std::to_string(err) +
                             " exceeds 10x tolerance " + std::to_string(tol));
    }
    return ProbEstimate{std::clamp(value, 0.0, 1.0), err, n};
}

}  // namespace

ProbEstimate mvn_cdf(const VectorXd& upper, const SymMatrix& Sigma, double tol,
                     std::uint64_t seed) {
    if (tol <= 0.0) tol = kDefaultTolGaussian;
    check_cdf_args(upper, Sigma, tol);
    if (Sigma.dim() == 1) {
        if (!(Sigma(0, 0) > 0.0)) throw NotPositiveDefinite("mvn_cdf: non-positive variance");
        return ProbEstimate{norm_cdf(upper(0) / std::sqrt(Sigma(0, 0))), 2e-16, 1};
    }
    QmcPrep prep = prepare_qmc(upper, Sigma);
    return qmc_integrate(prep, 0.0, /*student=*/false, tol, seed);
}

ProbEstimate mvt_cdf(const VectorXd& upper, const SymMatrix& Sigma, double nu, double tol,
                     std::uint64_t seed) {
    if (!(nu > 0.0)) throw InvalidArgument("mvt_cdf: nu must be > 0");
    if (tol <= 0.0) tol = kDefaultTolStudent;
    check_cdf_args(upper, Sigma, tol);
    if (Sigma.dim() == 1) {
        if (!(Sigma(0, 0) > 0.0)) throw NotPositiveDefinite("mvt_cdf: non-positive variance");
        return ProbEstimate{t_cdf(upper(0) / std::sqrt(Sigma(0, 0)), nu), 4e-16, 1};
    }
    QmcPrep prep = prepare_qmc(upper, Sigma);
    return qmc_integrate(prep, nu, /*student=*/true, tol, seed);
}

ProbEstimate elliptical_cdf(const VectorXd& upper, const SymMatrix& Sigma,
                            const DensityGenerator& g, double tol, std::uint64_t seed) {
    if (Sigma.dim() == 0 && upper.size() == 0) {
        // Zero-dimensional orthant probability: F_0 == 1 by convention.
        return ProbEstimate{1.0, 0.0, 0};
    }
    if (tol <= 0.0) tol = default_cdf_tol(g);
    switch (g.family()) {
        case GeneratorFamily::Gaussian:
            return mvn_cdf(upper, Sigma, tol, seed);
        case GeneratorFamily::StudentT:
            return mvt_cdf(upper, Sigma, g.nu(), tol, seed);
        case GeneratorFamily::StudentTScaled: {
            const double root = std::sqrt(g.scale());
            return mvt_cdf(upper / root, Sigma, g.nu(), tol, seed);
        }
        case GeneratorFamily::Conditioned:
            check_cdf_args(upper, Sigma, tol);
            return mc_generic_cdf(upper, Sigma, g, tol, seed);
        case GeneratorFamily::Radial:
            throw UnsupportedGenerator("elliptical_cdf: radial generators are accepted for "
                                       "density evaluation only");
    }
    throw InvalidArgument("elliptical_cdf: unknown generator family");
}

}  // namespace sue
