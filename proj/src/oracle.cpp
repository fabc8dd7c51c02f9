#include "sue/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sue::oracle {

double Grid::node(int axis, int i) const {
    const Axis& a = axes[static_cast<size_t>(axis)];
    return a.lo + (a.hi - a.lo) * static_cast<double>(i) / static_cast<double>(a.n_points - 1);
}

double Grid::value_at(int i, int j) const {
    return values[static_cast<size_t>(i) * static_cast<size_t>(axes[1].n_points) +
                  static_cast<size_t>(j)];
}

namespace {

void check_axes(const std::vector<Grid::Axis>& axes) {
    if (axes.empty() || axes.size() > 2) {
        throw InvalidArgument("grid_posterior: grids are 1- or 2-dimensional");
    }
    for (const auto& a : axes) {
        if (a.n_points < 11) throw InvalidArgument("grid_posterior: need >= 11 points per axis");
        if (!(a.hi > a.lo)) throw InvalidArgument("grid_posterior: empty axis range");
    }
}

double trapezoid_weight(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

}  // namespace

Grid grid_posterior(const FnV& prior_pdf, const FnV& likelihood, std::vector<Grid::Axis> axes) {
    check_axes(axes);
    Grid g;
    g.axes = std::move(axes);

    if (g.dim() == 1) {
        const int n = g.axes[0].n_points;
        g.values.resize(static_cast<size_t>(n));
        VectorXd x(1);
        for (int i = 0; i < n; ++i) {
            x(0) = g.node(0, i);
            g.values[static_cast<size_t>(i)] = prior_pdf(x) * likelihood(x);
        }
        double vmax = *std::max_element(g.values.begin(), g.values.end());
        if (!(vmax > 0.0)) throw InvalidArgument("grid_posterior: product vanishes on the grid");
        if (g.values.front() > 1e-10 * vmax || g.values.back() > 1e-10 * vmax) {
            throw SupportTruncated("grid_posterior: grid boundary density exceeds 1e-10 * max");
        }
        const double h = (g.axes[0].hi - g.axes[0].lo) / (n - 1);
        double mass = 0.0;
        for (int i = 0; i < n; ++i) mass += trapezoid_weight(i, n) * g.values[static_cast<size_t>(i)];
        mass *= h;
        for (double& v : g.values) v /= mass;
        return g;
    }

    const int n0 = g.axes[0].n_points;
    const int n1 = g.axes[1].n_points;
    g.values.resize(static_cast<size_t>(n0) * static_cast<size_t>(n1));
    VectorXd x(2);
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j) {
            x(0) = g.node(0, i);
            x(1) = g.node(1, j);
            g.values[static_cast<size_t>(i) * static_cast<size_t>(n1) + static_cast<size_t>(j)] =
                prior_pdf(x) * likelihood(x);
        }
    }
    double vmax = *std::max_element(g.values.begin(), g.values.end());
    if (!(vmax > 0.0)) throw InvalidArgument("grid_posterior: product vanishes on the grid");
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j) {
            if (i == 0 || i == n0 - 1 || j == 0 || j == n1 - 1) {
                if (g.value_at(i, j) > 1e-10 * vmax) {
                    throw SupportTruncated("grid_posterior: grid boundary density exceeds 1e-10 * max");
                }
            }
        }
    }
    const double h0 = (g.axes[0].hi - g.axes[0].lo) / (n0 - 1);
    const double h1 = (g.axes[1].hi - g.axes[1].lo) / (n1 - 1);
    double mass = 0.0;
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j)
            mass += trapezoid_weight(i, n0) * trapezoid_weight(j, n1) * g.value_at(i, j);
    mass *= h0 * h1;
    for (double& v : g.values) v /= mass;
    return g;
}

double quadrature_mass(const Fn1& pdf, double lo, double hi, int n) {
    if (!(hi > lo)) throw InvalidArgument("quadrature_mass: empty interval");
    if (n < 3) n = 3;
    if (n % 2 == 0) ++n;
    const double h = (hi - lo) / (n - 1);
    double s = pdf(lo) + pdf(hi);
    for (int i = 1; i < n - 1; ++i) {
        s += pdf(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

McConditionResult mc_condition(const std::function<VectorXd(Rng&)>& joint_sampler,
                               const std::function<bool(const VectorXd&)>& predicate, long long n,
                               std::uint64_t seed) {
    if (n < 1) throw InvalidArgument("mc_condition: n must be >= 1");
    constexpr long long kChunk = 4096;
    constexpr long long kGuardProposals = 100000;

    std::vector<VectorXd> kept;
    long long proposals = 0;
    std::uint64_t chunk = 0;
    while (proposals < n) {
        Rng rng(seed, chunk);
        for (long long i = 0; i < kChunk && proposals < n; ++i) {
            VectorXd z = joint_sampler(rng);
            ++proposals;
            if (predicate(z)) kept.push_back(std::move(z));
        }
        ++chunk;
        if (proposals >= kGuardProposals &&
            static_cast<double>(kept.size()) / static_cast<double>(proposals) < 1e-4) {
            throw LowAcceptance("mc_condition: acceptance rate below 1e-4 after " +
                                std::to_string(proposals) + " proposals");
        }
    }
    MatrixXd out(kept.size(), kept.empty() ? 0 : kept.front().size());
    for (size_t i = 0; i < kept.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = kept[i];
    return McConditionResult{std::move(out),
                             static_cast<double>(kept.size()) / static_cast<double>(proposals),
                             proposals};
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

double bvn_cdf(double h, double k, double rho) {
    if (!(rho > -1.0 && rho < 1.0)) throw InvalidArgument("bvn_cdf: need |rho| < 1");
    // Phi2(h,k;rho) = Phi(h)Phi(k) + (1/2pi) int_0^rho exp(-(h^2+k^2-2hkr)/(2(1-r^2)))/sqrt(1-r^2) dr
    auto integrand = [&](double r) {
        const double om = 1.0 - r * r;
        return std::exp(-(h * h + k * k - 2.0 * h * k * r) / (2.0 * om)) / std::sqrt(om);
    };
    double tail = 0.0;
    if (rho != 0.0) {
        const int n = 4001;
        const double a = 0.0, b = rho;
        const double step = (b - a) / (n - 1);
        double s = integrand(a) + integrand(b);
        for (int i = 1; i < n - 1; ++i) s += integrand(a + i * step) * (i % 2 == 1 ? 4.0 : 2.0);
        tail = s * step / 3.0 / (2.0 * M_PI);
    }
    return norm_cdf(h) * norm_cdf(k) + tail;
}

}  // namespace sue::oracle
