#pragma once

#include <functional>
#include <memory>
#include <string>

#include "sue/errors.hpp"

namespace sue {

enum class GeneratorFamily {
    Gaussian,
    StudentT,
    StudentTScaled,
    Conditioned,  // generic quotient form g^(k+m)(u+Q)/g^(m)(Q) over an arbitrary base
    Radial,       // user-supplied log g^(k)(u); density evaluation only
};

/// An elliptical density generator g^(k), evaluated at an explicit dimension k
/// per call. Values are immutable and cheap to copy.
///
/// The Gaussian and Student families carry closed forms. Conditioning a
/// Student generator is normalized immediately into StudentTScaled (degrees of
/// freedom bumped by the conditioned dimension, scale (nu + Q)/(nu + m)
/// attached), so downstream CDF evaluation reuses the plain multivariate-t
/// kernel. All evaluation is carried in log space; eval_generator exponentiates
/// at the boundary.
class DensityGenerator {
public:
    using RadialFn = std::function<double(int k, double u)>;  // returns log g^(k)(u)

    static DensityGenerator gaussian();
    static DensityGenerator student_t(double nu);
    static DensityGenerator student_t_scaled(double nu, double scale);
    static DensityGenerator conditioned(DensityGenerator base, int m_cond, double q_shift);
    static DensityGenerator radial(RadialFn log_g);

    GeneratorFamily family() const { return family_; }
    double nu() const { return nu_; }
    double scale() const { return scale_; }
    int m_cond() const { return m_cond_; }
    double q_shift() const { return q_shift_; }
    const DensityGenerator& base() const;

    double log_eval(int k, double u) const;

    /// Family after unwrapping Conditioned layers; dictates CDF/sampling routes.
    GeneratorFamily resolved_family() const;
    /// Degrees of freedom of the resolved Student base (throws on other families).
    double resolved_nu() const;

    /// True for the families with exact CDF and sampling routes.
    bool closed_form() const {
        return family_ == GeneratorFamily::Gaussian || family_ == GeneratorFamily::StudentT ||
               family_ == GeneratorFamily::StudentTScaled;
    }

    std::string describe() const;

private:
    DensityGenerator() = default;
    GeneratorFamily family_ = GeneratorFamily::Gaussian;
    double nu_ = 0.0;
    double scale_ = 1.0;
    int m_cond_ = 0;
    double q_shift_ = 0.0;
    std::shared_ptr<const DensityGenerator> base_;
    std::shared_ptr<const RadialFn> radial_;
};

/// g^(k)(u). Throws InvalidArgument for u < 0 or k < 1.
double eval_generator(const DensityGenerator& g, int k, double u);

/// The conditional generator g_Q arising when m_cond of m_total dimensions are
/// fixed with quadratic form Q: g_Q^(k)(u) = g^(k+m_cond)(u+Q) / g^(m_cond)(Q).
/// Gaussian is invariant; Student closes into StudentTScaled; anything else is
/// wrapped as Conditioned.
DensityGenerator condition_generator(const DensityGenerator& g, int m_total, int m_cond, double q);

/// log of the Student-t normalizing constant c(nu, k) = Gamma[(nu+k)/2] /
/// (Gamma[nu/2] (pi nu)^{k/2}).
double log_c(double nu, int k);

}  // namespace sue
