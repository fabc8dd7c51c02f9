#include "sue/generators.hpp"

#include <cmath>
#include <sstream>

namespace sue {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

DensityGenerator DensityGenerator::gaussian() {
    DensityGenerator g;
    g.family_ = GeneratorFamily::Gaussian;
    return g;
}

DensityGenerator DensityGenerator::student_t(double nu) {
    if (!(nu > 0.0)) throw InvalidArgument("student_t: nu must be > 0");
    DensityGenerator g;
    g.family_ = GeneratorFamily::StudentT;
    g.nu_ = nu;
    return g;
}

DensityGenerator DensityGenerator::student_t_scaled(double nu, double scale) {
    if (!(nu > 0.0)) throw InvalidArgument("student_t_scaled: nu must be > 0");
    if (!(scale > 0.0)) throw InvalidArgument("student_t_scaled: scale must be > 0");
    DensityGenerator g;
    g.family_ = GeneratorFamily::StudentTScaled;
    g.nu_ = nu;
    g.scale_ = scale;
    return g;
}

DensityGenerator DensityGenerator::conditioned(DensityGenerator base, int m_cond, double q_shift) {
    if (m_cond < 0) throw InvalidArgument("conditioned: m_cond must be >= 0");
    if (!(q_shift >= 0.0)) throw InvalidArgument("conditioned: q_shift must be >= 0");
    if (base.family_ == GeneratorFamily::Conditioned) {
        // Quotients of quotients collapse: condition counts and shifts add.
        DensityGenerator g;
        g.family_ = GeneratorFamily::Conditioned;
        g.m_cond_ = base.m_cond_ + m_cond;
        g.q_shift_ = base.q_shift_ + q_shift;
        g.base_ = base.base_;
        return g;
    }
    DensityGenerator g;
    g.family_ = GeneratorFamily::Conditioned;
    g.m_cond_ = m_cond;
    g.q_shift_ = q_shift;
    g.base_ = std::make_shared<const DensityGenerator>(std::move(base));
    return g;
}

DensityGenerator DensityGenerator::radial(RadialFn log_g) {
    if (!log_g) throw InvalidArgument("radial: missing generator function");
    DensityGenerator g;
    g.family_ = GeneratorFamily::Radial;
    g.radial_ = std::make_shared<const RadialFn>(std::move(log_g));
    return g;
}

const DensityGenerator& DensityGenerator::base() const {
    if (!base_) throw InvalidArgument("base(): generator has no base");
    return *base_;
}

double log_c(double nu, int k) {
    if (!(nu > 0.0)) throw InvalidArgument("log_c: nu must be > 0");
    return std::lgamma(0.5 * (nu + k)) - std::lgamma(0.5 * nu) -
           0.5 * k * std::log(M_PI * nu);
}

double DensityGenerator::log_eval(int k, double u) const {
    if (k < 1) throw InvalidArgument("log_eval: dimension k must be >= 1");
    if (!(u >= 0.0)) throw InvalidArgument("log_eval: argument u must be >= 0");
    switch (family_) {
        case GeneratorFamily::Gaussian:
            return -0.5 * k * kLog2Pi - 0.5 * u;
        case GeneratorFamily::StudentT:
            return log_c(nu_, k) - 0.5 * (nu_ + k) * std::log1p(u / nu_);
        case GeneratorFamily::StudentTScaled:
            return -0.5 * k * std::log(scale_) + log_c(nu_, k) -
                   0.5 * (nu_ + k) * std::log1p(u / (scale_ * nu_));
        case GeneratorFamily::Conditioned:
            return base_->log_eval(k + m_cond_, u + q_shift_) - base_->log_eval(m_cond_, q_shift_);
        case GeneratorFamily::Radial:
            return (*radial_)(k, u);
    }
    throw InvalidArgument("log_eval: unknown generator family");
}

GeneratorFamily DensityGenerator::resolved_family() const {
    if (family_ == GeneratorFamily::Conditioned) return base_->resolved_family();
    return family_;
}

double DensityGenerator::resolved_nu() const {
    switch (family_) {
        case GeneratorFamily::StudentT:
        case GeneratorFamily::StudentTScaled:
            return nu_;
        case GeneratorFamily::Conditioned:
            return base_->resolved_nu();
        default:
            throw InvalidArgument("resolved_nu: generator has no Student base");
    }
}

std::string DensityGenerator::describe() const {
    std::ostringstream os;
    switch (family_) {
        case GeneratorFamily::Gaussian:
            os << "gaussian";
            break;
        case GeneratorFamily::StudentT:
            os << "student_t(nu=" << nu_ << ")";
            break;
        case GeneratorFamily::StudentTScaled:
            os << "student_t_scaled(nu=" << nu_ << ", scale=" << scale_ << ")";
            break;
        case GeneratorFamily::Conditioned:
            os << "conditioned(" << base_->describe() << ", m_cond=" << m_cond_
               << ", q_shift=" << q_shift_ << ")";
            break;
        case GeneratorFamily::Radial:
            os << "radial";
            break;
    }
    return os.str();
}

double eval_generator(const DensityGenerator& g, int k, double u) {
    return std::exp(g.log_eval(k, u));
}

DensityGenerator condition_generator(const DensityGenerator& g, int m_total, int m_cond, double q) {
    if (m_cond < 1 || m_cond >= m_total) {
        throw InvalidArgument("condition_generator: need 1 <= m_cond < m_total");
    }
    if (!(q >= 0.0)) throw InvalidArgument("condition_generator: Q must be >= 0");
    switch (g.family()) {
        case GeneratorFamily::Gaussian:
            // The Gaussian conditional generator coincides with the unconditional one.
            return g;
        case GeneratorFamily::StudentT:
            return DensityGenerator::student_t_scaled(g.nu() + m_cond,
                                                      (g.nu() + q) / (g.nu() + m_cond));
        case GeneratorFamily::StudentTScaled:
            // Quotient of a scaled Student closes in the family:
            // scale' = (scale*nu + Q)/(nu + m_cond), nu' = nu + m_cond.
            return DensityGenerator::student_t_scaled(
                g.nu() + m_cond, (g.scale() * g.nu() + q) / (g.nu() + m_cond));
        case GeneratorFamily::Conditioned:
        case GeneratorFamily::Radial:
            return DensityGenerator::conditioned(g, m_cond, q);
    }
    throw InvalidArgument("condition_generator: unknown generator family");
}

}  // namespace sue
