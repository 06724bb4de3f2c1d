#include "iamnet/analytic_spla.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace iamnet {

SplaContext::SplaContext(const NetworkConfig& raw, QuadSpec q) : cfg_(analytic_view(raw)), q_(q) {
    if (auto errs = validate(raw); !errs.empty()) throw ConfigError(std::move(errs));
    const double t0 = cfg_.tiers[0].assoc_weight, t1 = cfg_.tiers[1].assoc_weight;
    if (std::abs(t0 - t1) > 1e-12 * std::max(t0, t1))
        throw std::invalid_argument("SplaContext requires equal association weights");
    lam_ = cfg_.tiers[0].density + cfg_.tiers[1].density;
    alpha_ = cfg_.alpha;
    tau_ = cfg_.tau;
    p0_ = cfg_.p0;
    eps_ = cfg_.epsilon;
    noise_ = noise_power(cfg_);
    c_ = std::isinf(cfg_.i0) ? 0.0 : std::pow(p0_ / cfg_.i0, 1.0 / alpha_);
    kmax_ = std::max(1.0, c_ * c_);
    if (std::isinf(cfg_.p_max)) {
        vmax_ = kInf;
    } else if (eps_ == 0.0) {
        vmax_ = cfg_.p_max > p0_ ? kInf : 0.0;
    } else {
        vmax_ = std::pow(cfg_.p_max / p0_, 1.0 / (alpha_ * eps_)) / tau_;
    }
}

void SplaContext::require_full_inversion(const char* what) const {
    if (eps_ != 1.0) throw std::domain_error(std::string(what) + " requires epsilon = 1");
}

double SplaContext::pr_active_spla() const {
    if (eps_ != 1.0) return pr_active_spla_quadrature();
    if (std::isinf(vmax_)) return 1.0 / kmax_;
    const double u = kPi * lam_ * vmax_ * vmax_ * kmax_;
    return -std::expm1(-u) / kmax_;
}

double SplaContext::pr_active_spla_quadrature() const {
    auto g = [&](double r) { return c_ == 0.0 ? 0.0 : c_ * std::pow(tau_ * r, eps_) / tau_; };
    const double upper = std::min(vmax_, std::sqrt(40.0 / (kPi * lam_)));
    if (!(upper > 0.0)) return 0.0;
    const double ell = 1.0 / std::sqrt(kPi * lam_);
    auto pts = geometric_points(std::min(1e-4 * ell / std::max(1.0, c_), 0.5 * upper), upper);
    pts.push_back(0.0);
    if (c_ > 0.0 && eps_ < 1.0) {
        const double v = std::pow(c_, 1.0 / (1.0 - eps_)) / tau_;
        if (v < upper) pts.push_back(v);
    }
    return integrate_piecewise(
        [&](double r) {
            const double m = std::max(r, g(r));
            return 2.0 * kPi * lam_ * r * std::exp(-kPi * lam_ * m * m);
        },
        pts, q_);
}

double SplaContext::serving_distance_pdf_spla(double v) const {
    if (!(v > 0.0) || !(v < vmax_)) return 0.0;
    const double g = c_ == 0.0 ? 0.0 : c_ * std::pow(tau_ * v, eps_) / tau_;
    const double m = std::max(v, g);
    return 2.0 * kPi * lam_ * v * std::exp(-kPi * lam_ * m * m) / pr_active_spla();
}

double SplaContext::mean_transmit_power_spla() const {
    require_full_inversion("mean_transmit_power_spla");
    const double s = 1.0 + alpha_ / 2.0;
    const double u = std::isinf(vmax_) ? kInf : kPi * lam_ * vmax_ * vmax_ * kmax_;
    const double m = std::max(1.0, c_);
    return p0_ * std::pow(tau_, alpha_) * (std::tgamma(s) - upper_incomplete_gamma(s, u)) /
           (std::pow(kPi * lam_, alpha_ / 2.0) * std::pow(m, 2.0 + alpha_));
}

// theta = E[R^2 1(A)]: the serving distance of the scheduled interferer,
// with muted cells contributing nothing.
ThetaMu SplaContext::theta_and_mu(double s) const {
    require_full_inversion("theta_and_mu");
    double theta = 1.0 / (kPi * lam_ * kmax_ * kmax_);
    if (!std::isinf(vmax_)) {
        const double u = kPi * lam_ * vmax_ * vmax_ * kmax_;
        theta *= -std::expm1(-u) - u * std::exp(-u);
    }
    const double m = std::max(1.0, c_);
    double mu = 0.0;
    if (s != 0.0) {
        const double x = p0_ * s * std::pow(m, -alpha_);
        mu = m * m * x / (alpha_ - 2.0) * gauss_2f1(1.0, (alpha_ - 2.0) / alpha_, 2.0 - 2.0 / alpha_, -x);
    }
    return {theta, mu};
}

double SplaContext::interference_laplace_spla(double s) const {
    const auto tm = theta_and_mu(s);
    return std::exp(-2.0 * kPi * lam_ * tm.theta * tm.mu);
}

InterferenceMoments SplaContext::interference_moments_spla() const {
    const double theta = theta_and_mu(0.0).theta;
    const double m = std::max(1.0, c_);
    const double mean = 2.0 * kPi * lam_ * theta * p0_ * std::pow(m, 2.0 - alpha_) / (alpha_ - 2.0);
    const double var = 2.0 * kPi * lam_ * theta * p0_ * p0_ * std::pow(m, 2.0 - 2.0 * alpha_) / (alpha_ - 1.0);
    return {mean, var};
}

double SplaContext::sinr_ccdf_spla(double gamma) const {
    if (eps_ != 1.0 || !std::isinf(cfg_.p_max) || !(cfg_.i0 < p0_))
        throw std::domain_error(
            "sinr_ccdf_spla needs epsilon = 1, p_max = inf and i0 < p0; use GcaContext::sinr_ccdf_active");
    if (!(gamma > 0.0)) throw std::domain_error("sinr_ccdf_spla: gamma must be positive");
    const double r = cfg_.i0 / p0_;
    const double interf = 2.0 * gamma / (alpha_ - 2.0) * std::pow(r, (alpha_ + 2.0) / alpha_) *
                          gauss_2f1(1.0, (alpha_ - 2.0) / alpha_, 2.0 - 2.0 / alpha_, -gamma * r);
    return std::exp(-gamma * noise_ / p0_ - interf);
}

double SplaContext::sinr_ccdf_active_spla(double gamma) const {
    require_full_inversion("sinr_ccdf_active_spla");
    if (!(gamma > 0.0)) throw std::domain_error("sinr_ccdf_active_spla: gamma must be positive");
    return std::exp(-gamma * noise_ / p0_) * interference_laplace_spla(gamma / p0_);
}

}  // namespace iamnet
