#include "iamnet/analytic_gca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iamnet {

namespace {

double support_limit_of(const NetworkConfig& c) {
    if (std::isinf(c.p_max)) return kInf;
    const double ratio = c.p_max / c.p0;
    if (c.epsilon == 0.0) return ratio > 1.0 ? kInf : 0.0;
    return std::pow(ratio, 1.0 / (c.alpha * c.epsilon)) / c.tau;
}

double sq(double x) { return x * x; }

}  // namespace

GcaContext::GcaContext(const NetworkConfig& raw, QuadSpec q) : cfg_(analytic_view(raw)), q_(q) {
    if (auto errs = validate(raw); !errs.empty()) throw ConfigError(std::move(errs));
    for (int j = 0; j < 2; ++j) {
        lam_[j] = cfg_.tiers[j].density;
        t_[j] = cfg_.tiers[j].assoc_weight;
    }
    alpha_ = cfg_.alpha;
    tau_ = cfg_.tau;
    p0_ = cfg_.p0;
    eps_ = cfg_.epsilon;
    noise_ = noise_power(cfg_);
    c_ = std::isinf(cfg_.i0) ? 0.0 : std::pow(p0_ / cfg_.i0, 1.0 / alpha_);
    vmax_ = support_limit_of(cfg_);

    // Every kernel is bounded by 2 pi lam v exp(-pi lam_min v^2) times a power of v.
    const double lam_min = std::min(lam_[0], lam_[1]);
    const double vtrunc = std::sqrt(40.0 / (kPi * lam_min));
    upper_ = std::min(vmax_, vtrunc);

    breaks_ = {0.0};
    if (upper_ > 0.0) {
        const double ell = 1.0 / std::sqrt(kPi * (lam_[0] + lam_[1]));
        const double lo = std::min(1e-4 * ell / std::max(1.0, c_), 0.5 * upper_);
        for (double p : geometric_points(lo, upper_)) breaks_.push_back(p);
        if (c_ > 0.0 && eps_ < 1.0) {
            // g(v) = kappa v has the closed-form root (c/kappa)^{1/(1-eps)}/tau for
            // every slope kappa appearing in the max() arguments.
            const double w = std::pow(t_[0] / t_[1], 1.0 / alpha_);
            for (double kappa : {1.0, w, 1.0 / w}) {
                const double v = std::pow(c_ / kappa, 1.0 / (1.0 - eps_)) / tau_;
                if (v > 0.0 && v < upper_) breaks_.push_back(v);
            }
        }
        std::sort(breaks_.begin(), breaks_.end());
        breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
    }

    for (int j = 0; j < 2; ++j) {
        const int o = 1 - j;
        assoc_[j] = lam_[j] / (lam_[j] + lam_[o] * sq(weight_root(j, o)));
        joint_[j][o] = integrate_support([&](double v) { return nu(v, j); });
        joint_[j][j] = integrate_support([&](double v) { return eta(v, j); });
    }
}

double GcaContext::g(double v) const {
    if (c_ == 0.0) return 0.0;
    return c_ * std::pow(tau_ * v, eps_) / tau_;
}

double GcaContext::weight_root(int from, int to) const { return std::pow(t_[to] / t_[from], 1.0 / alpha_); }

double GcaContext::integrate_support(const Integrand& f) const {
    if (upper_ <= 0.0) return 0.0;
    return integrate_piecewise(f, breaks_, q_);
}

double GcaContext::nu(double v, int j) const {
    if (!(v > 0.0)) return 0.0;
    const int o = 1 - j;
    const double lj = lam_[j], lo = lam_[o];
    const double m1 = std::max(g(v), weight_root(j, o) * v);
    const double m2 = std::max(m1, v);
    double first = 0.0;
    if (v > m1) first = std::exp(-kPi * lj * v * v) * (std::exp(-kPi * lo * m1 * m1) - std::exp(-kPi * lo * v * v));
    const double tail = lo / (lj + lo) * std::exp(-kPi * (lj + lo) * m2 * m2);
    return 2.0 * kPi * v * lj * (first + tail);
}

double GcaContext::eta(double v, int j) const {
    if (!(v > 0.0)) return 0.0;
    const int o = 1 - j;
    const double lj = lam_[j], lo = lam_[o];
    const double a = std::max(g(v), v);
    const double b = weight_root(j, o) * v;
    double first = 0.0;
    if (b > a) first = std::exp(-kPi * lo * b * b) * (std::exp(-kPi * lj * a * a) - std::exp(-kPi * lj * b * b));
    const double m = std::max(a, b);
    const double tail = lj / (lj + lo) * std::exp(-kPi * (lj + lo) * m * m);
    return 2.0 * kPi * v * lj * (first + tail);
}

double GcaContext::pr_active() const { return joint_[0][0] + joint_[0][1] + joint_[1][0] + joint_[1][1]; }

double GcaContext::pr_active_given_assoc(int k) const { return (joint_[k][0] + joint_[k][1]) / assoc_[k]; }

double GcaContext::pr_most_interfered(int n, int k) const {
    const double tot = joint_[k][0] + joint_[k][1];
    if (tot <= 0.0) throw std::domain_error("pr_most_interfered: tier has no active mass");
    return joint_[k][n] / tot;
}

double GcaContext::serving_distance_pdf(double v, int j, int m) const {
    const double p = joint_[j][m];
    if (!(p > 0.0)) throw std::domain_error("serving_distance_pdf: event has zero probability");
    if (!(v > 0.0) || !(v < vmax_)) return 0.0;
    return (j == m ? eta(v, j) : nu(v, j)) / p;
}

double GcaContext::serving_distance_pdf_active(double v) const {
    const double p = pr_active();
    if (!(p > 0.0)) throw std::domain_error("serving_distance_pdf_active: Pr(A) = 0");
    if (!(v > 0.0) || !(v < vmax_)) return 0.0;
    return (nu(v, 0) + eta(v, 0) + nu(v, 1) + eta(v, 1)) / p;
}

double GcaContext::mean_transmit_power() const {
    return integrate_support([&](double v) {
        const double dens = nu(v, 0) + eta(v, 0) + nu(v, 1) + eta(v, 1);
        return dens * p0_ * std::pow(tau_ * v, alpha_ * eps_);
    });
}

double GcaContext::chi(double s, double r, int j, int k) const {
    if (s == 0.0) return 0.0;
    const double kr = p0_ * std::pow(tau_, -alpha_) * std::pow(tau_ * r, alpha_ * eps_);
    const double m = std::max(weight_root(k, j) * r, g(r));
    const double x = s * kr * std::pow(m, -alpha_);
    return m * m * x / (alpha_ - 2.0) * gauss_2f1(1.0, 1.0 - 2.0 / alpha_, 2.0 - 2.0 / alpha_, -x);
}

// Interferers of tier k: intensity lam_k thinned by Pr(A), distance pdf
// f(r | X^k, A) = sum_n Pr(Q^n | X^k, A) f(r | X^{k,n}, A). The product is
// lam_k Pr(A) (nu_k + eta_k) / Pr(X^k, A).
double GcaContext::interferer_weight(int k) const {
    const double pk = joint_[k][0] + joint_[k][1];
    return pk > 0.0 ? 2.0 * kPi * lam_[k] * pr_active() / pk : 0.0;
}

double GcaContext::beta(double s, int j) const {
    if (s == 0.0) return 0.0;
    double out = 0.0;
    for (int k = 0; k < 2; ++k) {
        const double intensity = interferer_weight(k);
        if (intensity == 0.0) continue;
        out -= intensity * integrate_support([&](double r) {
            const double dens = nu(r, k) + eta(r, k);
            return dens == 0.0 ? 0.0 : dens * chi(s, r, j, k);
        });
    }
    return out;
}

double GcaContext::interference_laplace(double s, int j) const { return std::exp(beta(s, j)); }

double GcaContext::interference_laplace_mixture(double s) const {
    return assoc_[0] * interference_laplace(s, 0) + assoc_[1] * interference_laplace(s, 1);
}

double GcaContext::beta_prime0(int j) const {
    double out = 0.0;
    for (int k = 0; k < 2; ++k) {
        const double intensity = interferer_weight(k);
        if (intensity == 0.0) continue;
        out -= intensity * integrate_support([&](double r) {
            const double kr = p0_ * std::pow(tau_, -alpha_) * std::pow(tau_ * r, alpha_ * eps_);
            const double m = std::max(weight_root(k, j) * r, g(r));
            return (nu(r, k) + eta(r, k)) * kr / (alpha_ - 2.0) * std::pow(m, 2.0 - alpha_);
        });
    }
    return out;
}

double GcaContext::beta_second0(int j) const {
    double out = 0.0;
    for (int k = 0; k < 2; ++k) {
        const double intensity = interferer_weight(k);
        if (intensity == 0.0) continue;
        out -= intensity * integrate_support([&](double r) {
            const double kr = p0_ * std::pow(tau_, -alpha_) * std::pow(tau_ * r, alpha_ * eps_);
            const double m = std::max(weight_root(k, j) * r, g(r));
            return (nu(r, k) + eta(r, k)) * kr * kr / (1.0 - alpha_) * std::pow(m, 2.0 * (1.0 - alpha_));
        });
    }
    return out;
}

// E[I^2 | X^j] = beta'' + beta'^2 since L = exp(beta).
InterferenceMoments GcaContext::interference_moments() const {
    double mean = 0.0, second = 0.0;
    for (int j = 0; j < 2; ++j) {
        const double b1 = beta_prime0(j);
        const double b2 = beta_second0(j);
        mean -= assoc_[j] * b1;
        second += assoc_[j] * (b2 + b1 * b1);
    }
    return {mean, std::max(0.0, second - mean * mean)};
}

double GcaContext::sinr_ccdf_tier(double gamma, int j) const {
    if (!(gamma > 0.0)) throw std::domain_error("sinr_ccdf: gamma must be positive");
    if (eps_ == 1.0) {
        const double pj = joint_[j][0] + joint_[j][1];
        if (pj == 0.0) return 0.0;
        return pj * std::exp(-gamma * noise_ / p0_) * interference_laplace(gamma / p0_, j);
    }
    return sinr_ccdf_tier_general(gamma, j);
}

double GcaContext::sinr_ccdf_tier_general(double gamma, int j) const {
    if (!(gamma > 0.0)) throw std::domain_error("sinr_ccdf: gamma must be positive");
    return integrate_support([&](double v) {
        const double dens = nu(v, j) + eta(v, j);
        if (dens == 0.0) return 0.0;
        const double s = gamma * std::pow(tau_ * v, alpha_ * (1.0 - eps_)) / p0_;
        return dens * std::exp(-s * noise_) * interference_laplace(s, j);
    });
}

double GcaContext::sinr_ccdf(double gamma) const { return sinr_ccdf_tier(gamma, 0) + sinr_ccdf_tier(gamma, 1); }

double GcaContext::sinr_ccdf_general(double gamma) const {
    return sinr_ccdf_tier_general(gamma, 0) + sinr_ccdf_tier_general(gamma, 1);
}

double GcaContext::sinr_ccdf_active(double gamma) const {
    const double p = pr_active();
    if (!(p > 0.0)) throw std::domain_error("sinr_ccdf_active: Pr(A) = 0");
    return sinr_ccdf(gamma) / p;
}

}  // namespace iamnet
