#pragma once

#include "iamnet/analytic_gca.hpp"
#include "iamnet/model.hpp"
#include "iamnet/specfun.hpp"

namespace iamnet {

struct ThetaMu {
    double theta;  // m^2
    double mu;
};

// Smallest path-loss association: equal weights, one tier of density
// lambda_1 + lambda_2. Everything except the activity probability needs
// epsilon = 1.
class SplaContext {
public:
    explicit SplaContext(const NetworkConfig& cfg, QuadSpec q = {});

    const NetworkConfig& config() const { return cfg_; }
    double lambda_total() const { return lam_; }
    double noise() const { return noise_; }
    double support_limit() const { return vmax_; }

    double pr_active_spla() const;
    double pr_active_spla_quadrature() const;
    double serving_distance_pdf_spla(double v) const;
    double mean_transmit_power_spla() const;
    ThetaMu theta_and_mu(double s) const;
    double interference_laplace_spla(double s) const;
    InterferenceMoments interference_moments_spla() const;
    // Active-conditioned CCDF in the interference-aware regime with p_max = inf.
    double sinr_ccdf_spla(double gamma) const;
    // Active-conditioned CCDF for any caps (epsilon = 1).
    double sinr_ccdf_active_spla(double gamma) const;

private:
    void require_full_inversion(const char* what) const;

    NetworkConfig cfg_;
    QuadSpec q_;
    double lam_, alpha_, tau_, p0_, eps_, noise_;
    double c_;     // (p0/i0)^{1/alpha}
    double kmax_;  // max(1, c^2)
    double vmax_;
};

}  // namespace iamnet
