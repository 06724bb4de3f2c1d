#pragma once

#include <array>
#include <vector>

#include "iamnet/model.hpp"
#include "iamnet/specfun.hpp"

namespace iamnet {

struct InterferenceMoments {
    double mean;
    double variance;
};

// General cell association analytics. Tier arguments are 0 (macro) and 1 (small
// cell). The context works on analytic_view(cfg): shadowing enters as a density
// scale, the scheme as (i0, p_max).
class GcaContext {
public:
    explicit GcaContext(const NetworkConfig& cfg, QuadSpec q = {});

    const NetworkConfig& config() const { return cfg_; }
    const QuadSpec& quad() const { return q_; }
    double density(int j) const { return lam_[j]; }
    double noise() const { return noise_; }

    // Joint densities of the serving distance and activity, m != j and m == j.
    double nu(double v, int j) const;
    double eta(double v, int j) const;

    // Upper end of the serving-distance support, (1/tau)(p_max/p0)^{1/(alpha eps)}.
    double support_limit() const { return vmax_; }

    double pr_active_assoc(int j, int m) const { return joint_[j][m]; }
    double pr_active() const;
    double pr_assoc(int j) const { return assoc_[j]; }
    double pr_active_given_assoc(int k) const;
    double pr_most_interfered(int n, int k) const;

    double serving_distance_pdf(double v, int j, int m) const;
    // Serving distance given activity, mixed over (j, m).
    double serving_distance_pdf_active(double v) const;

    double mean_transmit_power() const;

    double chi(double s, double r, int j, int k) const;
    double beta(double s, int j) const;
    double interference_laplace(double s, int j) const;
    // Laplace transform at the typical MT's probe BS, mixed over tiers.
    double interference_laplace_mixture(double s) const;
    double beta_prime0(int j) const;
    double beta_second0(int j) const;
    InterferenceMoments interference_moments() const;

    // Pr(SINR > gamma), muted MTs counted at SINR 0.
    double sinr_ccdf(double gamma) const;
    // Pr(SINR > gamma, serving tier j).
    double sinr_ccdf_tier(double gamma, int j) const;
    // Always integrates over the serving distance, even when epsilon = 1.
    double sinr_ccdf_general(double gamma) const;
    double sinr_ccdf_tier_general(double gamma, int j) const;
    double sinr_ccdf_active(double gamma) const;

    // Integrates f over the serving-distance support, split at every kink of
    // the kernels and on a geometric grid.
    double integrate_support(const Integrand& f) const;

private:
    double g(double v) const;
    double interferer_weight(int k) const;  // 2 pi lam_k Pr(A) / Pr(X^k, A)
    double weight_root(int from, int to) const;  // (t_to / t_from)^{1/alpha}

    NetworkConfig cfg_;
    QuadSpec q_;
    std::array<double, 2> lam_{};
    std::array<double, 2> t_{};
    double alpha_, tau_, p0_, eps_, noise_;
    double c_;      // (p0/i0)^{1/alpha}, 0 without a cap
    double vmax_;   // support limit from p_max
    double upper_;  // min(vmax, envelope truncation)
    std::vector<double> breaks_;
    std::array<double, 2> assoc_{};
    std::array<std::array<double, 2>, 2> joint_{};
};

}  // namespace iamnet
