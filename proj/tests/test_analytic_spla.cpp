#include <doctest.h>

#include <cmath>

#include "iamnet/analytic_gca.hpp"
#include "iamnet/analytic_spla.hpp"
#include "support.hpp"

using namespace iamnet;
using iamnet::test::rel_err;

namespace {

NetworkConfig make(double i0_dbm, double eps = 1.0, double pmax_dbm = kInf) {
    auto cfg = default_network_config();
    cfg.i0 = std::isinf(i0_dbm) ? kInf : dbm_to_watts(i0_dbm);
    cfg.tiers[0].assoc_weight = 1.0;
    cfg.tiers[1].assoc_weight = 1.0;
    cfg.epsilon = eps;
    cfg.p_max = std::isinf(pmax_dbm) ? kInf : dbm_to_watts(pmax_dbm);
    return cfg;
}

// Unnormalized activity kernel 2 pi lam v exp(-pi lam max(v, g(v))^2) on the support.
double kernel(const SplaContext& ctx, double v) {
    const auto& c = ctx.config();
    if (!(v < ctx.support_limit())) return 0.0;
    const double g = std::isinf(c.i0) ? 0.0 : std::pow(c.p0 / c.i0, 1.0 / c.alpha) * std::pow(c.tau * v, c.epsilon) / c.tau;
    const double m = std::max(v, g);
    return 2.0 * kPi * ctx.lambda_total() * v * std::exp(-kPi * ctx.lambda_total() * m * m);
}

double over_support(const SplaContext& ctx, const Integrand& f) {
    const auto& c = ctx.config();
    const double shrink = std::isinf(c.i0) ? 1.0 : std::max(1.0, std::pow(c.p0 / c.i0, 1.0 / c.alpha));
    const double ell = 1.0 / (shrink * std::sqrt(kPi * ctx.lambda_total()));
    auto pts = geometric_points(1e-6 * ell, std::min(ctx.support_limit(), 12.0 * ell));
    pts.insert(pts.begin(), 0.0);
    return integrate_piecewise(f, pts, QuadSpec{1e-11, 1e-300, 12});
}

const double kGrid[] = {-120.0, -100.0, -90.0, -80.0, -70.0, -60.0, -40.0};

}  // namespace

TEST_CASE("activity probability closed form against quadrature") {
    for (double i0 : kGrid) {
        for (double pmax : {kInf, 23.0, 0.0, -20.0}) {
            const SplaContext ctx(make(i0, 1.0, pmax));
            CHECK(rel_err(ctx.pr_active_spla(), ctx.pr_active_spla_quadrature()) < 1e-9);
            CHECK(rel_err(ctx.pr_active_spla(), over_support(ctx, [&](double v) { return kernel(ctx, v); })) < 1e-9);
        }
    }
    CHECK(SplaContext(make(-90.0)).pr_active_spla() == doctest::Approx(std::pow(0.01, 2.0 / 3.8)).epsilon(1e-12));
    CHECK(SplaContext(make(-60.0)).pr_active_spla() == 1.0);
}

TEST_CASE("fractional power control activity agrees with the two-tier form") {
    for (double eps : {0.0, 0.3, 0.7}) {
        for (double i0 : {-100.0, -80.0, -60.0}) {
            const auto cfg = make(i0, eps, 10.0);
            CHECK(rel_err(SplaContext(cfg).pr_active_spla(), GcaContext(cfg).pr_active()) < 1e-8);
        }
    }
}

TEST_CASE("active serving distance is the nearest-BS distance of a denser network") {
    for (double i0 : {-120.0, -90.0, -75.0}) {
        const auto cfg = make(i0);
        const SplaContext ctx(cfg);
        const double lam_s = ctx.lambda_total() * std::pow(cfg.p0 / cfg.i0, 2.0 / cfg.alpha);
        for (double v = 0.5; v < 2000.0; v *= 1.3) {
            const double nearest = 2.0 * kPi * lam_s * v * std::exp(-kPi * lam_s * v * v);
            CHECK(std::abs(ctx.serving_distance_pdf_spla(v) - nearest) <= 1e-10 * nearest + 1e-300);
        }
    }
}

TEST_CASE("mean transmit power closed form against quadrature") {
    for (double i0 : kGrid) {
        for (double pmax : {kInf, 23.0, -10.0}) {
            const SplaContext ctx(make(i0, 1.0, pmax));
            const auto& c = ctx.config();
            const double q = over_support(ctx, [&](double v) { return kernel(ctx, v) * c.p0 * std::pow(c.tau * v, c.alpha); });
            CHECK(rel_err(ctx.mean_transmit_power_spla(), q) < 1e-8);
        }
    }
    // Unaware, unlimited: p0 tau^alpha Gamma(1 + alpha/2) / (pi lam)^{alpha/2}.
    const SplaContext u(make(kInf));
    const auto& c = u.config();
    CHECK(rel_err(u.mean_transmit_power_spla(),
                  c.p0 * std::pow(c.tau, c.alpha) * std::tgamma(1.0 + c.alpha / 2.0) /
                      std::pow(kPi * u.lambda_total(), c.alpha / 2.0)) < 1e-12);
}

TEST_CASE("theta is the active second moment of the serving distance") {
    for (double i0 : kGrid) {
        for (double pmax : {kInf, 0.0}) {
            const SplaContext ctx(make(i0, 1.0, pmax));
            const double q = over_support(ctx, [&](double v) { return kernel(ctx, v) * v * v; });
            CHECK(rel_err(ctx.theta_and_mu(0.0).theta, q) < 1e-9);
        }
    }
    const SplaContext ctx(make(-90.0));
    CHECK(rel_err(ctx.theta_and_mu(0.0).theta, std::pow(0.01, 4.0 / 3.8) / (kPi * ctx.lambda_total())) < 1e-12);
}

TEST_CASE("mu equals its defining integral") {
    for (double i0 : {-90.0, -60.0}) {
        const SplaContext ctx(make(i0));
        const auto& c = ctx.config();
        const double m = std::max(1.0, std::pow(c.p0 / c.i0, 1.0 / c.alpha));
        for (double s_p0 : {0.1, 1.0, 10.0, 1000.0}) {
            const double s = s_p0 / c.p0;
            // Normalized radius t = rho / r: int_m^inf s p0 t^-alpha / (1 + s p0 t^-alpha) t dt,
            // with t = m e^y.
            const double direct = integrate_piecewise(
                [&](double y) {
                    const double t = m * std::exp(y);
                    const double x = s * c.p0 * std::pow(t, -c.alpha);
                    return x / (1.0 + x) * t * t;
                },
                {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 300.0 / (c.alpha - 2.0)},
                QuadSpec{1e-12, 1e-300, 20});
            CHECK(rel_err(ctx.theta_and_mu(s).mu, direct) < 1e-9);
        }
    }
}

TEST_CASE("interference moments are the derivatives of the Laplace exponent") {
    for (double i0 : {-100.0, -90.0, -60.0}) {
        const SplaContext ctx(make(i0));
        const auto mom = ctx.interference_moments_spla();
        auto b = [&](double s) { return std::log(ctx.interference_laplace_spla(s)); };
        const double h = 1e-4 / mom.mean;
        const double d1 = (18.0 * b(h) - 9.0 * b(2.0 * h) + 2.0 * b(3.0 * h)) / (6.0 * h);
        CHECK(rel_err(-d1, mom.mean) < 1e-5);
        const double hh = 2e-3 / std::sqrt(mom.variance);
        const double d2 = (-104.0 * b(hh) + 114.0 * b(2.0 * hh) - 56.0 * b(3.0 * hh) + 11.0 * b(4.0 * hh)) / (12.0 * hh * hh);
        CHECK(rel_err(d2, mom.variance) < 1e-3);
    }
}

TEST_CASE("interference scaling with the threshold below the target power") {
    // mean ~ i0^{(alpha+2)/alpha}, variance ~ i0^{2(alpha+1)/alpha}, power ~ i0^{2/alpha+1}.
    const double a = 3.8;
    const SplaContext lo(make(-110.0)), hi(make(-90.0));
    const double decades = 2.0;
    const auto ml = lo.interference_moments_spla(), mh = hi.interference_moments_spla();
    CHECK(std::log10(mh.mean / ml.mean) / decades == doctest::Approx((a + 2.0) / a).epsilon(1e-9));
    CHECK(std::log10(mh.variance / ml.variance) / decades == doctest::Approx(2.0 * (a + 1.0) / a).epsilon(1e-9));
    CHECK(std::log10(hi.mean_transmit_power_spla() / lo.mean_transmit_power_spla()) / decades ==
          doctest::Approx(2.0 / a + 1.0).epsilon(1e-9));
}

TEST_CASE("closed-form active coverage") {
    for (double i0 : {-120.0, -100.0, -90.0, -75.0}) {
        const SplaContext ctx(make(i0));
        for (double gdb = -10.0; gdb <= 40.0; gdb += 5.0) {
            const double g = db_to_linear(gdb);
            CHECK(rel_err(ctx.sinr_ccdf_spla(g), ctx.sinr_ccdf_active_spla(g)) < 1e-12);
        }
    }
    CHECK_THROWS_AS(SplaContext(make(-60.0)).sinr_ccdf_spla(1.0), std::domain_error);
    CHECK_THROWS_AS(SplaContext(make(-90.0, 1.0, 20.0)).sinr_ccdf_spla(1.0), std::domain_error);
    CHECK_THROWS_AS(SplaContext(make(-90.0)).sinr_ccdf_spla(0.0), std::domain_error);
}

TEST_CASE("closed-form active coverage does not depend on density") {
    auto cfg = make(-90.0);
    const SplaContext a(cfg);
    for (auto& t : cfg.tiers) t.density *= 10.0;
    const SplaContext b(cfg);
    for (double gdb = -10.0; gdb <= 40.0; gdb += 1.0) {
        const double g = db_to_linear(gdb);
        CHECK(a.sinr_ccdf_spla(g) == b.sinr_ccdf_spla(g));
    }
}

TEST_CASE("preconditions") {
    auto cfg = make(-90.0);
    cfg.tiers[0].assoc_weight = 2.0;
    CHECK_THROWS_AS(SplaContext{cfg}, std::invalid_argument);
    const SplaContext fpc(make(-90.0, 0.5));
    CHECK_THROWS_AS(fpc.theta_and_mu(1.0), std::domain_error);
    CHECK_THROWS_AS(fpc.mean_transmit_power_spla(), std::domain_error);
    CHECK(fpc.pr_active_spla() > 0.0);
}
