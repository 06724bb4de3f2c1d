#include <doctest.h>

#include <cmath>
#include <random>

#include "iamnet/analytic_gca.hpp"
#include "iamnet/analytic_spla.hpp"
#include "support.hpp"

using namespace iamnet;
using iamnet::test::rel_err;

namespace {

NetworkConfig make(double i0_dbm, double weight_db = 9.0, double eps = 1.0, double pmax_dbm = kInf) {
    auto cfg = default_network_config();
    cfg.i0 = std::isinf(i0_dbm) ? kInf : dbm_to_watts(i0_dbm);
    cfg.tiers[0].assoc_weight = db_to_linear(weight_db);
    cfg.tiers[1].assoc_weight = 1.0;
    cfg.epsilon = eps;
    cfg.p_max = std::isinf(pmax_dbm) ? kInf : dbm_to_watts(pmax_dbm);
    return cfg;
}

// Cap distance g(v): an MT at serving distance v is muted unless its nearest
// non-serving BS is farther than g(v).
double cap_distance(const NetworkConfig& c, double v) {
    if (std::isinf(c.i0)) return 0.0;
    return std::pow(c.p0 / c.i0, 1.0 / c.alpha) * std::pow(c.tau * v, c.epsilon) / c.tau;
}

// Breakpoints from lo through the kink at k to where exp(-pi lam y^2) is
// negligible relative to its value at the kink.
std::vector<double> cut_points(double lo, double kink, double lam) {
    const double start = std::max(lo, kink);
    const double step = 1.0 / std::sqrt(kPi * lam);
    std::vector<double> p{lo, start};
    for (int i = 1; i <= 12; ++i) p.push_back(start + i * step);
    return p;
}

// Joint density of (serving distance v, serving tier j, active, most-interfered
// BS in the other tier), from the point-process definition: tier-j nearest BS at
// v, other-tier nearest at y beyond both the weighted boundary and the cap, and
// the second tier-j BS beyond y.
double nu_brute(const GcaContext& ctx, double v, int j) {
    const auto& c = ctx.config();
    const int o = 1 - j;
    const double lj = ctx.density(j), lo = ctx.density(o);
    const double w = std::pow(c.tiers[o].assoc_weight / c.tiers[j].assoc_weight, 1.0 / c.alpha);
    const double lo_lim = std::max(w * v, cap_distance(c, v));
    const double f_j = 2.0 * kPi * lj * v * std::exp(-kPi * lj * v * v);
    auto integrand = [&](double y) {
        const double second_beyond = y > v ? std::exp(-kPi * lj * (y * y - v * v)) : 1.0;
        return 2.0 * kPi * lo * y * std::exp(-kPi * lo * y * y) * second_beyond;
    };
    return f_j * integrate_piecewise(integrand, cut_points(lo_lim, v, lj + lo), QuadSpec{1e-12, 1e-300, 20});
}

// Same with the most-interfered BS in the serving tier: the second tier-j BS at
// x beyond the cap, and the other tier beyond both x and the weighted boundary.
double eta_brute(const GcaContext& ctx, double v, int j) {
    const auto& c = ctx.config();
    const int o = 1 - j;
    const double lj = ctx.density(j), lo = ctx.density(o);
    const double w = std::pow(c.tiers[o].assoc_weight / c.tiers[j].assoc_weight, 1.0 / c.alpha);
    const double lo_lim = std::max(v, cap_distance(c, v));
    const double f_j = 2.0 * kPi * lj * v * std::exp(-kPi * lj * v * v);
    auto integrand = [&](double x) {
        const double y0 = std::max(w * v, x);
        return 2.0 * kPi * lj * x * std::exp(-kPi * lj * (x * x - v * v)) * std::exp(-kPi * lo * y0 * y0);
    };
    return f_j * integrate_piecewise(integrand, cut_points(lo_lim, w * v, lj + lo), QuadSpec{1e-12, 1e-300, 20});
}

// Direct sampling of the nearest and second-nearest BS of each tier.
struct SampledActivity {
    double pr_active;
    double mean_power;  // E[P 1(A)]
    double mean_power_se;
    double pr_tier0;
};

SampledActivity sample_activity(const NetworkConfig& raw, int n, std::uint64_t seed) {
    const auto c = analytic_view(raw);
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> ex(1.0);
    long active = 0, tier0 = 0;
    double power = 0.0, power2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double d1[2], d2[2];
        for (int k = 0; k < 2; ++k) {
            const double e1 = ex(rng), e2 = ex(rng);
            d1[k] = std::sqrt(e1 / (kPi * c.tiers[k].density));
            d2[k] = std::sqrt((e1 + e2) / (kPi * c.tiers[k].density));
        }
        const double s0 = c.tiers[0].assoc_weight * std::pow(d1[0], -c.alpha);
        const double s1 = c.tiers[1].assoc_weight * std::pow(d1[1], -c.alpha);
        const int j = s0 >= s1 ? 0 : 1;
        tier0 += j == 0;
        const double v = d1[j];
        const double u = std::min(d2[j], d1[1 - j]);
        const double p = c.p0 * std::pow(c.tau * v, c.alpha * c.epsilon);
        if (u > cap_distance(c, v) && p < c.p_max) {
            ++active;
            power += p;
            power2 += p * p;
        }
    }
    const double m = power / n;
    return {double(active) / n, m, std::sqrt((power2 / n - m * m) / n), double(tier0) / n};
}

}  // namespace

TEST_CASE("joint serving-distance densities match the point-process definition") {
    for (const auto& cfg : {make(-90.0), make(-70.0), make(-60.0), make(-90.0, 25.0), make(-90.0, -6.0),
                            make(-80.0, 9.0, 0.6), make(-100.0, 3.0, 0.3, 10.0), make(kInf)}) {
        const GcaContext ctx(cfg);
        for (double v : {1.0, 20.0, 100.0, 250.0, 600.0}) {
            for (int j = 0; j < 2; ++j) {
                const double nb = nu_brute(ctx, v, j), eb = eta_brute(ctx, v, j);
                CHECK(ctx.nu(v, j) == doctest::Approx(nb).epsilon(1e-9).scale(0));
                CHECK(ctx.eta(v, j) == doctest::Approx(eb).epsilon(1e-9).scale(0));
            }
        }
    }
}

TEST_CASE("activity and association probabilities against direct sampling") {
    const int n = 400000;
    for (const auto& cfg : {make(-90.0), make(-70.0), make(-80.0, 15.0, 0.5), make(-100.0, 0.0, 1.0, -20.0)}) {
        const GcaContext ctx(cfg);
        const auto s = sample_activity(cfg, n, 17);
        const double pa = ctx.pr_active();
        const double sd = std::sqrt(pa * (1.0 - pa) / n);
        CHECK(std::abs(s.pr_active - pa) < 5.0 * sd + 1e-12);
        const double pt = ctx.pr_assoc(0);
        CHECK(std::abs(s.pr_tier0 - pt) < 5.0 * std::sqrt(pt * (1.0 - pt) / n));
        CHECK(std::abs(s.mean_power - ctx.mean_transmit_power()) < 5.0 * s.mean_power_se);
    }
}

TEST_CASE("probabilities are normalized") {
    for (const auto& cfg : {make(-90.0), make(-70.0), make(-60.0), make(-80.0, 15.0, 0.5)}) {
        const GcaContext ctx(cfg);
        CHECK(ctx.pr_assoc(0) + ctx.pr_assoc(1) == doctest::Approx(1.0).epsilon(1e-14));
        for (int k = 0; k < 2; ++k) {
            if (ctx.pr_active_assoc(k, 0) + ctx.pr_active_assoc(k, 1) == 0.0) continue;
            CHECK(ctx.pr_most_interfered(0, k) + ctx.pr_most_interfered(1, k) == doctest::Approx(1.0));
        }
        const double mass = ctx.integrate_support([&](double v) { return ctx.serving_distance_pdf_active(v); });
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        for (int j = 0; j < 2; ++j) {
            for (int m = 0; m < 2; ++m) {
                const double mj = ctx.integrate_support([&](double v) { return ctx.serving_distance_pdf(v, j, m); });
                CHECK(mj == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }
    // Unaware with no power limit: everyone transmits.
    CHECK(GcaContext(make(kInf)).pr_active() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("activity probability closed form in the association-independent regime") {
    for (double i0 : {-120.0, -100.0, -90.0, -80.0}) {
        const GcaContext ctx(make(i0));
        const double want = std::pow(dbm_to_watts(i0) / dbm_to_watts(-70.0), 2.0 / 3.8);
        CHECK(rel_err(ctx.pr_active(), want) < 1e-9);
    }
    CHECK(GcaContext(make(-90.0)).pr_active() == doctest::Approx(0.0886).epsilon(0.001));
}

TEST_CASE("chi equals its defining integral") {
    const GcaContext ctx(make(-90.0));
    const auto& c = ctx.config();
    for (double r : {5.0, 80.0, 300.0}) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                for (double s_p0 : {0.01, 1.0, 100.0}) {
                    const double s = s_p0 / c.p0;
                    const double kr = c.p0 * std::pow(c.tau, -c.alpha) * std::pow(c.tau * r, c.alpha * c.epsilon);
                    const double w = std::pow(c.tiers[j].assoc_weight / c.tiers[k].assoc_weight, 1.0 / c.alpha);
                    const double m = std::max(w * r, cap_distance(c, r));
                    // rho = m e^y turns the algebraic tail into an exponential one.
                    const double ymax = 300.0 / (c.alpha - 2.0);
                    const double direct = integrate_piecewise(
                        [&](double y) {
                            const double rho = m * std::exp(y);
                            const double x = s * kr * std::pow(rho, -c.alpha);
                            return x / (1.0 + x) * rho * rho;
                        },
                        geometric_points(1e-3, ymax, 2.0), QuadSpec{1e-12, 1e-300, 20}) +
                        integrate([&](double y) {
                            const double rho = m * std::exp(y);
                            const double x = s * kr * std::pow(rho, -c.alpha);
                            return x / (1.0 + x) * rho * rho;
                        }, 0.0, 1e-3, QuadSpec{1e-12, 1e-300, 20});
                    CHECK(rel_err(ctx.chi(s, r, j, k), direct) < 1e-8);
                }
            }
        }
    }
    CHECK(ctx.chi(0.0, 10.0, 0, 1) == 0.0);
}

TEST_CASE("moment derivatives agree with finite differences of the exponent") {
    for (const auto& cfg : {make(-90.0), make(-60.0), make(-80.0, 15.0, 0.7)}) {
        const GcaContext ctx(cfg);
        const auto mom = ctx.interference_moments();
        for (int j = 0; j < 2; ++j) {
            const double b1 = ctx.beta_prime0(j), b2 = ctx.beta_second0(j);
            // One-sided stencils since the exponent is defined for s >= 0 only.
            const double h = 1e-4 / mom.mean;
            const double f1 = ctx.beta(h, j), f2 = ctx.beta(2.0 * h, j), f3 = ctx.beta(3.0 * h, j);
            const double d1 = (-11.0 * 0.0 + 18.0 * f1 - 9.0 * f2 + 2.0 * f3) / (6.0 * h);
            CHECK(rel_err(d1, b1) < 1e-5);
            const double hh = 2e-3 / std::sqrt(mom.variance);
            const double g1 = ctx.beta(hh, j), g2 = ctx.beta(2.0 * hh, j), g3 = ctx.beta(3.0 * hh, j);
            const double g4 = ctx.beta(4.0 * hh, j);
            const double d2 = (35.0 * 0.0 - 104.0 * g1 + 114.0 * g2 - 56.0 * g3 + 11.0 * g4) / (12.0 * hh * hh);
            CHECK(rel_err(d2, b2) < 1e-3);
        }
    }
}

TEST_CASE("full-inversion coverage equals the general serving-distance integral") {
    const GcaContext ctx(make(-90.0));
    for (double gdb : {-10.0, 0.0, 10.0, 20.0, 30.0}) {
        const double g = db_to_linear(gdb);
        CHECK(ctx.sinr_ccdf(g) == doctest::Approx(ctx.sinr_ccdf_general(g)).epsilon(1e-8));
    }
}

TEST_CASE("coverage is a CCDF") {
    for (const auto& cfg : {make(-90.0), make(-60.0), make(-80.0, 9.0, 0.6)}) {
        const GcaContext ctx(cfg);
        double prev = ctx.pr_active();
        for (double gdb = -20.0; gdb <= 40.0; gdb += 5.0) {
            const double v = ctx.sinr_ccdf(db_to_linear(gdb));
            CHECK(v <= prev * (1.0 + 1e-12));
            CHECK(v >= 0.0);
            prev = v;
        }
        CHECK(ctx.sinr_ccdf(1e-6) == doctest::Approx(ctx.pr_active()).epsilon(1e-4));
        CHECK(ctx.sinr_ccdf_active(db_to_linear(0.0)) <= 1.0);
    }
    CHECK_THROWS_AS(GcaContext(make(-90.0)).sinr_ccdf(0.0), std::domain_error);
}

TEST_CASE("monotone in the interference threshold") {
    double pa = 0.0, ep = 0.0, ei = 0.0;
    for (double i0 = -120.0; i0 <= -70.0; i0 += 5.0) {
        const GcaContext ctx(make(i0));
        const auto mom = ctx.interference_moments();
        const double p = ctx.mean_transmit_power();
        CHECK(ctx.pr_active() > pa);
        CHECK(p > ep);
        CHECK(mom.mean > ei);
        pa = ctx.pr_active();
        ep = p;
        ei = mom.mean;
    }
}

TEST_CASE("flat in the threshold once it exceeds the target power") {
    const GcaContext ref(make(-60.0));
    const auto mref = ref.interference_moments();
    for (double i0 : {-55.0, -50.0, -30.0, 0.0}) {
        const GcaContext ctx(make(i0));
        const auto m = ctx.interference_moments();
        CHECK(rel_err(ctx.pr_active(), ref.pr_active()) < 1e-12);
        CHECK(rel_err(ctx.mean_transmit_power(), ref.mean_transmit_power()) < 1e-12);
        CHECK(rel_err(m.mean, mref.mean) < 1e-12);
        CHECK(rel_err(m.variance, mref.variance) < 1e-12);
    }
}

TEST_CASE("association weights do not matter in the association-independent regime") {
    const GcaContext ref(make(-90.0, 0.0));
    const auto mref = ref.interference_moments();
    for (double w : {3.0, 9.0, 15.0, 19.5}) {
        const GcaContext ctx(make(-90.0, w));
        CHECK(rel_err(ctx.pr_active(), ref.pr_active()) < 1e-9);
        CHECK(rel_err(ctx.mean_transmit_power(), ref.mean_transmit_power()) < 1e-9);
        CHECK(rel_err(ctx.interference_moments().mean, mref.mean) < 1e-8);
        for (double gdb : {0.0, 15.0, 30.0}) {
            CHECK(rel_err(ctx.sinr_ccdf(db_to_linear(gdb)), ref.sinr_ccdf(db_to_linear(gdb))) < 1e-8);
        }
    }
    // Beyond the plateau the weights change the active population.
    CHECK(rel_err(GcaContext(make(-90.0, 25.0)).pr_active(), ref.pr_active()) > 1e-4);
}

TEST_CASE("equal weights reduce to the single-tier closed forms") {
    for (double i0 : {-110.0, -90.0, -75.0, -70.0, -50.0}) {
        auto cfg = make(i0, 0.0);
        const GcaContext g(cfg);
        const SplaContext s(cfg);
        CHECK(rel_err(g.pr_active(), s.pr_active_spla()) < 1e-8);
        CHECK(rel_err(g.mean_transmit_power(), s.mean_transmit_power_spla()) < 1e-8);
        const auto mg = g.interference_moments(), ms = s.interference_moments_spla();
        CHECK(rel_err(mg.mean, ms.mean) < 1e-7);
        CHECK(rel_err(mg.variance, ms.variance) < 1e-7);
        for (double gdb : {-5.0, 5.0, 20.0}) {
            const double gl = db_to_linear(gdb);
            CHECK(rel_err(g.sinr_ccdf_active(gl), s.sinr_ccdf_active_spla(gl)) < 1e-7);
            CHECK(rel_err(g.interference_laplace(gl / cfg.p0, 0), s.interference_laplace_spla(gl / cfg.p0)) < 1e-7);
        }
    }
}

TEST_CASE("power limit truncates the support") {
    const GcaContext ctx(make(-90.0, 9.0, 1.0, 0.0));
    const double vmax = ctx.support_limit();
    CHECK(vmax == doctest::Approx(std::pow(dbm_to_watts(0.0) / dbm_to_watts(-70.0), 1.0 / 3.8) / 2.6));
    CHECK(ctx.serving_distance_pdf_active(vmax * 1.01) == 0.0);
    CHECK(ctx.pr_active() < GcaContext(make(-90.0)).pr_active());
}
