#include "iamnet/simulator.hpp"

#include "iamnet/rate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <exception>
#include <thread>

namespace iamnet {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

// Acklam's rational approximation, relative error below 1.2e-9.
double inverse_normal_cdf(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double plow = 0.02425;
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inverse_normal_cdf: p outside (0,1)");
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

ShadowField::ShadowField(std::uint64_t key, double sigma_db, double alpha)
    : key_(key), kappa_(sigma_db * std::log(10.0) / (10.0 * alpha)) {
    min_factor_ = std::exp(-kappa_ * kShadowClampSigma);
}

double ShadowField::deviate(std::uint32_t mt, std::uint32_t bs) const {
    const std::uint64_t h = splitmix64(key_ ^ splitmix64((std::uint64_t{mt} << 32) | bs));
    const double u = (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
    return std::clamp(inverse_normal_cdf(u), -kShadowClampSigma, kShadowClampSigma);
}

double ShadowField::distance_factor(std::uint32_t mt, std::uint32_t bs) const {
    if (kappa_ == 0.0) return 1.0;
    return std::exp(-kappa_ * deviate(mt, bs));
}

std::mt19937_64 drop_engine(std::uint64_t seed, std::uint64_t drop, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(drop), static_cast<std::uint32_t>(drop >> 32), stream};
    return std::mt19937_64(seq);
}

double default_window_radius(const NetworkConfig& cfg) {
    return 5.0 / std::sqrt(std::min(cfg.tiers[0].density, cfg.tiers[1].density));
}

Realization sample_network(const NetworkConfig& cfg, double window_radius, std::uint64_t seed,
                           std::uint64_t drop) {
    if (!(window_radius > 0.0)) throw std::invalid_argument("sample_network: window_radius must be positive");
    Realization real;
    real.window_radius = window_radius;
    auto eng = drop_engine(seed, drop, 0);
    const double area = kPi * window_radius * window_radius;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto fill = [&](std::vector<Point>& pts, double density) {
        std::poisson_distribution<long> count(density * area);
        const long n = count(eng);
        pts.resize(static_cast<std::size_t>(n));
        for (auto& p : pts) {
            const double r = window_radius * std::sqrt(unit(eng));
            const double th = 2.0 * kPi * unit(eng);
            p = {r * std::cos(th), r * std::sin(th)};
        }
    };
    fill(real.bs_points[0], cfg.tiers[0].density);
    fill(real.bs_points[1], cfg.tiers[1].density);
    fill(real.mt_points, cfg.mt_density);
    real.shadow = ShadowField(splitmix64(seed ^ splitmix64(drop)), cfg.shadow_sigma_db, cfg.alpha);

    if (real.bs_count() == 0) {
        real.discard = DiscardReason::NoBaseStations;
    } else if (real.mt_points.empty()) {
        real.discard = DiscardReason::NoMobiles;
    } else {
        double best = kInf;
        for (std::size_t i = 0; i < real.mt_points.size(); ++i) {
            const auto& p = real.mt_points[i];
            const double d = p.x * p.x + p.y * p.y;
            if (d < best) {
                best = d;
                real.tagged = i;
            }
        }
    }
    return real;
}

namespace {

struct Candidates {
    std::array<double, 2> a{kInf, kInf};  // nearest per tier
    std::array<double, 2> b{kInf, kInf};  // second nearest per tier
    std::array<std::uint32_t, 2> ai{0, 0};

    void offer(int tier, double d, std::uint32_t idx) {
        if (d < a[tier]) {
            b[tier] = a[tier];
            a[tier] = d;
            ai[tier] = idx;
        } else if (d < b[tier]) {
            b[tier] = d;
        }
    }
};

// w01 = (t1/t0)^{1/alpha}; tier 0 wins iff a0 * w01 <= a1.
int winner(const Candidates& c, double w01) {
    if (std::isinf(c.a[0])) return 1;
    if (std::isinf(c.a[1])) return 0;
    return c.a[0] * w01 <= c.a[1] ? 0 : 1;
}

// Shadowed distance beyond which no further BS can change the serving BS or U.
double stop_threshold(const Candidates& c, double w01) {
    if (std::isinf(c.a[0]) && std::isinf(c.a[1])) return kInf;
    const int j = winner(c, w01);
    const int o = 1 - j;
    const double wj = j == 0 ? w01 : 1.0 / w01;  // (t_o/t_j)^{1/alpha}
    return std::max({c.a[j], std::min(c.a[o], c.a[j] * wj), std::min(c.b[j], c.a[o])});
}

Association finish(const Candidates& c, double w01, std::uint32_t n0) {
    Association out;
    const int j = winner(c, w01);
    out.tier = j;
    out.bs = j == 0 ? c.ai[0] : n0 + c.ai[1];
    out.r = c.a[j];
    out.u = std::min(c.b[j], c.a[1 - j]);
    return out;
}

struct BsGrid {
    double origin, cell;
    int n;
    std::vector<std::uint32_t> start;  // CSR offsets, n*n + 1
    std::vector<std::uint32_t> items;  // global BS index
    std::vector<double> xs, ys;
    std::vector<std::uint8_t> tier;

    BsGrid(const Realization& real, double cell_size) {
        const double R = real.window_radius;
        origin = -R;
        cell = cell_size;
        n = std::max(1, static_cast<int>(std::ceil(2.0 * R / cell)));
        const std::size_t nb = real.bs_count();
        xs.resize(nb);
        ys.resize(nb);
        tier.resize(nb);
        std::vector<std::uint32_t> cell_of(nb);
        start.assign(static_cast<std::size_t>(n) * n + 1, 0);
        for (std::size_t g = 0; g < nb; ++g) {
            const auto& p = real.bs(g);
            xs[g] = p.x;
            ys[g] = p.y;
            tier[g] = static_cast<std::uint8_t>(real.tier_of(g));
            const int cx = clampi(static_cast<int>((p.x - origin) / cell));
            const int cy = clampi(static_cast<int>((p.y - origin) / cell));
            cell_of[g] = static_cast<std::uint32_t>(cy * n + cx);
            ++start[cell_of[g] + 1];
        }
        for (std::size_t i = 1; i < start.size(); ++i) start[i] += start[i - 1];
        items.resize(nb);
        auto fill = start;
        for (std::size_t g = 0; g < nb; ++g) items[fill[cell_of[g]]++] = static_cast<std::uint32_t>(g);
    }

    int clampi(int v) const { return std::clamp(v, 0, n - 1); }
};

}  // namespace

std::vector<Association> associate(const Realization& real, const NetworkConfig& cfg) {
    std::vector<Association> out(real.mt_points.size());
    if (real.bs_count() == 0) return out;
    const double w01 = std::pow(cfg.tiers[1].assoc_weight / cfg.tiers[0].assoc_weight, 1.0 / cfg.alpha);
    const auto n0 = static_cast<std::uint32_t>(real.bs_points[0].size());
    const double lam = static_cast<double>(real.bs_count()) / (kPi * real.window_radius * real.window_radius);
    const BsGrid grid(real, 1.0 / std::sqrt(lam));
    const double fmin = real.shadow.min_factor();

    for (std::size_t m = 0; m < real.mt_points.size(); ++m) {
        const auto& p = real.mt_points[m];
        const int cx = grid.clampi(static_cast<int>((p.x - grid.origin) / grid.cell));
        const int cy = grid.clampi(static_cast<int>((p.y - grid.origin) / grid.cell));
        Candidates c;
        double thr = kInf;
        double reach2 = kInf;  // (thr / fmin)^2: raw squared distance that can still matter
        auto visit = [&](int ix, int iy) {
            const double x0 = grid.origin + ix * grid.cell, y0 = grid.origin + iy * grid.cell;
            const double dx = std::max(0.0, std::max(x0 - p.x, p.x - (x0 + grid.cell)));
            const double dy = std::max(0.0, std::max(y0 - p.y, p.y - (y0 + grid.cell)));
            if (dx * dx + dy * dy >= reach2) return;
            const std::size_t cid = static_cast<std::size_t>(iy) * grid.n + ix;
            for (std::uint32_t k = grid.start[cid]; k < grid.start[cid + 1]; ++k) {
                const std::uint32_t g = grid.items[k];
                const double ex = grid.xs[g] - p.x, ey = grid.ys[g] - p.y;
                const double r2 = ex * ex + ey * ey;
                if (r2 >= reach2) continue;
                const double d = std::sqrt(r2) * real.shadow.distance_factor(static_cast<std::uint32_t>(m), g);
                const int t = grid.tier[g];
                c.offer(t, d, t == 0 ? g : g - n0);
                thr = stop_threshold(c, w01);
                reach2 = thr / fmin * (thr / fmin);
            }
        };
        const double lx = p.x - (grid.origin + cx * grid.cell), ly = p.y - (grid.origin + cy * grid.cell);
        const double edge = std::min({lx, ly, grid.cell - lx, grid.cell - ly});
        for (int q = 0; q <= grid.n; ++q) {
            // Cells in rings >= q lie outside the box of rings < q.
            if (q > 0) {
                const double gap = std::max(0.0, edge + (q - 1) * grid.cell);
                if (gap * gap >= reach2) break;
            }
            const int xlo = cx - q, xhi = cx + q, ylo = cy - q, yhi = cy + q;
            for (int ix = std::max(xlo, 0); ix <= std::min(xhi, grid.n - 1); ++ix) {
                if (ylo >= 0) visit(ix, ylo);
                if (q > 0 && yhi < grid.n) visit(ix, yhi);
            }
            for (int iy = std::max(ylo + 1, 0); iy <= std::min(yhi - 1, grid.n - 1); ++iy) {
                if (q > 0 && xlo >= 0) visit(xlo, iy);
                if (q > 0 && xhi < grid.n) visit(xhi, iy);
            }
        }
        out[m] = finish(c, w01, n0);
    }
    return out;
}

std::vector<Association> associate_exhaustive(const Realization& real, const NetworkConfig& cfg) {
    std::vector<Association> out(real.mt_points.size());
    if (real.bs_count() == 0) return out;
    const double w01 = std::pow(cfg.tiers[1].assoc_weight / cfg.tiers[0].assoc_weight, 1.0 / cfg.alpha);
    const auto n0 = static_cast<std::uint32_t>(real.bs_points[0].size());
    for (std::size_t m = 0; m < real.mt_points.size(); ++m) {
        const auto& p = real.mt_points[m];
        Candidates c;
        for (std::size_t g = 0; g < real.bs_count(); ++g) {
            const auto& b = real.bs(g);
            const double ex = b.x - p.x, ey = b.y - p.y;
            const double r = std::sqrt(ex * ex + ey * ey);  // same rounding as associate()
            const int t = real.tier_of(g);
            const auto gi = static_cast<std::uint32_t>(g);
            c.offer(t, r * real.shadow.distance_factor(static_cast<std::uint32_t>(m), gi), t == 0 ? gi : gi - n0);
        }
        out[m] = finish(c, w01, n0);
    }
    return out;
}

Schedule schedule(const Realization& real, const NetworkConfig& cfg, std::uint64_t seed, std::uint64_t drop) {
    const std::size_t nm = real.mt_points.size();
    const std::size_t nb = real.bs_count();
    if (real.association.size() != nm) throw std::logic_error("schedule: association missing");
    Schedule s;
    s.tx_power.assign(nm, 0.0);
    s.active_flags.assign(nm, 0);
    s.scheduled.assign(nb, -1);
    s.cell_active.assign(nb, 0);
    const double a = cfg.alpha, tau = cfg.tau;
    for (std::size_t m = 0; m < nm; ++m) {
        const auto& as = real.association[m];
        const double p_fpc = cfg.p0 * std::pow(tau * as.r, a * cfg.epsilon);
        const double cap_rx = std::pow(tau * as.u, -a);  // path gain to the most-interfered BS
        double p = p_fpc;
        bool active = true;
        switch (cfg.scheme) {
            case Scheme::IAM: active = p_fpc < cfg.p_max && p_fpc * cap_rx < cfg.i0; break;
            case Scheme::IUM: active = p_fpc < cfg.p_max; break;
            case Scheme::IAFPC: p = std::min({p_fpc, cfg.i0 / cap_rx, cfg.p_max}); break;
            case Scheme::IUFPC: break;
        }
        if (!active) continue;
        s.tx_power[m] = p;
        s.active_flags[m] = 1;
        ++s.cell_active[as.bs];
        if (std::isfinite(cfg.i0)) s.max_cap_ratio = std::max(s.max_cap_ratio, p * cap_rx / cfg.i0);
        if (std::isfinite(cfg.p_max)) s.max_power_ratio = std::max(s.max_power_ratio, p / cfg.p_max);
    }
    auto eng = drop_engine(seed, drop, 1);
    std::vector<std::uint32_t> pick(nb, 0);
    for (std::size_t b = 0; b < nb; ++b) {
        if (s.cell_active[b] == 0) continue;
        pick[b] = std::uniform_int_distribution<std::uint32_t>(0, s.cell_active[b] - 1)(eng);
    }
    std::vector<std::uint32_t> seen(nb, 0);
    for (std::size_t m = 0; m < nm; ++m) {
        if (!s.active_flags[m]) continue;
        const auto b = real.association[m].bs;
        if (seen[b]++ == pick[b]) s.scheduled[b] = static_cast<std::int32_t>(m);
    }
    return s;
}

DropStats measure(const Realization& real, const NetworkConfig& cfg, std::uint64_t seed, std::uint64_t drop,
                  const MeasureOptions& opts) {
    DropStats st;
    st.discard = real.discard;
    if (real.discard != DiscardReason::None) return st;
    const double a = cfg.alpha, tau = cfg.tau;
    const double noise = noise_power(cfg);
    const std::size_t nb = real.bs_count();
    auto eng = drop_engine(seed, drop, 2);
    std::exponential_distribution<double> fade(1.0);

    // Edge check: third-nearest shadowed BS of the tagged MT.
    {
        const auto& p = real.mt_points[real.tagged];
        std::array<double, 3> best{kInf, kInf, kInf};
        for (std::size_t g = 0; g < nb; ++g) {
            const auto& b = real.bs(g);
            const double d = std::hypot(b.x - p.x, b.y - p.y) *
                             real.shadow.distance_factor(static_cast<std::uint32_t>(real.tagged),
                                                         static_cast<std::uint32_t>(g));
            if (d < best[2]) {
                best[2] = d;
                std::sort(best.begin(), best.end());
            }
        }
        st.edge_contaminated = best[2] > 0.5 * real.window_radius;
    }

    std::vector<double> interference(nb, -1.0);
    auto interference_at = [&](std::uint32_t b) {
        if (interference[b] >= 0.0) return interference[b];
        const auto& bp = real.bs(b);
        double sum = 0.0;
        for (std::size_t o = 0; o < nb; ++o) {
            const std::int32_t m = real.scheduled[o];
            if (o == b || m < 0) continue;
            const auto& mp = real.mt_points[static_cast<std::size_t>(m)];
            const double d = std::hypot(mp.x - bp.x, mp.y - bp.y) *
                             real.shadow.distance_factor(static_cast<std::uint32_t>(m), b);
            sum += fade(eng) * real.tx_power[static_cast<std::size_t>(m)] * std::pow(tau * d, -a);
        }
        interference[b] = sum;
        return sum;
    };
    auto sinr_of = [&](std::size_t m, double interf) {
        const auto& as = real.association[m];
        return fade(eng) * real.tx_power[m] * std::pow(tau * as.r, -a) / (interf + noise);
    };

    const std::size_t t = real.tagged;
    const auto& tas = real.association[t];
    st.tagged_tier = tas.tier;
    st.tagged_interference = interference_at(tas.bs);
    st.tagged_active = real.active_flags[t] != 0;
    st.tagged_cell_active = real.cell_active[tas.bs];
    if (st.tagged_active) {
        st.tagged_power = real.tx_power[t];
        st.tagged_serving_distance = tas.r;
        st.tagged_sinr = sinr_of(t, st.tagged_interference);
    }

    st.mt_active = real.active_flags;
    const double inner2 = std::pow(opts.pooled_radius_fraction * real.window_radius, 2);
    for (std::size_t m = 0; m < real.mt_points.size(); ++m) {
        const auto& p = real.mt_points[m];
        if (p.x * p.x + p.y * p.y > inner2) continue;
        ++st.pooled_mts;
        if (!real.active_flags[m]) continue;
        const double sinr = m == t ? st.tagged_sinr : sinr_of(m, interference_at(real.association[m].bs));
        st.pooled_sinr.push_back(sinr);
        st.pooled_distance.push_back(real.association[m].r);
    }
    return st;
}

DropStats simulate_drop(const NetworkConfig& cfg, double window_radius, std::uint64_t seed, std::uint64_t drop,
                        const MeasureOptions& opts) {
    Realization real = sample_network(cfg, window_radius, seed, drop);
    if (real.discard != DiscardReason::None) {
        DropStats st;
        st.discard = real.discard;
        return st;
    }
    real.association = associate(real, cfg);
    Schedule s = schedule(real, cfg, seed, drop);
    real.tx_power = std::move(s.tx_power);
    real.active_flags = std::move(s.active_flags);
    real.scheduled = std::move(s.scheduled);
    real.cell_active = std::move(s.cell_active);
    DropStats st = measure(real, cfg, seed, drop, opts);
    st.max_cap_ratio = s.max_cap_ratio;
    st.max_power_ratio = s.max_power_ratio;
    return st;
}

namespace {

// Sums over one contiguous block of drops.
struct GroupSums {
    double used = 0, edge = 0, no_bs = 0, no_mt = 0;
    double active = 0, power = 0, interf = 0, interf2 = 0, se = 0, br = 0, tier0 = 0;
    std::array<double, 2> inv_load{0, 0}, active_tier{0, 0};
    std::vector<double> lap, ccdf, pooled_ccdf;
    double pooled_mts = 0, pooled_active = 0, pooled_r2 = 0;
    std::vector<double> distances;
    double max_cap = 0, max_pow = 0;
};

constexpr double kZ = 1.959963984540054;

Estimate wilson(double k, double n) {
    if (n <= 0) return {};
    const double p = k / n;
    const double z2 = kZ * kZ;
    const double den = 1.0 + z2 / n;
    const double mid = (p + z2 / (2.0 * n)) / den;
    const double half = kZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / den;
    return {p, std::max(0.0, mid - half), std::min(1.0, mid + half)};
}

// Delete-one-group jackknife of a statistic of the pooled sums.
template <std::size_t N, class F>
Estimate jackknife(const std::vector<std::array<double, N>>& groups, F stat) {
    std::array<double, N> tot{};
    for (const auto& g : groups)
        for (std::size_t i = 0; i < N; ++i) tot[i] += g[i];
    const double value = stat(tot);
    const std::size_t G = groups.size();
    if (G < 2) return {value, value, value};
    std::vector<double> loo(G);
    double mean = 0.0;
    for (std::size_t k = 0; k < G; ++k) {
        auto t = tot;
        for (std::size_t i = 0; i < N; ++i) t[i] -= groups[k][i];
        loo[k] = stat(t);
        mean += loo[k];
    }
    mean /= static_cast<double>(G);
    double ss = 0.0;
    for (double v : loo) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss * static_cast<double>(G - 1) / static_cast<double>(G));
    return {value, value - kZ * se, value + kZ * se};
}

double ratio(const std::array<double, 2>& t) { return t[1] > 0 ? t[0] / t[1] : 0.0; }

}  // namespace

MetricSet run_campaign(const NetworkConfig& cfg, const CampaignOptions& opts) {
    if (opts.n_drops < 1) throw std::invalid_argument("run_campaign: n_drops must be >= 1");
    if (auto errs = validate(cfg); !errs.empty()) throw ConfigError(std::move(errs));
    const double radius = opts.window_radius > 0.0 ? opts.window_radius : default_window_radius(cfg);
    std::vector<double> grid = opts.gamma_grid_db;
    if (grid.empty())
        for (int g = -10; g <= 40; ++g) grid.push_back(g);
    std::vector<double> grid_lin(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) grid_lin[i] = db_to_linear(grid[i]);

    const std::size_t n = opts.n_drops;
    const std::size_t G = std::min<std::size_t>(n, 64);
    std::vector<GroupSums> groups(G);

    auto run_group = [&](std::size_t gi) {
        GroupSums& s = groups[gi];
        s.lap.assign(opts.laplace_s.size(), 0.0);
        s.ccdf.assign(grid.size(), 0.0);
        s.pooled_ccdf.assign(grid.size(), 0.0);
        const std::size_t lo = gi * n / G, hi = (gi + 1) * n / G;
        for (std::size_t d = lo; d < hi; ++d) {
            const DropStats st = simulate_drop(cfg, radius, opts.seed, d, opts.measure);
            if (st.discard == DiscardReason::NoBaseStations) { s.no_bs += 1; continue; }
            if (st.discard == DiscardReason::NoMobiles) { s.no_mt += 1; continue; }
            if (st.edge_contaminated) { s.edge += 1; continue; }
            s.used += 1;
            s.max_cap = std::max(s.max_cap, st.max_cap_ratio);
            s.max_pow = std::max(s.max_pow, st.max_power_ratio);
            const double I = st.tagged_interference;
            s.interf += I;
            s.interf2 += I * I;
            for (std::size_t k = 0; k < opts.laplace_s.size(); ++k) s.lap[k] += std::exp(-opts.laplace_s[k] * I);
            if (st.tagged_tier == 0) s.tier0 += 1;
            for (std::size_t k = 0; k < grid.size(); ++k)
                if (st.tagged_sinr > grid_lin[k]) s.ccdf[k] += 1;
            if (st.tagged_active) {
                s.active += 1;
                s.power += st.tagged_power;
                const double se = se_from_sinr(st.tagged_sinr, opts.amc);
                const double inv = 1.0 / st.tagged_cell_active;
                s.se += se;
                s.br += cfg.bandwidth_hz * inv * se;
                s.inv_load[st.tagged_tier] += inv;
                s.active_tier[st.tagged_tier] += 1;
            }
            s.pooled_mts += static_cast<double>(st.pooled_mts);
            s.pooled_active += static_cast<double>(st.pooled_sinr.size());
            for (std::size_t i = 0; i < st.pooled_sinr.size(); ++i) {
                for (std::size_t k = 0; k < grid.size(); ++k)
                    if (st.pooled_sinr[i] > grid_lin[k]) s.pooled_ccdf[k] += 1;
                s.pooled_r2 += st.pooled_distance[i] * st.pooled_distance[i];
                if (s.distances.size() < opts.max_distance_samples) s.distances.push_back(st.pooled_distance[i]);
            }
        }
    };

    unsigned workers = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, G));
    if (workers <= 1) {
        for (std::size_t g = 0; g < G; ++g) run_group(g);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::exception_ptr err;
        std::atomic<bool> failed{false};
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t g = next++; g < G; g = next++) {
                    try {
                        run_group(g);
                    } catch (...) {
                        if (!failed.exchange(true)) err = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (err) std::rethrow_exception(err);
    }

    MetricSet out;
    out.drops_requested = n;
    double used = 0, active = 0;
    for (const auto& s : groups) {
        out.drops_edge += static_cast<std::size_t>(s.edge);
        out.drops_no_bs += static_cast<std::size_t>(s.no_bs);
        out.drops_no_mt += static_cast<std::size_t>(s.no_mt);
        used += s.used;
        active += s.active;
        out.pooled_mts += static_cast<std::size_t>(s.pooled_mts);
        out.pooled_active += static_cast<std::size_t>(s.pooled_active);
        out.pooled_r2_active_sum += s.pooled_r2;
        out.max_cap_ratio = std::max(out.max_cap_ratio, s.max_cap);
        out.max_power_ratio = std::max(out.max_power_ratio, s.max_pow);
        for (double d : s.distances)
            if (out.serving_distances.size() < opts.max_distance_samples) out.serving_distances.push_back(d);
    }
    out.drops_used = static_cast<std::size_t>(used);
    if (out.drops_used == 0) throw std::runtime_error("run_campaign: all drops discarded");

    auto per_drop = [&](auto field) {
        std::vector<std::array<double, 2>> v;
        for (const auto& s : groups) v.push_back({field(s), s.used});
        return jackknife(v, ratio);
    };
    out.pr_active = wilson(active, used);
    out.mean_power = per_drop([](const GroupSums& s) { return s.power; });
    out.mean_interference = per_drop([](const GroupSums& s) { return s.interf; });
    {
        std::vector<std::array<double, 3>> v;
        for (const auto& s : groups) v.push_back({s.interf, s.interf2, s.used});
        out.var_interference = jackknife(v, [](const std::array<double, 3>& t) {
            if (t[2] < 2) return 0.0;
            const double m = t[0] / t[2];
            return (t[1] / t[2] - m * m) * t[2] / (t[2] - 1.0);
        });
    }
    out.mean_se = per_drop([](const GroupSums& s) { return s.se; });
    out.mean_br = per_drop([](const GroupSums& s) { return s.br; });
    {
        std::vector<std::array<double, 2>> se, br;
        for (const auto& s : groups) {
            se.push_back({s.se, s.active});
            br.push_back({s.br, s.active});
        }
        out.mean_se_active = jackknife(se, ratio);
        out.mean_br_active = jackknife(br, ratio);
    }
    for (int j = 0; j < 2; ++j) {
        std::vector<std::array<double, 2>> v;
        for (const auto& s : groups) v.push_back({s.inv_load[j], s.active_tier[j]});
        out.mean_inverse_load[j] = jackknife(v, ratio);
    }
    {
        double t0 = 0;
        for (const auto& s : groups) t0 += s.tier0;
        out.tier0_association = wilson(t0, used);
    }
    out.laplace_s = opts.laplace_s;
    for (std::size_t k = 0; k < opts.laplace_s.size(); ++k)
        out.laplace.push_back(per_drop([k](const GroupSums& s) { return s.lap[k]; }));
    out.gamma_grid_db = grid;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double c = 0, pc = 0;
        for (const auto& s : groups) {
            c += s.ccdf[k];
            pc += s.pooled_ccdf[k];
        }
        out.sinr_ccdf.push_back(wilson(c, used));
        out.sinr_ccdf_active.push_back(out.pooled_active ? pc / static_cast<double>(out.pooled_active) : 0.0);
    }
    return out;
}

}  // namespace iamnet
