#include "iamnet/rate.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace iamnet {

AmcTable load_amc_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open AMC table " + path.string()});
    std::string line;
    if (!std::getline(in, line)) throw ConfigError({"AMC table is empty"});
    if (line.rfind("cqi,gamma_db,se_bps_hz", 0) != 0)
        throw ConfigError({"AMC table header must be cqi,gamma_db,se_bps_hz"});
    AmcTable t;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
            throw ConfigError({"AMC table line " + std::to_string(lineno) + ": expected 3 columns"});
        try {
            t.rows.push_back({std::stoi(a), db_to_linear(std::stod(b)), std::stod(c)});
        } catch (const std::exception&) {
            throw ConfigError({"AMC table line " + std::to_string(lineno) + ": not a number"});
        }
    }
    if (auto errs = validate(t); !errs.empty()) throw ConfigError(std::move(errs));
    return t;
}

double se_from_sinr(double sinr, const AmcTable& table) {
    double se = 0.0;
    for (const auto& r : table.rows) {
        if (sinr >= r.gamma) se = r.se;
        else break;
    }
    return se;
}

double load_pmf(int n, LoadModel load) {
    if (n < 1) throw std::domain_error("load_pmf: n must be >= 1");
    const double x = load.ratio;
    const double k = kLoadShape;
    if (x == 0.0) return n == 1 ? 1.0 : 0.0;
    const double lp = k * std::log(k) - std::lgamma(n) + std::lgamma(n + k) - std::lgamma(k) +
                      (n - 1) * std::log(x) - (n + k) * std::log(k + x);
    return std::exp(lp);
}

double load_pmf(int n, double mt_density, double tier_density, double p) {
    return load_pmf(n, LoadModel{mt_density * p / tier_density});
}

double mean_inverse_load(LoadModel load) {
    const double x = load.ratio;
    if (x < 0.0) throw std::domain_error("mean_inverse_load: negative ratio");
    if (x == 0.0) return 1.0;
    return -std::expm1(-kLoadShape * std::log1p(x / kLoadShape)) / x;
}

double mean_inverse_load_direct(LoadModel load) {
    double mass = 0.0, sum = 0.0;
    for (int n = 1; n < 100'000'000; ++n) {
        const double p = load_pmf(n, load);
        mass += p;
        sum += p / n;
        if (1.0 - mass < 1e-12 && n > load.ratio) return sum;
    }
    throw std::runtime_error("mean_inverse_load_direct: tail did not vanish");
}

namespace {

// sum_i SE_i [F(gamma_i) - F(gamma_{i+1})] with F beyond the last row = 0.
double telescoped_se(const AmcTable& table, const std::function<double(double)>& ccdf) {
    double out = 0.0;
    double next = 0.0;
    for (std::size_t i = table.rows.size(); i-- > 0;) {
        const double cur = ccdf(table.rows[i].gamma);
        out += table.rows[i].se * (cur - next);
        next = cur;
    }
    return out;
}

double deployed_density(const NetworkConfig& view, int j) {
    return view.tiers[j].density / shadow_density_factor(view.shadow_sigma_db, view.alpha);
}

}  // namespace

double mean_se(const GcaContext& ctx, const AmcTable& table, bool conditioned_on_active) {
    const double se = telescoped_se(table, [&](double g) { return ctx.sinr_ccdf(g); });
    if (!conditioned_on_active) return se;
    const double pa = ctx.pr_active();
    return pa > 0.0 ? se / pa : 0.0;
}

double mean_se(const SplaContext& ctx, const AmcTable& table, bool conditioned_on_active) {
    const double se = telescoped_se(table, [&](double g) { return ctx.sinr_ccdf_active_spla(g); });
    return conditioned_on_active ? se : se * ctx.pr_active_spla();
}

double mean_br(const GcaContext& ctx, const AmcTable& table, bool conditioned_on_active) {
    const auto& cfg = ctx.config();
    double br = 0.0;
    for (int j = 0; j < 2; ++j) {
        const double pj = ctx.pr_active_assoc(j, 0) + ctx.pr_active_assoc(j, 1);
        if (pj == 0.0) continue;
        const LoadModel load{cfg.mt_density * pj / deployed_density(cfg, j)};
        br += cfg.bandwidth_hz * mean_inverse_load(load) *
              telescoped_se(table, [&](double g) { return ctx.sinr_ccdf_tier(g, j); });
    }
    if (!conditioned_on_active) return br;
    const double pa = ctx.pr_active();
    return pa > 0.0 ? br / pa : 0.0;
}

double mean_br(const SplaContext& ctx, const AmcTable& table, bool conditioned_on_active) {
    const auto& cfg = ctx.config();
    const double pa = ctx.pr_active_spla();
    const double se_active = telescoped_se(table, [&](double g) { return ctx.sinr_ccdf_active_spla(g); });
    double br = 0.0;
    for (int j = 0; j < 2; ++j) {
        const double pj = cfg.tiers[j].density / ctx.lambda_total() * pa;
        const LoadModel load{cfg.mt_density * pj / deployed_density(cfg, j)};
        br += cfg.bandwidth_hz * mean_inverse_load(load) * pj * se_active;
    }
    if (!conditioned_on_active) return br;
    return pa > 0.0 ? br / pa : 0.0;
}

}  // namespace iamnet
