#pragma once

#include <filesystem>

#include "iamnet/analytic_gca.hpp"
#include "iamnet/analytic_spla.hpp"
#include "iamnet/model.hpp"

namespace iamnet {

inline constexpr double kLoadShape = 3.5;

// CSV with header cqi,gamma_db,se_bps_hz.
AmcTable load_amc_csv(const std::filesystem::path& path);

double se_from_sinr(double sinr, const AmcTable& table);

// Ratio lambda_MT * Pr(X^j, A) / lambda^(j).
struct LoadModel {
    double ratio;
};

// Pr(N = n) for the number of active MTs in the typical MT's cell, n >= 1.
double load_pmf(int n, LoadModel load);
double load_pmf(int n, double mt_density, double tier_density, double p);

// E[1/N], closed form of the normalized pmf: (1 - (1 + x/3.5)^{-3.5}) / x.
double mean_inverse_load(LoadModel load);
// Same quantity by summing the pmf until the tail mass drops below 1e-12.
double mean_inverse_load_direct(LoadModel load);

double mean_se(const GcaContext& ctx, const AmcTable& table, bool conditioned_on_active);
double mean_se(const SplaContext& ctx, const AmcTable& table, bool conditioned_on_active);

// Mean binary rate (bps): b_w E[1/N_j] SE, summed over serving tiers.
// Loads use the deployed tier densities, not the shadow-scaled ones.
double mean_br(const GcaContext& ctx, const AmcTable& table, bool conditioned_on_active);
double mean_br(const SplaContext& ctx, const AmcTable& table, bool conditioned_on_active);

}  // namespace iamnet
