#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "iamnet/model.hpp"

namespace iamnet {

struct Point {
    double x, y;
};

// Per-link lognormal shadowing, evaluated on demand from a counter-based hash of
// (drop key, MT, BS). The normal deviate is clamped at +-kShadowClampSigma.
class ShadowField {
public:
    static constexpr double kShadowClampSigma = 4.5;

    ShadowField() = default;
    ShadowField(std::uint64_t key, double sigma_db, double alpha);

    // Multiplier on raw distance, S^{-1/alpha}.
    double distance_factor(std::uint32_t mt, std::uint32_t bs) const;
    double min_factor() const { return min_factor_; }
    // Standard normal deviate behind the link (before scaling by sigma).
    double deviate(std::uint32_t mt, std::uint32_t bs) const;

private:
    std::uint64_t key_ = 0;
    double kappa_ = 0.0;  // sigma ln10 / (10 alpha)
    double min_factor_ = 1.0;
};

double inverse_normal_cdf(double p);

struct Association {
    int tier = -1;
    std::uint32_t bs = 0;  // global BS index
    double r = kInf;       // shadowed serving distance
    double u = kInf;       // shadowed distance to the most-interfered BS
};

enum class DiscardReason { None, NoBaseStations, NoMobiles };

struct Realization {
    std::array<std::vector<Point>, 2> bs_points;
    std::vector<Point> mt_points;
    ShadowField shadow;
    std::vector<Association> association;
    std::vector<double> tx_power;
    std::vector<std::uint8_t> active_flags;
    std::vector<std::int32_t> scheduled;  // per global BS, -1 if no active associate
    std::vector<std::uint32_t> cell_active;
    std::size_t tagged = 0;
    double window_radius = 0.0;
    bool edge_contaminated = false;
    DiscardReason discard = DiscardReason::None;

    std::size_t bs_count() const { return bs_points[0].size() + bs_points[1].size(); }
    int tier_of(std::size_t g) const { return g < bs_points[0].size() ? 0 : 1; }
    const Point& bs(std::size_t g) const {
        return g < bs_points[0].size() ? bs_points[0][g] : bs_points[1][g - bs_points[0].size()];
    }
};

// Engine for one (seed, drop, stream) triple.
std::mt19937_64 drop_engine(std::uint64_t seed, std::uint64_t drop, std::uint32_t stream);

double default_window_radius(const NetworkConfig& cfg);

Realization sample_network(const NetworkConfig& cfg, double window_radius, std::uint64_t seed,
                           std::uint64_t drop = 0);
std::vector<Association> associate(const Realization& real, const NetworkConfig& cfg);
// Checks every BS for every MT; reference for associate().
std::vector<Association> associate_exhaustive(const Realization& real, const NetworkConfig& cfg);

struct Schedule {
    std::vector<double> tx_power;
    std::vector<std::uint8_t> active_flags;
    std::vector<std::int32_t> scheduled;
    std::vector<std::uint32_t> cell_active;
    double max_cap_ratio = 0.0;   // max over active MTs of p (tau U)^-alpha / i0
    double max_power_ratio = 0.0; // max over active MTs of p / p_max
};

Schedule schedule(const Realization& real, const NetworkConfig& cfg, std::uint64_t seed,
                  std::uint64_t drop = 0);

struct DropStats {
    DiscardReason discard = DiscardReason::None;
    bool edge_contaminated = false;
    bool tagged_active = false;
    int tagged_tier = -1;
    double tagged_sinr = 0.0;
    double tagged_power = 0.0;
    double tagged_interference = 0.0;
    double tagged_serving_distance = 0.0;
    std::uint32_t tagged_cell_active = 0;
    std::vector<std::uint8_t> mt_active;
    // Active MTs within the inner disk, each evaluated at its own serving BS.
    std::size_t pooled_mts = 0;
    std::vector<double> pooled_sinr;
    std::vector<double> pooled_distance;
    double max_cap_ratio = 0.0;
    double max_power_ratio = 0.0;
};

struct MeasureOptions {
    double pooled_radius_fraction = 0.5;
};

DropStats measure(const Realization& real, const NetworkConfig& cfg, std::uint64_t seed, std::uint64_t drop,
                  const MeasureOptions& opts = {});

// sample_network + associate + schedule + measure.
DropStats simulate_drop(const NetworkConfig& cfg, double window_radius, std::uint64_t seed, std::uint64_t drop,
                        const MeasureOptions& opts = {});

struct Estimate {
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct CampaignOptions {
    std::size_t n_drops = 10000;
    std::uint64_t seed = 1;
    unsigned workers = 0;        // 0: hardware concurrency
    double window_radius = 0.0;  // 0: default_window_radius
    std::vector<double> gamma_grid_db;  // empty: -10..40 dB step 1
    std::vector<double> laplace_s;      // in 1/W
    AmcTable amc = default_amc_table();
    std::size_t max_distance_samples = 0;
    MeasureOptions measure;
};

struct MetricSet {
    std::size_t drops_requested = 0;
    std::size_t drops_used = 0;
    std::size_t drops_edge = 0;
    std::size_t drops_no_bs = 0;
    std::size_t drops_no_mt = 0;

    Estimate pr_active;
    Estimate mean_power;
    Estimate mean_interference;
    Estimate var_interference;
    Estimate mean_se;
    Estimate mean_se_active;
    Estimate mean_br;
    Estimate mean_br_active;
    std::array<Estimate, 2> mean_inverse_load;  // per serving tier, active tagged MTs
    Estimate tier0_association;

    std::vector<double> laplace_s;
    std::vector<Estimate> laplace;
    std::vector<double> gamma_grid_db;
    std::vector<Estimate> sinr_ccdf;          // tagged MT, muted at 0
    std::vector<double> sinr_ccdf_active;     // pooled active MTs

    std::size_t pooled_mts = 0;
    std::size_t pooled_active = 0;
    double pooled_r2_active_sum = 0.0;        // sum of R^2 over pooled active MTs
    std::vector<double> serving_distances;    // pooled active MTs, drop order

    double max_cap_ratio = 0.0;
    double max_power_ratio = 0.0;
};

MetricSet run_campaign(const NetworkConfig& cfg, const CampaignOptions& opts);

}  // namespace iamnet
