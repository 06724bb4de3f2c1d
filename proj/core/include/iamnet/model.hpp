#pragma once

#include <array>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iamnet {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

double db_to_linear(double db);
double linear_to_db(double x);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

struct TierConfig {
    double density;       // BSs per m^2
    double assoc_weight;  // linear
};

enum class Scheme { IAM, IUM, IAFPC, IUFPC };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);

// Tier 0 is the macro tier, tier 1 the small-cell tier. All values are linear SI
// units; p_max and i0 accept kInf.
struct NetworkConfig {
    std::array<TierConfig, 2> tiers{};
    double tau = 2.6;
    double alpha = 3.8;
    double p0 = 0.0;
    double epsilon = 1.0;
    double p_max = kInf;
    double i0 = kInf;
    double mt_density = 0.0;
    double bandwidth_hz = 9e6;
    double noise_psd_dbm_hz = -174.0;
    double noise_figure_db = 9.0;
    double shadow_sigma_db = 4.0;
    Scheme scheme = Scheme::IAM;
};

// GCA variant of the reference deployment: 9 dB macro bias, i0 = -90 dBm,
// p_max = infinity, full channel inversion.
NetworkConfig default_network_config();

enum class RegimeLabel { InterferenceUnaware, IAAssociationIndependent, IAAssociationDependent };

std::string_view to_string(RegimeLabel r);

double noise_power(const NetworkConfig& cfg);
RegimeLabel classify_regime(const NetworkConfig& cfg);

// Every violated invariant, in a stable order. Empty means valid.
std::vector<std::string> validate(const NetworkConfig& cfg);

// E[S^{2/alpha}] for S = 10^{X/10}, X ~ N(0, sigma_db^2).
double shadow_density_factor(double sigma_db, double alpha);

// Config as seen by the analytic frameworks: tier densities scaled by the
// shadowing factor, and the scheme folded into (i0, p_max). IUM drops the
// interference cap, IUFPC drops both caps. IAFPC has no analytic model.
NetworkConfig analytic_view(const NetworkConfig& cfg);

struct AmcRow {
    int cqi;
    double gamma;  // linear SINR threshold
    double se;     // bps/Hz
};

struct AmcTable {
    std::vector<AmcRow> rows;
};

AmcTable default_amc_table();
std::vector<std::string> validate(const AmcTable& table);

// JSON config files. Keys mirror NetworkConfig field names; dB quantities use
// the _db / _dbm suffix. Missing keys fall back to default_network_config().
NetworkConfig parse_config(std::string_view json_text);
NetworkConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const NetworkConfig& cfg);

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

}  // namespace iamnet
