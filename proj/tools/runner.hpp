#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "iamnet/model.hpp"

namespace iamnet::cli {

enum class SweepParameter { I0Dbm, Epsilon, PMaxDbm, WeightRatioDb, LambdaScale };

std::string_view to_string(SweepParameter p);

struct SweepSpec {
    SweepParameter parameter = SweepParameter::I0Dbm;
    std::vector<double> grid;
    bool analytic = true;
    bool montecarlo = true;
    std::vector<Scheme> schemes{Scheme::IAM};
    std::vector<double> gamma_grid_db;       // empty: -10..40 dB step 1
    std::vector<double> laplace_s_over_p0{0.1, 1.0, 10.0};
    double window_radius_m = 0.0;            // 0: simulator default
};

// JSON sweep file; throws ConfigError listing every problem.
SweepSpec parse_sweep(std::string_view json_text);
SweepSpec load_sweep(const std::filesystem::path& path);

// Base config with the swept parameter set to value and the scheme applied.
// weight_ratio_db sets t0/t1 with t1 = 1; lambda_scale multiplies the BS and MT
// densities together, which keeps the mean cell load fixed.
NetworkConfig resolve_point(const NetworkConfig& base, SweepParameter p, double value, Scheme scheme);

struct RunOptions {
    std::filesystem::path config_path;
    std::filesystem::path sweep_path;
    std::filesystem::path out_dir;
    std::uint64_t seed = 1;
    std::size_t drops = 10000;
    std::optional<std::filesystem::path> amc_path;
    unsigned workers = 0;  // 0: hardware concurrency
};

// Writes one CSV per metric, points.csv and manifest.json into out_dir.
void run(const RunOptions& opts);

// Prints per-metric analytic-vs-MC deviations and the regime of every point.
void report(const std::filesystem::path& out_dir, std::ostream& os);

// Error categories used in the machine-parsable failure line.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace iamnet::cli
