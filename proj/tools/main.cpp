#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "iamnet/specfun.hpp"
#include "runner.hpp"

namespace {

// One line on stderr: error=<category> message=<JSON string>.
int fail(const char* category, const std::string& message, int code) {
    std::cerr << "error=" << category << " message=" << nlohmann::json(message).dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Uplink interference-aware muting: analytic curves and Monte Carlo campaigns"};
    app.require_subcommand(1);

    iamnet::cli::RunOptions ro;
    std::string amc;
    auto* run = app.add_subcommand("run", "Evaluate a parameter sweep and write CSV tables");
    run->add_option("--config", ro.config_path, "Network config (JSON)")->required();
    run->add_option("--sweep", ro.sweep_path, "Sweep file (JSON)")->required();
    run->add_option("--out", ro.out_dir, "Output directory")->required();
    run->add_option("--seed", ro.seed, "Campaign seed")->default_val(1);
    run->add_option("--drops", ro.drops, "Monte Carlo drops per point")->default_val(10000);
    run->add_option("--amc", amc, "AMC table CSV (cqi,gamma_db,se_bps_hz)");
    run->add_option("--workers", ro.workers, "Worker threads, 0 for all cores")->default_val(0);

    std::string report_dir;
    auto* rep = app.add_subcommand("report", "Summarize a finished run");
    rep->add_option("--out", report_dir, "Output directory of a run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail("usage", e.what(), 64);
    }

    try {
        if (*run) {
            if (!amc.empty()) ro.amc_path = amc;
            iamnet::cli::run(ro);
        } else {
            iamnet::cli::report(report_dir, std::cout);
        }
    } catch (const iamnet::ConfigError& e) {
        std::string msg;
        for (const auto& p : e.problems()) msg += (msg.empty() ? "" : "; ") + p;
        return fail("config", msg, 2);
    } catch (const iamnet::cli::IoError& e) {
        return fail("io", e.what(), 3);
    } catch (const iamnet::QuadratureError& e) {
        return fail("quadrature", e.what(), 4);
    } catch (const std::exception& e) {
        return fail("runtime", e.what(), 5);
    }
    return 0;
}
