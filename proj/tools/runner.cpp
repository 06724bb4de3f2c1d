#include "runner.hpp"

#include <algorithm>
#include <charconv>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "iamnet/analytic_gca.hpp"
#include "iamnet/rate.hpp"
#include "iamnet/simulator.hpp"

namespace iamnet::cli {

using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct ParamName {
    SweepParameter p;
    const char* name;
};
constexpr ParamName kParams[] = {{SweepParameter::I0Dbm, "i0_dbm"},
                                 {SweepParameter::Epsilon, "epsilon"},
                                 {SweepParameter::PMaxDbm, "p_max_dbm"},
                                 {SweepParameter::WeightRatioDb, "weight_ratio_db"},
                                 {SweepParameter::LambdaScale, "lambda_scale"}};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<double> read_numbers(const json& j, const char* key, std::vector<std::string>& errs) {
    std::vector<double> out;
    const auto& a = j.at(key);
    if (!a.is_array()) {
        errs.push_back(std::string(key) + ": expected an array of numbers");
        return out;
    }
    for (const auto& v : a) {
        if (!v.is_number()) {
            errs.push_back(std::string(key) + ": expected an array of numbers");
            return {};
        }
        out.push_back(v.get<double>());
    }
    return out;
}

// Shortest decimal form that reads back to the same double.
std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Row {
    std::string metric;
    double value, lo, hi;
};

// Rows for one (point, scheme, engine) job, keyed by output file.
using JobRows = std::map<std::string, std::vector<Row>>;

void put(JobRows& rows, const std::string& file, const std::string& metric, double v) {
    rows[file].push_back({metric, v, v, v});
}

void put(JobRows& rows, const std::string& file, const std::string& metric, const Estimate& e) {
    rows[file].push_back({metric, e.value, e.ci_low, e.ci_high});
}

std::string gamma_label(const std::string& base, double g_db) { return base + "@" + fmt(g_db) + "dB"; }
std::string laplace_label(double k) { return "laplace@s=" + fmt(k) + "/p0"; }

JobRows analytic_rows(const NetworkConfig& cfg, const SweepSpec& sweep, const std::vector<double>& grid,
                      const AmcTable& amc) {
    JobRows rows;
    const GcaContext ctx(cfg);
    const auto mom = ctx.interference_moments();
    put(rows, "pr_active", "pr_active", ctx.pr_active());
    put(rows, "mean_power", "mean_power", ctx.mean_transmit_power());
    put(rows, "mean_interference", "mean_interference", mom.mean);
    put(rows, "var_interference", "var_interference", mom.variance);
    put(rows, "mean_se", "mean_se", mean_se(ctx, amc, false));
    put(rows, "mean_se_active", "mean_se_active", mean_se(ctx, amc, true));
    put(rows, "mean_br", "mean_br", mean_br(ctx, amc, false));
    put(rows, "mean_br_active", "mean_br_active", mean_br(ctx, amc, true));
    put(rows, "tier0_association", "tier0_association", ctx.pr_assoc(0));
    for (double k : sweep.laplace_s_over_p0)
        put(rows, "laplace", laplace_label(k), ctx.interference_laplace_mixture(k / ctx.config().p0));
    for (double g : grid) {
        const double lin = db_to_linear(g);
        put(rows, "sinr_ccdf", gamma_label("sinr_ccdf", g), ctx.sinr_ccdf(lin));
        put(rows, "sinr_ccdf_active", gamma_label("sinr_ccdf_active", g), ctx.sinr_ccdf_active(lin));
    }
    return rows;
}

struct McResult {
    JobRows rows;
    json stats;
};

McResult mc_rows(const NetworkConfig& cfg, const SweepSpec& sweep, const std::vector<double>& grid,
                 const AmcTable& amc, std::uint64_t seed, std::size_t drops) {
    CampaignOptions o;
    o.n_drops = drops;
    o.seed = seed;
    o.workers = 1;
    o.window_radius = sweep.window_radius_m;
    o.gamma_grid_db = grid;
    for (double k : sweep.laplace_s_over_p0) o.laplace_s.push_back(k / cfg.p0);
    o.amc = amc;
    const MetricSet m = run_campaign(cfg, o);
    McResult r;
    auto& rows = r.rows;
    put(rows, "pr_active", "pr_active", m.pr_active);
    put(rows, "mean_power", "mean_power", m.mean_power);
    put(rows, "mean_interference", "mean_interference", m.mean_interference);
    put(rows, "var_interference", "var_interference", m.var_interference);
    put(rows, "mean_se", "mean_se", m.mean_se);
    put(rows, "mean_se_active", "mean_se_active", m.mean_se_active);
    put(rows, "mean_br", "mean_br", m.mean_br);
    put(rows, "mean_br_active", "mean_br_active", m.mean_br_active);
    put(rows, "tier0_association", "tier0_association", m.tier0_association);
    for (std::size_t k = 0; k < sweep.laplace_s_over_p0.size(); ++k)
        put(rows, "laplace", laplace_label(sweep.laplace_s_over_p0[k]), m.laplace[k]);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        put(rows, "sinr_ccdf", gamma_label("sinr_ccdf", grid[k]), m.sinr_ccdf[k]);
        put(rows, "sinr_ccdf_active", gamma_label("sinr_ccdf_active", grid[k]), m.sinr_ccdf_active[k]);
    }
    r.stats = {{"drops_requested", m.drops_requested}, {"drops_used", m.drops_used},
               {"drops_edge", m.drops_edge},           {"drops_no_bs", m.drops_no_bs},
               {"drops_no_mt", m.drops_no_mt},         {"max_cap_ratio", m.max_cap_ratio},
               {"max_power_ratio", m.max_power_ratio}};
    return r;
}

const std::vector<std::string> kMetricFiles = {
    "pr_active", "mean_power",        "mean_interference", "var_interference", "mean_se",         "mean_se_active",
    "mean_br",   "mean_br_active",    "tier0_association", "laplace",          "sinr_ccdf",       "sinr_ccdf_active"};

}  // namespace

std::string_view to_string(SweepParameter p) {
    for (const auto& e : kParams)
        if (e.p == p) return e.name;
    return "?";
}

SweepSpec parse_sweep(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("sweep parse error: ") + e.what()});
    }
    if (!j.is_object()) throw ConfigError({"sweep: top level must be an object"});
    std::vector<std::string> errs;
    static const char* known[] = {"parameter",     "grid",     "engines", "schemes", "gamma_grid_db",
                                  "laplace_s_over_p0", "window_radius_m"};
    for (const auto& [k, _] : j.items())
        if (std::none_of(std::begin(known), std::end(known), [&](const char* n) { return k == n; }))
            errs.push_back("sweep: unknown key '" + k + "'");

    SweepSpec s;
    if (!j.contains("parameter") || !j.at("parameter").is_string()) {
        errs.push_back("sweep: 'parameter' must be one of i0_dbm, epsilon, p_max_dbm, weight_ratio_db, lambda_scale");
    } else {
        const auto name = j.at("parameter").get<std::string>();
        const auto it = std::find_if(std::begin(kParams), std::end(kParams),
                                     [&](const ParamName& e) { return name == e.name; });
        if (it == std::end(kParams))
            errs.push_back("sweep: unknown parameter '" + name + "'");
        else
            s.parameter = it->p;
    }
    if (!j.contains("grid")) {
        errs.push_back("sweep: 'grid' is required");
    } else {
        s.grid = read_numbers(j, "grid", errs);
        if (s.grid.empty()) errs.push_back("sweep: 'grid' must be nonempty");
    }
    if (j.contains("engines")) {
        const auto& e = j.at("engines");
        const std::string v = e.is_string() ? e.get<std::string>() : "";
        if (v == "analytic") {
            s.montecarlo = false;
        } else if (v == "montecarlo") {
            s.analytic = false;
        } else if (v != "both") {
            errs.push_back("sweep: 'engines' must be analytic, montecarlo or both");
        }
    }
    if (j.contains("schemes")) {
        s.schemes.clear();
        const auto& a = j.at("schemes");
        if (!a.is_array() || a.empty()) errs.push_back("sweep: 'schemes' must be a nonempty array");
        else
            for (const auto& v : a) {
                try {
                    s.schemes.push_back(parse_scheme(v.is_string() ? v.get<std::string>() : ""));
                } catch (const std::exception&) {
                    errs.push_back("sweep: unknown scheme " + v.dump());
                }
            }
    }
    if (j.contains("gamma_grid_db")) s.gamma_grid_db = read_numbers(j, "gamma_grid_db", errs);
    if (j.contains("laplace_s_over_p0")) s.laplace_s_over_p0 = read_numbers(j, "laplace_s_over_p0", errs);
    if (j.contains("window_radius_m")) {
        const auto& w = j.at("window_radius_m");
        if (!w.is_number() || !(w.get<double>() > 0.0))
            errs.push_back("sweep: 'window_radius_m' must be a positive number");
        else
            s.window_radius_m = w.get<double>();
    }
    if (!errs.empty()) throw ConfigError(std::move(errs));
    return s;
}

SweepSpec load_sweep(const std::filesystem::path& path) { return parse_sweep(read_file(path)); }

NetworkConfig resolve_point(const NetworkConfig& base, SweepParameter p, double value, Scheme scheme) {
    NetworkConfig cfg = base;
    cfg.scheme = scheme;
    switch (p) {
        case SweepParameter::I0Dbm: cfg.i0 = dbm_to_watts(value); break;
        case SweepParameter::Epsilon: cfg.epsilon = value; break;
        case SweepParameter::PMaxDbm: cfg.p_max = dbm_to_watts(value); break;
        case SweepParameter::WeightRatioDb:
            cfg.tiers[0].assoc_weight = db_to_linear(value);
            cfg.tiers[1].assoc_weight = 1.0;
            break;
        case SweepParameter::LambdaScale:
            cfg.tiers[0].density *= value;
            cfg.tiers[1].density *= value;
            cfg.mt_density *= value;
            break;
    }
    return cfg;
}

void run(const RunOptions& opts) {
    const NetworkConfig base = load_config(opts.config_path);
    const SweepSpec sweep = load_sweep(opts.sweep_path);
    if (opts.drops < 1) throw ConfigError({"drops must be >= 1"});
    const AmcTable amc = opts.amc_path ? load_amc_csv(*opts.amc_path) : default_amc_table();
    std::vector<double> grid = sweep.gamma_grid_db;
    if (grid.empty())
        for (int g = -10; g <= 40; ++g) grid.push_back(g);

    struct Job {
        std::size_t point;
        Scheme scheme;
        bool analytic;
        NetworkConfig cfg;
        JobRows rows;
        json stats;
    };
    std::vector<Job> jobs;
    std::vector<std::string> errs;
    for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
        for (Scheme sc : sweep.schemes) {
            const NetworkConfig cfg = resolve_point(base, sweep.parameter, sweep.grid[i], sc);
            for (const auto& e : validate(cfg))
                errs.push_back(std::string(to_string(sweep.parameter)) + "=" + fmt(sweep.grid[i]) + ": " + e);
            if (sweep.analytic && sc != Scheme::IAFPC) jobs.push_back({i, sc, true, cfg, {}, {}});
            if (sweep.montecarlo) jobs.push_back({i, sc, false, cfg, {}, {}});
        }
    }
    if (!errs.empty()) throw ConfigError(std::move(errs));

    // Monte Carlo jobs first so the long ones start early.
    std::vector<std::size_t> order(jobs.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_partition(order.begin(), order.end(), [&](std::size_t k) { return !jobs[k].analytic; });

    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t n = next++; n < order.size() && !failed; n = next++) {
            Job& job = jobs[order[n]];
            try {
                if (job.analytic) {
                    job.rows = analytic_rows(job.cfg, sweep, grid, amc);
                } else {
                    auto r = mc_rows(job.cfg, sweep, grid, amc, opts.seed, opts.drops);
                    job.rows = std::move(r.rows);
                    job.stats = std::move(r.stats);
                }
            } catch (...) {
                if (!failed.exchange(true)) err = std::current_exception();
            }
        }
    };
    unsigned workers = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(jobs.size(), 1)));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);

    // Single writer, in (point, scheme, engine) order.
    std::error_code ec;
    std::filesystem::create_directories(opts.out_dir, ec);
    if (ec) throw IoError("cannot create " + opts.out_dir.string() + ": " + ec.message());
    for (const auto& file : kMetricFiles) {
        std::string text = "sweep_value,scheme,engine,metric,value,ci_low,ci_high\n";
        for (const auto& job : jobs) {
            const auto it = job.rows.find(file);
            if (it == job.rows.end()) continue;
            for (const auto& r : it->second) {
                text += fmt(sweep.grid[job.point]) + "," + std::string(to_string(job.scheme)) + "," +
                        (job.analytic ? "analytic" : "montecarlo") + "," + r.metric + "," + fmt(r.value) + "," +
                        fmt(r.lo) + "," + fmt(r.hi) + "\n";
            }
        }
        write_file(opts.out_dir / (file + ".csv"), text);
    }

    std::string points = "sweep_value,scheme,regime\n";
    json manifest;
    manifest["version"] = kVersion;
    manifest["seed"] = opts.seed;
    manifest["drops"] = opts.drops;
    manifest["base_config"] = json::parse(config_to_json(base));
    manifest["sweep"] = json::parse(read_file(opts.sweep_path));
    manifest["amc_table"] = opts.amc_path ? opts.amc_path->string() : "default";
    manifest["metric_files"] = json::array();
    for (const auto& f : kMetricFiles) manifest["metric_files"].push_back(f + ".csv");
    manifest["points"] = json::array();
    for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
        for (Scheme sc : sweep.schemes) {
            const NetworkConfig cfg = resolve_point(base, sweep.parameter, sweep.grid[i], sc);
            const auto regime = std::string(to_string(classify_regime(cfg)));
            points += fmt(sweep.grid[i]) + "," + std::string(to_string(sc)) + "," + regime + "\n";
            json p = {{"sweep_value", sweep.grid[i]},
                      {"scheme", std::string(to_string(sc))},
                      {"regime", regime},
                      {"config", json::parse(config_to_json(cfg))}};
            for (const auto& job : jobs)
                if (job.point == i && job.scheme == sc && !job.analytic) p["montecarlo"] = job.stats;
            if (sc == Scheme::IAFPC && sweep.analytic) p["analytic"] = "not available for IAFPC";
            manifest["points"].push_back(std::move(p));
        }
    }
    write_file(opts.out_dir / "points.csv", points);
    write_file(opts.out_dir / "manifest.json", manifest.dump(2) + "\n");
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

double parse_double(const std::string& s) {
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    return std::stod(s);
}

}  // namespace

void report(const std::filesystem::path& out_dir, std::ostream& os) {
    const json manifest = [&] {
        try {
            return json::parse(read_file(out_dir / "manifest.json"));
        } catch (const json::parse_error& e) {
            throw IoError("manifest.json is not valid JSON: " + std::string(e.what()));
        }
    }();
    os << "sweep parameter: " << manifest.at("sweep").at("parameter").get<std::string>() << "\n";
    os << "seed: " << manifest.at("seed").get<std::uint64_t>() << "  drops: " << manifest.at("drops").get<std::size_t>()
       << "\n\n";

    os << std::left << std::setw(20) << "metric" << std::setw(8) << "scheme" << std::setw(16) << "max_rel_dev"
       << "max_abs_dev\n";
    for (const auto& f : manifest.at("metric_files")) {
        const auto name = f.get<std::string>();
        std::ifstream in(out_dir / name);
        if (!in) throw IoError("missing " + (out_dir / name).string());
        std::string line;
        std::getline(in, line);
        if (line != "sweep_value,scheme,engine,metric,value,ci_low,ci_high")
            throw IoError(name + ": unexpected header");
        // (scheme) -> (sweep_value, metric) -> {analytic, mc}
        std::map<std::string, std::map<std::pair<std::string, std::string>, std::pair<double, double>>> cells;
        std::map<std::string, std::pair<bool, bool>> seen;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto c = split_csv(line);
            if (c.size() != 7) throw IoError(name + ": malformed row '" + line + "'");
            auto& cell = cells[c[1]][{c[0], c[3]}];
            auto& s = seen[c[1]];
            const double v = parse_double(c[4]);
            if (c[2] == "analytic") {
                cell.first = v;
                s.first = true;
            } else {
                cell.second = v;
                s.second = true;
            }
        }
        for (const auto& [scheme, m] : cells) {
            double rel = 0.0, absd = 0.0;
            bool any = false;
            for (const auto& [key, v] : m) {
                (void)key;
                if (!seen[scheme].first || !seen[scheme].second) break;
                const double d = std::abs(v.second - v.first);
                absd = std::max(absd, d);
                rel = std::max(rel, v.first != 0.0 ? d / std::abs(v.first) : (d == 0.0 ? 0.0 : kInf));
                any = true;
            }
            const std::string metric = name.substr(0, name.size() - 4);
            os << std::setw(20) << metric << std::setw(8) << scheme;
            if (any) {
                os << std::setw(16) << fmt(rel).substr(0, 10) << fmt(absd).substr(0, 10) << "\n";
            } else {
                os << std::setw(16) << "n/a" << "n/a\n";
            }
        }
    }

    os << "\n" << std::setw(14) << "sweep_value" << std::setw(8) << "scheme" << "regime\n";
    for (const auto& p : manifest.at("points")) {
        os << std::setw(14) << fmt(p.at("sweep_value").get<double>()) << std::setw(8)
           << p.at("scheme").get<std::string>() << p.at("regime").get<std::string>() << "\n";
    }
}

}  // namespace iamnet::cli
