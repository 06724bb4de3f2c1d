#include "iamnet/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace iamnet {

using nlohmann::json;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::IAM: return "IAM";
        case Scheme::IUM: return "IUM";
        case Scheme::IAFPC: return "IAFPC";
        case Scheme::IUFPC: return "IUFPC";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name) {
    for (Scheme s : {Scheme::IAM, Scheme::IUM, Scheme::IAFPC, Scheme::IUFPC}) {
        if (to_string(s) == name) return s;
    }
    throw ConfigError({"unknown scheme '" + std::string(name) + "'"});
}

std::string_view to_string(RegimeLabel r) {
    switch (r) {
        case RegimeLabel::InterferenceUnaware: return "InterferenceUnaware";
        case RegimeLabel::IAAssociationIndependent: return "IAAssociationIndependent";
        case RegimeLabel::IAAssociationDependent: return "IAAssociationDependent";
    }
    return "?";
}

NetworkConfig default_network_config() {
    NetworkConfig cfg;
    cfg.tiers = {TierConfig{2e-6, db_to_linear(9.0)}, TierConfig{4e-6, 1.0}};
    cfg.tau = 2.6;
    cfg.alpha = 3.8;
    cfg.p0 = dbm_to_watts(-70.0);
    cfg.epsilon = 1.0;
    cfg.p_max = kInf;
    cfg.i0 = dbm_to_watts(-90.0);
    cfg.mt_density = 80e-6;
    cfg.bandwidth_hz = 9e6;
    cfg.noise_psd_dbm_hz = -174.0;
    cfg.noise_figure_db = 9.0;
    cfg.shadow_sigma_db = 4.0;
    cfg.scheme = Scheme::IAM;
    return cfg;
}

double noise_power(const NetworkConfig& cfg) {
    return dbm_to_watts(cfg.noise_psd_dbm_hz + 10.0 * std::log10(cfg.bandwidth_hz) +
                        cfg.noise_figure_db);
}

RegimeLabel classify_regime(const NetworkConfig& cfg) {
    const double r = cfg.tiers[0].assoc_weight / cfg.tiers[1].assoc_weight;
    const double lo = std::min(r, 1.0 / r);
    const double hi = std::max(r, 1.0 / r);
    const double ratio = cfg.p0 / cfg.i0;  // 0 when i0 is infinite
    if (cfg.i0 > cfg.p0 && ratio < lo) return RegimeLabel::InterferenceUnaware;
    if (cfg.i0 < cfg.p0 && ratio > hi) return RegimeLabel::IAAssociationIndependent;
    return RegimeLabel::IAAssociationDependent;
}

std::vector<std::string> validate(const NetworkConfig& cfg) {
    std::vector<std::string> out;
    for (int j = 0; j < 2; ++j) {
        const auto tag = "tier " + std::to_string(j + 1);
        if (!(cfg.tiers[j].density > 0.0) || !std::isfinite(cfg.tiers[j].density))
            out.push_back(tag + " density must be positive");
        if (!(cfg.tiers[j].assoc_weight > 0.0) || !std::isfinite(cfg.tiers[j].assoc_weight))
            out.push_back(tag + " assoc_weight must be positive");
    }
    if (!(cfg.alpha > 2.0) || !std::isfinite(cfg.alpha)) out.push_back("alpha must exceed 2");
    if (!(cfg.tau > 0.0) || !std::isfinite(cfg.tau)) out.push_back("tau must be positive");
    if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0)) out.push_back("epsilon out of [0,1]");
    if (!(cfg.p0 > 0.0) || !std::isfinite(cfg.p0)) out.push_back("p0 must be positive");
    if (!(cfg.p_max > 0.0)) out.push_back("p_max must be positive");
    if (!(cfg.i0 > 0.0)) out.push_back("i0 must be positive");
    if (!(cfg.mt_density > 0.0) || !std::isfinite(cfg.mt_density))
        out.push_back("mt_density must be positive");
    if (!(cfg.bandwidth_hz > 0.0) || !std::isfinite(cfg.bandwidth_hz))
        out.push_back("bandwidth_hz must be positive");
    if (!std::isfinite(cfg.noise_psd_dbm_hz)) out.push_back("noise_psd_dbm_hz must be finite");
    if (!std::isfinite(cfg.noise_figure_db)) out.push_back("noise_figure_db must be finite");
    if (!(cfg.shadow_sigma_db >= 0.0) || !std::isfinite(cfg.shadow_sigma_db))
        out.push_back("shadow_sigma_db must be non-negative");
    return out;
}

double shadow_density_factor(double sigma_db, double alpha) {
    const double s = (2.0 / alpha) * sigma_db * std::log(10.0) / 10.0;
    return std::exp(0.5 * s * s);
}

NetworkConfig analytic_view(const NetworkConfig& cfg) {
    NetworkConfig a = cfg;
    const double f = shadow_density_factor(cfg.shadow_sigma_db, cfg.alpha);
    for (auto& t : a.tiers) t.density *= f;
    switch (cfg.scheme) {
        case Scheme::IAM: break;
        case Scheme::IUM: a.i0 = kInf; break;
        case Scheme::IUFPC:
            a.i0 = kInf;
            a.p_max = kInf;
            break;
        case Scheme::IAFPC:
            throw std::invalid_argument("IAFPC has no analytic model; use the simulator");
    }
    return a;
}

AmcTable default_amc_table() {
    static constexpr double gamma_db[15] = {-3.65, -1.60, 0.00,  2.25,  3.75,  4.75,  9.00, 10.50,
                                            12.35, 15.40, 17.18, 18.85, 20.70, 24.0,  25.0};
    static constexpr double se[15] = {0.15, 0.23, 0.38, 0.60, 0.88, 1.18, 1.48, 1.91,
                                      2.41, 2.73, 3.32, 3.90, 4.52, 5.11, 5.55};
    AmcTable t;
    for (int i = 0; i < 15; ++i) t.rows.push_back({i + 1, db_to_linear(gamma_db[i]), se[i]});
    return t;
}

std::vector<std::string> validate(const AmcTable& table) {
    std::vector<std::string> out;
    if (table.rows.empty()) out.push_back("AMC table is empty");
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        if (!(r.gamma > 0.0)) out.push_back("row " + std::to_string(i + 1) + ": threshold must be positive");
        if (!(r.se > 0.0)) out.push_back("row " + std::to_string(i + 1) + ": se must be positive");
        if (i > 0) {
            if (!(r.gamma > table.rows[i - 1].gamma))
                out.push_back("row " + std::to_string(i + 1) + ": thresholds not strictly increasing");
            if (!(r.se > table.rows[i - 1].se))
                out.push_back("row " + std::to_string(i + 1) + ": se not strictly increasing");
        }
    }
    return out;
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
          std::string msg = "invalid config:";
          for (const auto& p : problems) msg += " " + p + ";";
          return msg;
      }()),
      problems_(std::move(problems)) {}

namespace {

// dBm values that may be "inf" (string) or null for the infinite sentinel.
double read_dbm(const json& j, const char* key, double fallback_watts, std::vector<std::string>& errs) {
    if (!j.contains(key)) return fallback_watts;
    const auto& v = j.at(key);
    if (v.is_null()) return kInf;
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "infinity" || s == "+inf") return kInf;
        errs.push_back(std::string(key) + ": expected number or \"inf\"");
        return fallback_watts;
    }
    if (!v.is_number()) {
        errs.push_back(std::string(key) + ": expected number");
        return fallback_watts;
    }
    return dbm_to_watts(v.get<double>());
}

double read_num(const json& j, const char* key, double fallback, std::vector<std::string>& errs) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) {
        errs.push_back(std::string(key) + ": expected number");
        return fallback;
    }
    return j.at(key).get<double>();
}

json dbm_value(double watts) {
    if (std::isinf(watts)) return "inf";
    return watts_to_dbm(watts);
}

}  // namespace

NetworkConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("parse error: ") + e.what()});
    }
    if (!j.is_object()) throw ConfigError({"top level must be an object"});

    static const char* known[] = {"tiers",        "tau",           "alpha",          "p0_dbm",
                                  "epsilon",      "p_max_dbm",     "i0_dbm",         "mt_density",
                                  "bandwidth_hz", "noise_psd_dbm_hz", "noise_figure_db",
                                  "shadow_sigma_db", "scheme"};
    std::vector<std::string> errs;
    for (const auto& [k, _] : j.items()) {
        bool ok = false;
        for (const char* n : known) ok = ok || k == n;
        if (!ok) errs.push_back("unknown key '" + k + "'");
    }

    NetworkConfig cfg = default_network_config();
    if (j.contains("tiers")) {
        const auto& t = j.at("tiers");
        if (!t.is_array() || t.size() != 2) {
            errs.push_back("tiers: expected an array of two objects");
        } else {
            for (int k = 0; k < 2; ++k) {
                const auto& tj = t.at(k);
                if (!tj.is_object()) {
                    errs.push_back("tiers[" + std::to_string(k) + "]: expected object");
                    continue;
                }
                cfg.tiers[k].density = read_num(tj, "density", cfg.tiers[k].density, errs);
                if (tj.contains("assoc_weight_db"))
                    cfg.tiers[k].assoc_weight =
                        db_to_linear(read_num(tj, "assoc_weight_db", 0.0, errs));
            }
        }
    }
    cfg.tau = read_num(j, "tau", cfg.tau, errs);
    cfg.alpha = read_num(j, "alpha", cfg.alpha, errs);
    cfg.p0 = read_dbm(j, "p0_dbm", cfg.p0, errs);
    cfg.epsilon = read_num(j, "epsilon", cfg.epsilon, errs);
    cfg.p_max = read_dbm(j, "p_max_dbm", cfg.p_max, errs);
    cfg.i0 = read_dbm(j, "i0_dbm", cfg.i0, errs);
    cfg.mt_density = read_num(j, "mt_density", cfg.mt_density, errs);
    cfg.bandwidth_hz = read_num(j, "bandwidth_hz", cfg.bandwidth_hz, errs);
    cfg.noise_psd_dbm_hz = read_num(j, "noise_psd_dbm_hz", cfg.noise_psd_dbm_hz, errs);
    cfg.noise_figure_db = read_num(j, "noise_figure_db", cfg.noise_figure_db, errs);
    cfg.shadow_sigma_db = read_num(j, "shadow_sigma_db", cfg.shadow_sigma_db, errs);
    if (j.contains("scheme")) {
        if (!j.at("scheme").is_string()) {
            errs.push_back("scheme: expected string");
        } else {
            try {
                cfg.scheme = parse_scheme(j.at("scheme").get<std::string>());
            } catch (const ConfigError& e) {
                errs.insert(errs.end(), e.problems().begin(), e.problems().end());
            }
        }
    }
    for (auto& e : validate(cfg)) errs.push_back(std::move(e));
    if (!errs.empty()) throw ConfigError(std::move(errs));
    return cfg;
}

NetworkConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file " + path.string()});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const NetworkConfig& cfg) {
    json j;
    j["tiers"] = json::array();
    for (const auto& t : cfg.tiers)
        j["tiers"].push_back({{"density", t.density}, {"assoc_weight_db", linear_to_db(t.assoc_weight)}});
    j["tau"] = cfg.tau;
    j["alpha"] = cfg.alpha;
    j["p0_dbm"] = dbm_value(cfg.p0);
    j["epsilon"] = cfg.epsilon;
    j["p_max_dbm"] = dbm_value(cfg.p_max);
    j["i0_dbm"] = dbm_value(cfg.i0);
    j["mt_density"] = cfg.mt_density;
    j["bandwidth_hz"] = cfg.bandwidth_hz;
    j["noise_psd_dbm_hz"] = cfg.noise_psd_dbm_hz;
    j["noise_figure_db"] = cfg.noise_figure_db;
    j["shadow_sigma_db"] = cfg.shadow_sigma_db;
    j["scheme"] = std::string(to_string(cfg.scheme));
    return j.dump(2);
}

}  // namespace iamnet
