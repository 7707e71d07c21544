// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "dualvr/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

namespace dualvr {
namespace {

using nlohmann::json;

std::string join(const std::string& parent, const std::string& key) { return parent.empty() ? key : parent + "." + key; }

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "must be a JSON object");
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!keys.contains(key)) throw ConfigError(join(path, key), "unknown key");
}

const json& require(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ConfigError(join(path, key), "missing required key");
    return j.at(key);
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    return v;
}

std::uint64_t as_count(const json& j, const std::string& path, std::uint64_t min_value) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
        throw ConfigError(path, "must be a non-negative integer");
    const auto v = j.get<std::uint64_t>();
    if (v < min_value) throw ConfigError(path, "must be at least " + std::to_string(min_value));
    return v;
}

struct Units {
    double length_to_m = 1.0;
    double density_to_per_m2 = 1.0;
};

Units parse_units(const json& root) {
    Units u;
    if (!root.contains("units")) return u;
    const json& j = root.at("units");
    require_object(j, "units");
    reject_unknown(j, "units", {"length", "density"});
    if (j.contains("length")) {
        const std::string v = j.at("length").is_string() ? j.at("length").get<std::string>() : "";
        if (v == "m")
            u.length_to_m = 1.0;
        else if (v == "km")
            u.length_to_m = 1000.0;
        else
            throw ConfigError("units.length", "must be \"m\" or \"km\"");
    }
    if (j.contains("density")) {
        const std::string v = j.at("density").is_string() ? j.at("density").get<std::string>() : "";
        if (v == "m^-2")
            u.density_to_per_m2 = 1.0;
        else if (v == "km^-2")
            u.density_to_per_m2 = 1e-6;
        else
            throw ConfigError("units.density", "must be \"m^-2\" or \"km^-2\"");
    }
    return u;
}

ScattererClass parse_class(const json& j, const std::string& path, ScattererKind kind, const Units& units) {
    require_object(j, path);
    reject_unknown(j, path, {"v1", "v2", "density", "density_scale_exponent"});
    ScattererClass c;
    c.kind = kind;
    c.v1 = as_number(require(j, path, "v1"), join(path, "v1")) * units.length_to_m;
    c.v2 = as_number(require(j, path, "v2"), join(path, "v2")) * units.length_to_m;
    if (!(c.v1 > 0.0)) throw ConfigError(join(path, "v1"), "must be positive");
    if (!(c.v2 > 0.0)) throw ConfigError(join(path, "v2"), "must be positive");
    double exponent = 0.0;
    if (j.contains("density_scale_exponent")) {
        exponent = as_number(j.at("density_scale_exponent"), join(path, "density_scale_exponent"));
        if (exponent != std::round(exponent)) throw ConfigError(join(path, "density_scale_exponent"), "must be an integer");
    }
    const double mantissa = as_number(require(j, path, "density"), join(path, "density"));
    if (mantissa < 0.0) throw ConfigError(join(path, "density"), "must be non-negative");
    c.density = mantissa * std::pow(10.0, exponent) * units.density_to_per_m2;
    return c;
}

InteractionModel parse_interaction(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, path, {"mode", "transmit_power_w", "frequency_hz", "wavelength_m", "coeff_mean", "coeff_var"});
    InteractionModel m;
    const json& mode = require(j, path, "mode");
    if (mode == "reflection")
        m.mode = InteractionMode::Reflection;
    else if (mode == "scattering")
        m.mode = InteractionMode::Scattering;
    else
        throw ConfigError(join(path, "mode"), "must be \"reflection\" or \"scattering\"");

    m.transmit_power_w = as_number(require(j, path, "transmit_power_w"), join(path, "transmit_power_w"));
    if (!(m.transmit_power_w > 0.0)) throw ConfigError(join(path, "transmit_power_w"), "must be positive");

    const bool has_f = j.contains("frequency_hz");
    const bool has_l = j.contains("wavelength_m");
    if (has_f == has_l) throw ConfigError(join(path, "frequency_hz"), "give exactly one of frequency_hz or wavelength_m");
    if (has_f) {
        const double f = as_number(j.at("frequency_hz"), join(path, "frequency_hz"));
        if (!(f > 0.0)) throw ConfigError(join(path, "frequency_hz"), "must be positive");
        m.wavelength_m = kSpeedOfLight / f;
    } else {
        m.wavelength_m = as_number(j.at("wavelength_m"), join(path, "wavelength_m"));
        if (!(m.wavelength_m > 0.0)) throw ConfigError(join(path, "wavelength_m"), "must be positive");
    }
    m.coeff_mean = as_number(require(j, path, "coeff_mean"), join(path, "coeff_mean"));
    m.coeff_var = as_number(require(j, path, "coeff_var"), join(path, "coeff_var"));
    if (m.coeff_var < 0.0) throw ConfigError(join(path, "coeff_var"), "must be non-negative");
    return m;
}

std::vector<double> parse_list(const json& j, const std::string& path, double scale) {
    if (!j.is_array() || j.empty()) throw ConfigError(path, "must be a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]") * scale);
    return out;
}

ExperimentConfig parse_experiment(const json& root, const Units& units) {
    ExperimentConfig e;
    e.sweep_d_prime_m = {100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
    e.sweep_gamma = {0.0, 0.22, 0.5, 1.0};
    if (!root.contains("experiment")) return e;
    const std::string path = "experiment";
    const json& j = root.at(path);
    require_object(j, path);
    reject_unknown(j, path,
                   {"seed", "realizations", "power_realizations", "moment_samples", "angle_mpc_samples", "sweep"});
    if (j.contains("seed")) e.seed = as_count(j.at("seed"), "experiment.seed", 0);
    if (j.contains("realizations")) e.realizations = as_count(j.at("realizations"), "experiment.realizations", 1);
    if (j.contains("power_realizations"))
        e.power_realizations = as_count(j.at("power_realizations"), "experiment.power_realizations", 1);
    if (j.contains("moment_samples"))
        e.moment_samples = as_count(j.at("moment_samples"), "experiment.moment_samples", kMinMomentSamples);
    if (j.contains("angle_mpc_samples"))
        e.angle_mpc_samples = as_count(j.at("angle_mpc_samples"), "experiment.angle_mpc_samples", 1);
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        require_object(s, "experiment.sweep");
        reject_unknown(s, "experiment.sweep", {"d_prime", "gamma"});
        if (s.contains("d_prime")) {
            e.sweep_d_prime_m = parse_list(s.at("d_prime"), "experiment.sweep.d_prime", units.length_to_m);
            for (std::size_t i = 0; i < e.sweep_d_prime_m.size(); ++i)
                if (e.sweep_d_prime_m[i] < 0.0)
                    throw ConfigError("experiment.sweep.d_prime[" + std::to_string(i) + "]", "must be non-negative");
        }
        if (s.contains("gamma")) {
            e.sweep_gamma = parse_list(s.at("gamma"), "experiment.sweep.gamma", 1.0);
            for (std::size_t i = 0; i < e.sweep_gamma.size(); ++i)
                if (e.sweep_gamma[i] < 0.0 || e.sweep_gamma[i] > 1.0)
                    throw ConfigError("experiment.sweep.gamma[" + std::to_string(i) + "]", "must lie in [0, 1]");
        }
    }
    return e;
}

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error(field.empty() ? message : "config field '" + field + "': " + message), field_(std::move(field)) {}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t RunConfig::config_hash() const { return fnv1a64(canonical_json); }

RunConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    require_object(root, "");
    reject_unknown(root, "", {"units", "scenario", "interactions", "experiment"});
    const Units units = parse_units(root);

    RunConfig cfg;
    const json& sc = require(root, "", "scenario");
    require_object(sc, "scenario");
    reject_unknown(sc, "scenario", {"d_prime", "gamma", "short", "tall"});
    cfg.scenario.d_prime = as_number(require(sc, "scenario", "d_prime"), "scenario.d_prime") * units.length_to_m;
    if (cfg.scenario.d_prime < 0.0) throw ConfigError("scenario.d_prime", "must be non-negative");
    cfg.scenario.gamma = as_number(require(sc, "scenario", "gamma"), "scenario.gamma");
    if (cfg.scenario.gamma < 0.0 || cfg.scenario.gamma > 1.0) throw ConfigError("scenario.gamma", "must lie in [0, 1]");
    cfg.scenario.short_class = parse_class(require(sc, "scenario", "short"), "scenario.short", ScattererKind::Short, units);
    cfg.scenario.tall_class = parse_class(require(sc, "scenario", "tall"), "scenario.tall", ScattererKind::Tall, units);

    if (root.contains("interactions")) {
        const json& list = root.at("interactions");
        if (!list.is_array()) throw ConfigError("interactions", "must be an array");
        for (std::size_t i = 0; i < list.size(); ++i)
            cfg.interactions.push_back(parse_interaction(list[i], "interactions[" + std::to_string(i) + "]"));
    }
    cfg.experiment = parse_experiment(root, units);
    cfg.scenario.seed = cfg.experiment.seed;

    validate(cfg.scenario);
    for (const auto& m : cfg.interactions) validate(m);
    cfg.canonical_json = root.dump();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string gtu_config_json() {
    return R"({
  "units": {"length": "km", "density": "m^-2"},
  "scenario": {
    "d_prime": 0.2,
    "gamma": 0.22,
    "short": {"v1": 0.5, "v2": 0.3, "density": 7.07, "density_scale_exponent": -5},
    "tall": {"v1": 4.1, "v2": 4.0, "density": 4.2, "density_scale_exponent": -7}
  },
  "interactions": [
    {"mode": "reflection", "transmit_power_w": 10, "frequency_hz": 2e9, "coeff_mean": -1.17, "coeff_var": 0.4},
    {"mode": "scattering", "transmit_power_w": 10, "frequency_hz": 2e9, "coeff_mean": 4, "coeff_var": 2}
  ],
  "experiment": {
    "seed": 1,
    "realizations": 100000,
    "power_realizations": 10000,
    "moment_samples": 100000,
    "angle_mpc_samples": 1000000,
    "sweep": {
      "d_prime": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
      "gamma": [0, 0.22, 0.5, 1]
    }
  }
}
)";
}

RunConfig gtu_config() { return parse_config(gtu_config_json()); }

}  // namespace dualvr
