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

// dualvr: command-line front end for the dual visibility region channel model.
//
//   dualvr pmf        --config gtu.json --out pmf.csv
//   dualvr toa-sweep  --config gtu.json --out toa.csv
//   dualvr power      --config gtu.json --out power.csv
//   dualvr angles     --config gtu.json --out angles.csv
//   dualvr validate   --config gtu.json
//
// Exit codes: 0 success, 1 validation failure, 2 configuration or I/O error.

#include "dualvr/commands.hpp"
#include "dualvr/config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;

// Renders fully in memory first so a failed run never leaves a partial file.
int emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        std::cerr << "error: cannot write output file '" << out_path << "'\n";
        return kExitConfig;
    }
    out << text;
    out.flush();
    if (!out) {
        std::cerr << "error: failed writing output file '" << out_path << "'\n";
        return kExitConfig;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual visibility region channel model: closed-form statistics and Monte Carlo experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", DUALVR_VERSION);

    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    std::size_t realizations = 0;
    unsigned workers = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_path, "Output file (stdout when omitted)");
        sub->add_option("--seed", seed, "Override the configured RNG seed");
        sub->add_option("--realizations", realizations, "Override the realization count of this command")
            ->check(CLI::PositiveNumber);
        sub->add_option("--workers", workers, "Worker threads (0: one per hardware thread)");
    };

    auto* pmf = app.add_subcommand("pmf", "MPC count PMF, analytic and empirical");
    auto* toa = app.add_subcommand("toa-sweep", "Mean ToA over the (d', gamma) sweep grid");
    auto* power = app.add_subcommand("power", "Mean NLoS received power over the d' sweep");
    auto* angles = app.add_subcommand("angles", "Empirical AoD / AoA densities");
    auto* validate = app.add_subcommand("validate", "Run the invariant suite and report pass/fail");
    for (auto* sub : {pmf, toa, power, angles, validate}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    dualvr::CommandOptions options;
    options.workers = workers;
    for (auto* sub : {pmf, toa, power, angles, validate}) {
        if (!sub->parsed()) continue;
        if (sub->count("--seed") > 0) options.seed = seed;
        if (sub->count("--realizations") > 0) options.realizations = realizations;
    }

    try {
        const dualvr::RunConfig config = dualvr::load_config(config_path);
        std::ostringstream text;
        if (pmf->parsed()) {
            dualvr::write_pmf_csv(config, options, text);
        } else if (toa->parsed()) {
            dualvr::write_toa_sweep_csv(config, options, text);
        } else if (power->parsed()) {
            dualvr::write_power_csv(config, options, text);
        } else if (angles->parsed()) {
            dualvr::write_angles_csv(config, options, text);
        } else {
            const dualvr::ValidationReport report = dualvr::run_validation(config, options);
            dualvr::write_validation_report(config, options, report, text);
            if (const int rc = emit(text.str(), out_path); rc != 0) return rc;
            if (!report.all_passed()) {
                for (const auto& c : report.checks)
                    if (!c.passed) std::cerr << "FAIL " << c.name << ": " << c.detail << "\n";
                return kExitValidation;
            }
            return 0;
        }
        return emit(text.str(), out_path);
    } catch (const dualvr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
