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

#include "dualvr/commands.hpp"

#include "dualvr/analytics.hpp"
#include "dualvr/geometry.hpp"
#include "dualvr/rng.hpp"
#include "dualvr/simulator.hpp"
#include "dualvr/stats.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace dualvr {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t effective_seed(const RunConfig& c, const CommandOptions& o) { return o.seed.value_or(c.experiment.seed); }

void write_metadata(std::ostream& out, std::string_view command, const RunConfig& config, std::uint64_t seed,
                    std::initializer_list<std::pair<std::string_view, std::string>> extra) {
    out << "# dualvr " << DUALVR_VERSION << "\n";
    out << "# command: " << command << "\n";
    out << "# config_fnv1a64: " << hex64(config.config_hash()) << "\n";
    out << "# seed: " << seed << "\n";
    for (const auto& [key, value] : extra) out << "# " << key << ": " << value << "\n";
}

template <class... T>
void write_row(std::ostream& out, const T&... fields) {
    bool first = true;
    auto one = [&](const auto& f) {
        if (!first) out << ',';
        first = false;
        if constexpr (std::is_floating_point_v<std::decay_t<decltype(f)>>)
            out << format_number(f);
        else
            out << f;
    };
    (one(fields), ...);
    out << '\n';
}

Scenario with_point(Scenario s, double d_prime, double gamma) {
    s.d_prime = d_prime;
    s.gamma = gamma;
    return s;
}

bool has_paths(const Scenario& s) {
    return mean_active_count(s, ScattererKind::Short) > 0.0 ||
           (s.gamma > 0.0 && mean_active_count(s, ScattererKind::Tall) > 0.0);
}

std::size_t pmf_cap(const Scenario& s) {
    const double total = mean_active_count(s, ScattererKind::Short) + mean_active_count(s, ScattererKind::Tall);
    return static_cast<std::size_t>(std::ceil(total + 10.0 * std::sqrt(total)));
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// ------------------------------------------------------------------- pmf

void write_pmf_csv(const RunConfig& config, const CommandOptions& options, std::ostream& out) {
    const std::uint64_t seed = effective_seed(config, options);
    const std::size_t n = options.realizations.value_or(config.experiment.realizations);
    const Scenario& s = config.scenario;
    const RunSummary summary = run_experiment(s, {}, n, seed, options.workers);

    write_metadata(out, "pmf", config, seed, {{"realizations", std::to_string(n)}});
    out << "n,analytic_pmf,empirical_pmf,stderr\n";
    const std::size_t last = std::max(pmf_cap(s), summary.max_count());
    const double dn = static_cast<double>(summary.n_realizations);
    for (std::size_t k = 0; k <= last; ++k) {
        const double p = summary.empirical_pmf(k);
        write_row(out, k, mpc_pmf(static_cast<unsigned>(k), s), p, std::sqrt(p * (1.0 - p) / dn));
    }
}

// ------------------------------------------------------------- toa sweep

void write_toa_sweep_csv(const RunConfig& config, const CommandOptions& options, std::ostream& out) {
    const std::uint64_t seed = effective_seed(config, options);
    const std::size_t n = options.realizations.value_or(config.experiment.realizations);
    const auto& d_list = config.experiment.sweep_d_prime_m;
    const auto& g_list = config.experiment.sweep_gamma;
    if (d_list.empty() || g_list.empty()) throw ConfigError("experiment.sweep", "sweep lists must be non-empty");

    write_metadata(out, "toa-sweep", config, seed, {{"realizations_per_point", std::to_string(n)}});
    out << "d_prime_m,gamma,analytic_mean_toa_us,empirical_mean_toa_us,stderr_us\n";
    for (std::size_t i = 0; i < d_list.size(); ++i) {
        for (std::size_t j = 0; j < g_list.size(); ++j) {
            const Scenario s = with_point(config.scenario, d_list[i], g_list[j]);
            double analytic = kNaN;
            double empirical = kNaN;
            double stderr_us = kNaN;
            if (has_paths(s)) {
                analytic = mean_toa(s) * 1e6;
                const RunSummary summary =
                    run_experiment(s, {}, n, derive_seed(seed, stream::sweep, i * g_list.size() + j), options.workers);
                if (summary.toa_uniform.count > 0) {
                    empirical = summary.toa_uniform.mean() * 1e6;
                    stderr_us = summary.toa_uniform.std_error() * 1e6;
                }
            }
            write_row(out, d_list[i], g_list[j], analytic, empirical, stderr_us);
        }
    }
}

// ----------------------------------------------------------------- power

void write_power_csv(const RunConfig& config, const CommandOptions& options, std::ostream& out) {
    if (config.interactions.empty()) throw ConfigError("interactions", "the power command needs at least one interaction model");
    const std::uint64_t seed = effective_seed(config, options);
    const std::size_t n = options.realizations.value_or(config.experiment.power_realizations);
    const std::size_t n_mc = config.experiment.moment_samples;
    const auto& d_list = config.experiment.sweep_d_prime_m;

    write_metadata(out, "power", config, seed,
                   {{"realizations_per_point", std::to_string(n)}, {"moment_samples", std::to_string(n_mc)}});
    out << "d_prime_m,mode,theorem1_mean_W,theorem1_stderr,eq7_mc_mean_W,eq7_mc_stderr\n";
    for (std::size_t i = 0; i < d_list.size(); ++i) {
        const Scenario s = with_point(config.scenario, d_list[i], config.scenario.gamma);
        const RunSummary summary =
            run_experiment(s, config.interactions, n, derive_seed(seed, stream::sweep, i), options.workers);
        for (std::size_t m = 0; m < config.interactions.size(); ++m) {
            const InteractionModel& model = config.interactions[m];
            Estimate assembled;
            if (has_paths(s))
                assembled = mean_received_power(s, model, n_mc, derive_seed(seed, stream::moments, i * 64 + m),
                                              options.workers);
            write_row(out, d_list[i], to_string(model.mode), assembled.value, assembled.std_error,
                      summary.power_w[m].mean(), summary.power_w[m].std_error());
        }
    }
}

// ---------------------------------------------------------------- angles

void write_angles_csv(const RunConfig& config, const CommandOptions& options, std::ostream& out) {
    const std::uint64_t seed = effective_seed(config, options);
    const Scenario& s = config.scenario;
    if (!has_paths(s)) throw ConfigError("scenario", "no scatterer class can produce a multipath component");
    const RunSummary summary = options.realizations
                                   ? run_experiment(s, {}, *options.realizations, seed, options.workers)
                                   : run_until_mpcs(s, {}, config.experiment.angle_mpc_samples, seed, options.workers);

    write_metadata(out, "angles", config, seed,
                   {{"realizations", std::to_string(summary.n_realizations)},
                    {"mpc_samples", std::to_string(summary.n_mpcs)}});
    out << "bin_lower_rad,bin_upper_rad,aod_density,aoa_density\n";
    for (std::size_t j = 0; j < AngleHistogram::kBins; ++j)
        write_row(out, AngleHistogram::bin_lower(j), AngleHistogram::bin_lower(j + 1),
                  summary.aod.density(j), summary.aoa.density(j));
}

// -------------------------------------------------------------- validate

bool ValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

namespace {

std::string describe(std::initializer_list<std::pair<std::string_view, double>> values) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : values) {
        os << (first ? "" : " ") << k << "=" << format_number(v);
        first = false;
    }
    return os.str();
}

void check_geometry(const Scenario& s, ValidationReport& report) {
    bool ok = true;
    double worst = 0.0;
    for (const ScattererClass* c : {&s.short_class, &s.tall_class}) {
        const double a = c->v1;
        const double b = c->v2;
        const double full = std::numbers::pi * std::min(a, b) * std::min(a, b);
        const double gap = std::abs(a - b);
        if (gap > 0.0) {
            const double near = geometry::lens_area({gap * (1.0 + 1e-12), a, b});
            worst = std::max(worst, std::abs(near - full) / full);
        }
        const double outer = geometry::lens_area({(a + b) * (1.0 - 1e-12), a, b});
        worst = std::max(worst, outer / full);
        ok = ok && geometry::lens_area({s.d_prime, a, b}) == geometry::lens_area({s.d_prime, b, a});
    }
    ok = ok && worst < 1e-6;
    report.checks.push_back({"geometry.continuity_symmetry", ok, describe({{"max_rel_jump", worst}})});
}

void check_no_path(const RunConfig& config, const CommandOptions& options, ValidationReport& report) {
    const Scenario& s = config.scenario;
    report.checks.push_back({"no_path.pmf_point_mass", mpc_pmf(0, s) == 1.0, describe({{"pmf0", mpc_pmf(0, s)}})});
    const RunSummary summary = run_experiment(s, {}, 1000, config.experiment.seed, options.workers);
    report.checks.push_back({"no_path.empty_realizations", summary.n_mpcs == 0,
                             describe({{"mpcs", static_cast<double>(summary.n_mpcs)}})});
    bool toa_raises = false;
    try {
        mean_toa(s);
    } catch (const NoPathError&) {
        toa_raises = true;
    }
    report.checks.push_back({"no_path.mean_toa_reports_no_path", toa_raises, ""});
    for (const InteractionModel& m : config.interactions) {
        bool raises = false;
        try {
            mean_received_power(s, m, kMinMomentSamples, config.experiment.seed);
        } catch (const NoPathError&) {
            raises = true;
        }
        report.checks.push_back({"no_path.power_reports_no_path." + std::string(to_string(m.mode)), raises, ""});
    }
}

}  // namespace

ValidationReport run_validation(const RunConfig& config, const CommandOptions& options) {
    ValidationReport report;
    const Scenario& s = config.scenario;
    const std::uint64_t seed = effective_seed(config, options);
    const std::size_t n = options.realizations.value_or(config.experiment.realizations);

    check_geometry(s, report);
    if (!has_paths(s)) {
        report.no_path = true;
        check_no_path(config, options, report);
        return report;
    }

    // Count law.
    {
        double mass = 0.0;
        const std::size_t cap = pmf_cap(s);
        for (std::size_t k = 0; k <= cap; ++k) mass += mpc_pmf(static_cast<unsigned>(k), s);
        report.checks.push_back({"pmf.normalization", mass > 1.0 - 1e-10, describe({{"mass", mass}})});

        const RunSummary summary = run_experiment(s, {}, n, derive_seed(seed, stream::validation, 0), options.workers);
        std::vector<double> analytic, empirical;
        for (std::size_t k = 0; k <= std::max(cap, summary.max_count()); ++k) {
            analytic.push_back(mpc_pmf(static_cast<unsigned>(k), s));
            empirical.push_back(summary.empirical_pmf(k));
        }
        const double tv = stats::total_variation(analytic, empirical);
        const double limit = 0.01 * std::sqrt(std::max(1.0, 1e5 / static_cast<double>(n)));
        report.checks.push_back({"pmf.empirical_total_variation", tv < limit, describe({{"tv", tv}, {"limit", limit}})});

        if (summary.toa_uniform.count > 1) {
            const double analytic_toa = mean_toa(s);
            const double se = summary.toa_uniform.std_error();
            const double z = std::abs(summary.toa_uniform.mean() - analytic_toa) / se;
            report.checks.push_back({"toa.analytic_vs_empirical", z < 4.0,
                                     describe({{"analytic_us", analytic_toa * 1e6},
                                               {"empirical_us", summary.toa_uniform.mean() * 1e6},
                                               {"z", z}})});
        }
    }

    // Distance marginals.
    const std::size_t n_ks = std::min<std::size_t>(n, 100000);
    for (ScattererKind kind : {ScattererKind::Short, ScattererKind::Tall}) {
        const std::string name(to_string(kind));
        const bool produces = mean_active_count(s, kind) > 0.0 && (kind == ScattererKind::Short || s.gamma > 0.0);
        if (!produces) {
            report.checks.push_back({"ks." + name, true, "skipped: class produces no MPCs"});
            continue;
        }
        const DistanceSamples d =
            collect_distances(s, kind, n_ks, derive_seed(seed, stream::validation, 1 + static_cast<int>(kind)));
        const auto ks_x = stats::ks_test(d.x, [&](double x) { return distance_cdf_bs(x, s, kind); });
        const auto ks_y = stats::ks_test(d.y, [&](double y) { return distance_cdf_ms(y, s, kind); });
        report.checks.push_back({"ks." + name + ".bs_distance", ks_x.p_value > 0.01,
                                 describe({{"D", ks_x.statistic}, {"p", ks_x.p_value}})});
        report.checks.push_back({"ks." + name + ".ms_distance", ks_y.p_value > 0.01,
                                 describe({{"D", ks_y.statistic}, {"p", ks_y.p_value}})});
        if (s.d_prime > 0.0) {
            const double mass = joint_pdf_total_mass(s, kind);
            report.checks.push_back(
                {"joint_pdf." + name + ".mass", std::abs(mass - 1.0) < 1e-3, describe({{"mass", mass}})});
        }
    }

    // Dual power estimators.
    if (!config.interactions.empty()) {
        const RunSummary summary = run_experiment(s, config.interactions, config.experiment.power_realizations,
                                                  derive_seed(seed, stream::validation, 10), options.workers);
        for (std::size_t m = 0; m < config.interactions.size(); ++m) {
            const InteractionModel& model = config.interactions[m];
            const Estimate assembled = mean_received_power(s, model, config.experiment.moment_samples,
                                                         derive_seed(seed, stream::validation, 20 + m), options.workers);
            const double mc = summary.power_w[m].mean();
            const double se = std::hypot(assembled.std_error, summary.power_w[m].std_error());
            const double z = se > 0.0 ? std::abs(assembled.value - mc) / se : (assembled.value == mc ? 0.0 : INFINITY);
            report.checks.push_back({"power." + std::string(to_string(model.mode)) + ".dual_estimator", z <= 3.0,
                                     describe({{"moment_W", assembled.value}, {"simulated_W", mc}, {"z", z}})});
        }
    }
    return report;
}

void write_validation_report(const RunConfig& config, const CommandOptions& options, const ValidationReport& report,
                             std::ostream& out) {
    write_metadata(out, "validate", config, effective_seed(config, options), {});
    if (report.no_path) out << "# no-path condition: no scatterer class can produce a multipath component\n";
    out << "check,status,detail\n";
    for (const auto& c : report.checks) out << c.name << ',' << (c.passed ? "PASS" : "FAIL") << ',' << c.detail << '\n';
    out << "# result: " << (report.all_passed() ? "PASS" : "FAIL") << "\n";
}

}  // namespace dualvr
