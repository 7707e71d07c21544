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

#include "dualvr/simulator.hpp"

#include "dualvr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dualvr {
namespace {

constexpr double kPi = std::numbers::pi;

double draw_coefficient(const InteractionModel& m, Rng& rng) {
    if (m.coeff_var == 0.0) return m.coeff_mean;
    return std::normal_distribution<double>(m.coeff_mean, std::sqrt(m.coeff_var))(rng);
}

void append_records(std::vector<MpcRecord>& out, const std::vector<Point>& points, ScattererKind kind, double d_prime) {
    for (const Point& p : points) {
        MpcRecord r;
        r.kind = kind;
        r.x = std::hypot(p.x, p.y);
        r.y = std::hypot(p.x - d_prime, p.y);
        r.tau = r.x + r.y;
        const Angles angles = compute_angles(p, d_prime);
        r.aod = angles.aod;
        r.aoa = angles.aoa;
        out.push_back(r);
    }
}

// Realizations [first, last) of block `block`; `first` must be the block start.
RunSummary run_block(const RealizationSampler& sampler, std::span<const InteractionModel> interactions,
                     std::size_t block, std::size_t last, std::uint64_t seed) {
    const double d_prime = sampler.scenario().d_prime;
    Rng rng = make_rng(seed, stream::realization, block);
    RunSummary out;
    out.power_w.resize(interactions.size());
    const std::size_t first = block * kBlockSize;
    for (std::size_t i = first; i < last; ++i) {
        const Realization realization = sampler(rng);
        std::vector<MpcRecord> records = trace_geometry(realization, d_prime);
        for (std::size_t m = 0; m < interactions.size(); ++m)
            out.power_w[m].add(coherent_power(records, interactions[m], rng));

        ++out.n_realizations;
        ++out.mpc_count_histogram[records.size()];
        out.n_mpcs += records.size();
        if (records.empty()) continue;

        double tau_sum = 0.0;
        for (const MpcRecord& r : records) {
            tau_sum += r.tau;
            out.aod.add(r.aod);
            out.aoa.add(r.aoa);
        }
        out.toa_all_mpc.add(tau_sum / static_cast<double>(records.size()) / kSpeedOfLight);
        std::uniform_int_distribution<std::size_t> pick(0, records.size() - 1);
        out.toa_uniform.add(records[pick(rng)].tau / kSpeedOfLight);
    }
    return out;
}

RunSummary run_block_range(const RealizationSampler& sampler, std::span<const InteractionModel> interactions,
                           std::size_t first_block, std::size_t n_blocks, std::size_t realization_end,
                           std::uint64_t seed, unsigned workers) {
    auto parts = map_blocks<RunSummary>(n_blocks, workers, [&](std::size_t k) {
        const std::size_t block = first_block + k;
        const std::size_t last = std::min(realization_end, (block + 1) * kBlockSize);
        return run_block(sampler, interactions, block, last, seed);
    });
    RunSummary total;
    total.power_w.resize(interactions.size());
    for (const RunSummary& p : parts) total.merge(p);
    return total;
}

}  // namespace

double wrap_angle(double angle) {
    if (!std::isfinite(angle)) throw std::invalid_argument("wrap_angle: angle must be finite");
    double w = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

Angles compute_angles(Point p, double d_prime) {
    if (p.x == 0.0 && p.y == 0.0) throw DegenerateAngleError("scatterer coincides with the BS");
    if (p.x == d_prime && p.y == 0.0) throw DegenerateAngleError("scatterer coincides with the MS");
    return {wrap_angle(std::atan2(p.y, p.x)), wrap_angle(std::atan2(p.y, p.x - d_prime))};
}

std::vector<MpcRecord> trace_geometry(const Realization& realization, double d_prime) {
    std::vector<MpcRecord> out;
    out.reserve(realization.size());
    append_records(out, realization.short_points, ScattererKind::Short, d_prime);
    append_records(out, realization.tall_points, ScattererKind::Tall, d_prime);
    return out;
}

double coherent_power(std::span<MpcRecord> records, const InteractionModel& model, Rng& rng) {
    double re = 0.0;
    double im = 0.0;
    for (MpcRecord& r : records) {
        r.r_coeff = draw_coefficient(model, rng);
        const double theta = model.phase(r.x, r.y);
        const double amplitude = r.r_coeff / model.amplitude_divisor(r.x, r.y);
        re += amplitude * std::cos(theta);
        im -= amplitude * std::sin(theta);
    }
    return model.k0() * (re * re + im * im);
}

TracedRealization trace_realization(const Realization& realization, const Scenario& scenario,
                                    const InteractionModel& model, Rng& rng) {
    validate(model);
    TracedRealization out;
    out.mpcs = trace_geometry(realization, scenario.d_prime);
    out.power_w = coherent_power(out.mpcs, model, rng);
    return out;
}

// ------------------------------------------------------------ histograms

std::size_t AngleHistogram::bin_of(double angle) {
    const double pos = std::ceil((angle + kPi) * static_cast<double>(kBins) / (2.0 * kPi));
    return static_cast<std::size_t>(std::clamp(pos - 1.0, 0.0, static_cast<double>(kBins - 1)));
}

double AngleHistogram::bin_width() { return 2.0 * kPi / static_cast<double>(kBins); }

double AngleHistogram::bin_lower(std::size_t j) {
    return (static_cast<double>(j) - static_cast<double>(kBins) / 2.0) * bin_width();
}

void AngleHistogram::merge(const AngleHistogram& o) {
    for (std::size_t j = 0; j < kBins; ++j) counts_[j] += o.counts_[j];
    total_ += o.total_;
}

double AngleHistogram::density(std::size_t j) const {
    if (total_ == 0) return 0.0;
    return static_cast<double>(counts_[j]) / (static_cast<double>(total_) * bin_width());
}

// ------------------------------------------------------------ run summary

void RunSummary::merge(const RunSummary& o) {
    n_realizations += o.n_realizations;
    n_mpcs += o.n_mpcs;
    for (const auto& [n, c] : o.mpc_count_histogram) mpc_count_histogram[n] += c;
    toa_uniform.merge(o.toa_uniform);
    toa_all_mpc.merge(o.toa_all_mpc);
    if (power_w.size() < o.power_w.size()) power_w.resize(o.power_w.size());
    for (std::size_t m = 0; m < o.power_w.size(); ++m) power_w[m].merge(o.power_w[m]);
    aod.merge(o.aod);
    aoa.merge(o.aoa);
}

double RunSummary::empirical_pmf(std::size_t n) const {
    if (n_realizations == 0) return 0.0;
    const auto it = mpc_count_histogram.find(n);
    return it == mpc_count_histogram.end() ? 0.0
                                           : static_cast<double>(it->second) / static_cast<double>(n_realizations);
}

std::size_t RunSummary::max_count() const {
    return mpc_count_histogram.empty() ? 0 : mpc_count_histogram.rbegin()->first;
}

RunSummary run_experiment(const Scenario& scenario, std::span<const InteractionModel> interactions,
                          std::size_t n_realizations, std::uint64_t seed, unsigned workers) {
    if (n_realizations == 0) throw std::invalid_argument("run_experiment: need at least one realization");
    for (const auto& m : interactions) validate(m);
    const RealizationSampler sampler(scenario);
    const std::size_t n_blocks = (n_realizations + kBlockSize - 1) / kBlockSize;
    return run_block_range(sampler, interactions, 0, n_blocks, n_realizations, seed, workers);
}

RunSummary run_until_mpcs(const Scenario& scenario, std::span<const InteractionModel> interactions,
                          std::uint64_t min_mpcs, std::uint64_t seed, unsigned workers) {
    for (const auto& m : interactions) validate(m);
    const RealizationSampler sampler(scenario);
    if (min_mpcs > 0 && !(sampler.mean_short() > 0.0 || (sampler.mean_tall() > 0.0 && scenario.gamma > 0.0)))
        throw NoPathError("run_until_mpcs: scenario cannot produce multipath components");
    constexpr std::size_t kRoundBlocks = 16;
    RunSummary total;
    total.power_w.resize(interactions.size());
    std::size_t next_block = 0;
    while (total.n_mpcs < min_mpcs || total.n_realizations == 0) {
        const std::size_t end = (next_block + kRoundBlocks) * kBlockSize;
        total.merge(run_block_range(sampler, interactions, next_block, kRoundBlocks, end, seed, workers));
        next_block += kRoundBlocks;
    }
    return total;
}

DistanceSamples collect_distances(const Scenario& scenario, ScattererKind kind, std::size_t n, std::uint64_t seed) {
    const RealizationSampler sampler(scenario);
    const bool possible = kind == ScattererKind::Short
                              ? sampler.mean_short() > 0.0
                              : sampler.mean_tall() > 0.0 && scenario.gamma > 0.0;
    if (n > 0 && !possible)
        throw DegenerateScenarioError(std::string(to_string(kind)) + " class never produces multipath components");
    DistanceSamples out;
    out.x.reserve(n);
    out.y.reserve(n);
    for (std::size_t block = 0; out.x.size() < n; ++block) {
        Rng rng = make_rng(seed, stream::realization, block);
        for (std::size_t i = 0; i < kBlockSize && out.x.size() < n; ++i) {
            const Realization realization = sampler(rng);
            const auto& points = kind == ScattererKind::Short ? realization.short_points : realization.tall_points;
            for (const Point& p : points) {
                if (out.x.size() == n) break;
                out.x.push_back(std::hypot(p.x, p.y));
                out.y.push_back(std::hypot(p.x - scenario.d_prime, p.y));
            }
        }
    }
    return out;
}

}  // namespace dualvr
