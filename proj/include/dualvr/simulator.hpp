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

#pragma once

// Monte Carlo engine: samples realizations, traces one single-bounce path per
// active scatterer, and aggregates the empirical statistics that the closed
// forms in analytics.hpp predict.

#include "dualvr/analytics.hpp"
#include "dualvr/pointprocess.hpp"
#include "dualvr/stats.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace dualvr {

struct MpcRecord {
    ScattererKind kind = ScattererKind::Short;
    double x = 0.0;    // BS-scatterer distance, m
    double y = 0.0;    // scatterer-MS distance, m
    double tau = 0.0;  // path length x + y, m
    double aod = 0.0;  // rad, (-pi, pi]
    double aoa = 0.0;  // rad, (-pi, pi]
    double r_coeff = 0.0;
};

class DegenerateAngleError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Wraps any finite angle into (-pi, pi].
double wrap_angle(double angle);

struct Angles {
    double aod = 0.0;
    double aoa = 0.0;
};

/// Departure angle at the BS (origin) and arrival angle at the MS (d', 0), both
/// measured from the global +x axis.
Angles compute_angles(Point p, double d_prime);

/// One record per active scatterer (short first), coefficients left at zero.
std::vector<MpcRecord> trace_geometry(const Realization& realization, double d_prime);

/// Draws one coefficient per record (stored in r_coeff) and returns the coherent
/// received power k0 |sum R exp(-j theta) / g2|^2 in watts.
double coherent_power(std::span<MpcRecord> records, const InteractionModel& model, Rng& rng);

struct TracedRealization {
    std::vector<MpcRecord> mpcs;
    double power_w = 0.0;
};

TracedRealization trace_realization(const Realization& realization, const Scenario& scenario,
                                    const InteractionModel& model, Rng& rng);

/// 64 uniform bins over (-pi, pi]; bin j covers (-pi + j w, -pi + (j + 1) w].
class AngleHistogram {
  public:
    static constexpr std::size_t kBins = 64;

    static std::size_t bin_of(double angle);
    static double bin_lower(std::size_t j);
    static double bin_width();

    void add(double angle) {
        ++counts_[bin_of(angle)];
        ++total_;
    }
    void merge(const AngleHistogram& o);

    std::uint64_t count(std::size_t j) const { return counts_[j]; }
    std::uint64_t total() const { return total_; }
    /// Empirical density (1/rad) of bin j.
    double density(std::size_t j) const;

  private:
    std::array<std::uint64_t, kBins> counts_{};
    std::uint64_t total_ = 0;
};

struct RunSummary {
    std::uint64_t n_realizations = 0;
    std::uint64_t n_mpcs = 0;
    std::map<std::size_t, std::uint64_t> mpc_count_histogram;
    /// ToA (s) of one uniformly chosen MPC per non-empty realization.
    stats::SampleStats toa_uniform;
    /// Mean ToA (s) over all MPCs of each non-empty realization; same expectation
    /// as toa_uniform with lower variance.
    stats::SampleStats toa_all_mpc;
    /// Per-realization coherent power (W), one entry per interaction model.
    std::vector<stats::SampleStats> power_w;
    AngleHistogram aod;
    AngleHistogram aoa;

    void merge(const RunSummary& other);
    double empirical_pmf(std::size_t n) const;
    std::size_t max_count() const;
};

/// Runs realizations [0, n_realizations) of `scenario`. Realizations are grouped
/// in fixed blocks with their own RNG substreams and merged in block order, so the
/// summary is identical for every worker count.
RunSummary run_experiment(const Scenario& scenario, std::span<const InteractionModel> interactions,
                          std::size_t n_realizations, std::uint64_t seed, unsigned workers = 1);

/// Keeps adding realizations in rounds of whole blocks until at least `min_mpcs`
/// MPCs have been seen.
RunSummary run_until_mpcs(const Scenario& scenario, std::span<const InteractionModel> interactions,
                          std::uint64_t min_mpcs, std::uint64_t seed, unsigned workers = 1);

struct DistanceSamples {
    std::vector<double> x;
    std::vector<double> y;
};

/// BS and MS distances of the first `n` MPCs of class `kind` in realization order.
DistanceSamples collect_distances(const Scenario& scenario, ScattererKind kind, std::size_t n, std::uint64_t seed);

}  // namespace dualvr
