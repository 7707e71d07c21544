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

// Scatterer model: short scatterers form a homogeneous PPP over the lens where both
// visibility circles overlap; tall scatterers form the same kind of process but
// are switched on or off for the whole snapshot by a Bernoulli(gamma) variable.

#include "dualvr/geometry.hpp"
#include "dualvr/rng.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace dualvr {

using geometry::Point;

enum class ScattererKind { Short, Tall };

std::string_view to_string(ScattererKind kind);

/// Visibility radii toward BS (v1) and MS (v2) in meters; density in m^-2.
struct ScattererClass {
    ScattererKind kind = ScattererKind::Short;
    double v1 = 0.0;
    double v2 = 0.0;
    double density = 0.0;

    /// The lens in which active scatterers of this class live for separation `d_prime`.
    geometry::LensSpec lens(double d_prime) const { return {d_prime, v1, v2}; }
};

struct Scenario {
    double d_prime = 0.0;
    ScattererClass short_class{ScattererKind::Short};
    ScattererClass tall_class{ScattererKind::Tall};
    double gamma = 0.0;
    std::uint64_t seed = 0;

    const ScattererClass& of(ScattererKind kind) const {
        return kind == ScattererKind::Short ? short_class : tall_class;
    }
};

/// Throws std::invalid_argument naming the first broken invariant.
void validate(const Scenario& scenario);

/// Raised when a statistic requires a class whose lens has zero area.
class DegenerateScenarioError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

struct Realization {
    bool u = false;
    std::vector<Point> short_points;
    std::vector<Point> tall_points;

    std::size_t size() const { return short_points.size() + tall_points.size(); }
};

/// density * lens area; for the tall class this is the mean given U = 1.
double mean_active_count(const Scenario& scenario, ScattererKind kind);

/// Samples realizations of one scenario. Lens samplers and Poisson means are
/// prepared once; each call consumes only the RNG it is given.
class RealizationSampler {
  public:
    explicit RealizationSampler(const Scenario& scenario);

    Realization operator()(Rng& rng) const;

    const Scenario& scenario() const { return scenario_; }
    double mean_short() const { return mean_short_; }
    double mean_tall() const { return mean_tall_; }

  private:
    Scenario scenario_;
    double mean_short_;
    double mean_tall_;
    std::optional<geometry::LensSampler> short_sampler_;  // empty when the lens has zero area
    std::optional<geometry::LensSampler> tall_sampler_;
};

Realization sample_realization(const Scenario& scenario, Rng& rng);

}  // namespace dualvr
