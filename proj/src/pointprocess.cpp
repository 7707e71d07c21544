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

#include "dualvr/pointprocess.hpp"

#include <cmath>
#include <string>

namespace dualvr {

std::string_view to_string(ScattererKind kind) { return kind == ScattererKind::Short ? "short" : "tall"; }

namespace {

void validate_class(const ScattererClass& c, ScattererKind expected) {
    const std::string name(to_string(expected));
    if (c.kind != expected) throw std::invalid_argument(name + " class has the wrong kind");
    if (!std::isfinite(c.v1) || c.v1 <= 0.0) throw std::invalid_argument(name + ".v1 must be finite and positive");
    if (!std::isfinite(c.v2) || c.v2 <= 0.0) throw std::invalid_argument(name + ".v2 must be finite and positive");
    if (!std::isfinite(c.density) || c.density < 0.0)
        throw std::invalid_argument(name + ".density must be finite and non-negative");
}

}  // namespace

void validate(const Scenario& s) {
    if (!std::isfinite(s.d_prime) || s.d_prime < 0.0) throw std::invalid_argument("d_prime must be finite and non-negative");
    if (!(s.gamma >= 0.0 && s.gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
    validate_class(s.short_class, ScattererKind::Short);
    validate_class(s.tall_class, ScattererKind::Tall);
}

double mean_active_count(const Scenario& scenario, ScattererKind kind) {
    const ScattererClass& c = scenario.of(kind);
    if (c.density == 0.0) return 0.0;
    return c.density * geometry::lens_area(c.lens(scenario.d_prime));
}

RealizationSampler::RealizationSampler(const Scenario& scenario)
    : scenario_(scenario),
      mean_short_(0.0),
      mean_tall_(0.0) {
    validate(scenario_);
    mean_short_ = mean_active_count(scenario_, ScattererKind::Short);
    mean_tall_ = mean_active_count(scenario_, ScattererKind::Tall);
    if (mean_short_ > 0.0) short_sampler_.emplace(scenario_.short_class.lens(scenario_.d_prime));
    if (mean_tall_ > 0.0) tall_sampler_.emplace(scenario_.tall_class.lens(scenario_.d_prime));
}

Realization RealizationSampler::operator()(Rng& rng) const {
    Realization out;
    // Draw order is fixed: short count, short positions, U, tall count, tall positions.
    if (short_sampler_) {
        std::poisson_distribution<long> count(mean_short_);
        const long n = count(rng);
        out.short_points.reserve(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) out.short_points.push_back((*short_sampler_)(rng));
    }
    out.u = std::bernoulli_distribution(scenario_.gamma)(rng);
    if (out.u && tall_sampler_) {
        std::poisson_distribution<long> count(mean_tall_);
        const long n = count(rng);
        out.tall_points.reserve(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) out.tall_points.push_back((*tall_sampler_)(rng));
    }
    return out;
}

Realization sample_realization(const Scenario& scenario, Rng& rng) { return RealizationSampler(scenario)(rng); }

}  // namespace dualvr
