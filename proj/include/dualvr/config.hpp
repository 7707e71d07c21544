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

// JSON run configuration. Lengths may be given in km or m and densities as a
// mantissa with a power-of-ten scale so published parameter tables can be
// transcribed verbatim; everything is normalized to SI on load.

#include "dualvr/analytics.hpp"
#include "dualvr/pointprocess.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dualvr {

/// Invalid or unreadable configuration; `field()` is the dotted path of the
/// offending entry (empty for whole-document problems).
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field, const std::string& message);
    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::size_t realizations = 100000;       // pmf, toa-sweep (per grid point), validate
    std::size_t power_realizations = 10000;  // per d' point
    std::size_t moment_samples = 100000;     // per class, per d' point
    std::uint64_t angle_mpc_samples = 1000000;
    std::vector<double> sweep_d_prime_m;
    std::vector<double> sweep_gamma;
};

struct RunConfig {
    Scenario scenario;
    std::vector<InteractionModel> interactions;
    ExperimentConfig experiment;
    /// Compact, key-sorted JSON of the source document; input to config_hash().
    std::string canonical_json;

    /// FNV-1a 64 of canonical_json.
    std::uint64_t config_hash() const;
};

RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Generalized typical urban parameter set in the transcription format.
std::string gtu_config_json();
RunConfig gtu_config();

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace dualvr
