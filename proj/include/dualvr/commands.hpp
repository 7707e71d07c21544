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

// Implementation of the CLI subcommands. Every command writes a CSV document
// (comment metadata lines, header row, data rows) to a stream so it can be
// exercised without touching the filesystem.

#include "dualvr/config.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace dualvr {

struct CommandOptions {
    unsigned workers = 0;  // 0: one per hardware thread
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> realizations;
};

/// Shortest round-trip decimal form of v ("nan" for NaN).
std::string format_number(double v);

void write_pmf_csv(const RunConfig& config, const CommandOptions& options, std::ostream& out);
void write_toa_sweep_csv(const RunConfig& config, const CommandOptions& options, std::ostream& out);
void write_power_csv(const RunConfig& config, const CommandOptions& options, std::ostream& out);
void write_angles_csv(const RunConfig& config, const CommandOptions& options, std::ostream& out);

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    bool no_path = false;
    std::vector<ValidationCheck> checks;

    bool all_passed() const;
};

ValidationReport run_validation(const RunConfig& config, const CommandOptions& options);
void write_validation_report(const RunConfig& config, const CommandOptions& options, const ValidationReport& report,
                             std::ostream& out);

}  // namespace dualvr
