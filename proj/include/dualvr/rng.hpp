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

#include <cstdint>
#include <random>

namespace dualvr {

using Rng = std::mt19937_64;

// Independent substream tags. Every Monte Carlo consumer draws from its own tag so
// that adding a consumer never shifts the numbers another one sees.
namespace stream {
inline constexpr std::uint64_t realization = 0x7265616c;  // "real"
inline constexpr std::uint64_t moments = 0x6d6f6d73;      // "moms"
inline constexpr std::uint64_t sweep = 0x73776570;        // "swep"
inline constexpr std::uint64_t validation = 0x76616c69;   // "vali"
}  // namespace stream

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for substream `index` of stream `tag` under the root `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) noexcept;

inline Rng make_rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    return Rng(derive_seed(seed, tag, index));
}

}  // namespace dualvr
