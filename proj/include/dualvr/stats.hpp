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

// Goodness-of-fit helpers used by the validation command and the test suites.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace dualvr::stats {

/// Mergeable mean / standard-error accumulator.
struct SampleStats {
    std::uint64_t count = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double v) {
        ++count;
        sum += v;
        sum_sq += v * v;
    }
    void merge(const SampleStats& o) {
        count += o.count;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    double mean() const;
    double variance() const;  // unbiased
    double std_error() const;
};

/// Kolmogorov survival function P[K > t] of the limiting KS distribution.
double kolmogorov_survival(double t);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// One-sample KS test of `samples` against a continuous CDF. Sorts a copy.
KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf);

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
};

/// Pearson chi-square goodness of fit. `expected_prob` need not sum to one when
/// cells are restricted; it is renormalized.
ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed, std::span<const double> expected_prob);

/// Half the L1 distance between two probability vectors (shorter one zero-padded).
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace dualvr::stats
