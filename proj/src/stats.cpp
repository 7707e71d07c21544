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

#include "dualvr/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace dualvr::stats {

double SampleStats::mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }

double SampleStats::variance() const {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    const double m = sum / n;
    return std::max(0.0, (sum_sq - n * m * m) / (n - 1.0));
}

double SampleStats::std_error() const {
    if (count < 2) return 0.0;
    return std::sqrt(variance() / static_cast<double>(count));
}

double kolmogorov_survival(double t) {
    if (t <= 0.0) return 1.0;
    if (t < 1.0) {
        // P[K <= t] = sqrt(2 pi) / t * sum_k exp(-(2k-1)^2 pi^2 / (8 t^2))
        const double pi = std::numbers::pi;
        double cdf = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double m = 2.0 * k - 1.0;
            const double term = std::exp(-m * m * pi * pi / (8.0 * t * t));
            cdf += term;
            if (term < 1e-300) break;
        }
        return std::clamp(1.0 - std::sqrt(2.0 * pi) / t * cdf, 0.0, 1.0);
    }
    double total = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * t * t);
        total += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * total, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_test: no samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    const double sqrt_n = std::sqrt(n);
    // Stephens' small-sample correction of the asymptotic law.
    return {d, kolmogorov_survival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)};
}

ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed, std::span<const double> expected_prob) {
    if (observed.size() != expected_prob.size() || observed.size() < 2)
        throw std::invalid_argument("chi_square_test: need matching observed/expected vectors of length >= 2");
    const double n = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
    const double mass = std::accumulate(expected_prob.begin(), expected_prob.end(), 0.0);
    if (!(n > 0.0) || !(mass > 0.0)) throw std::invalid_argument("chi_square_test: empty sample or zero expected mass");
    ChiSquareResult r;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = n * expected_prob[i] / mass;
        if (!(e > 0.0)) throw std::invalid_argument("chi_square_test: expected count must be positive in every cell");
        const double diff = static_cast<double>(observed[i]) - e;
        r.statistic += diff * diff / e;
    }
    r.dof = observed.size() - 1;
    boost::math::chi_squared dist(static_cast<double>(r.dof));
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
    return r;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    const std::size_t n = std::max(p.size(), q.size());
    double l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = i < p.size() ? p[i] : 0.0;
        const double b = i < q.size() ? q[i] : 0.0;
        l1 += std::abs(a - b);
    }
    return 0.5 * l1;
}

}  // namespace dualvr::stats
