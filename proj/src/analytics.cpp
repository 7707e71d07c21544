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

#include "dualvr/analytics.hpp"

#include "dualvr/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace dualvr {
namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double kQuadTolerance = 1e-9;
constexpr unsigned kQuadDepth = 20;

// Integrates f over [lo, hi] with adaptive Gauss-Kronrod, splitting at every
// breakpoint strictly inside.
template <class F>
double integrate_piecewise(F&& f, double lo, double hi, std::vector<double> breaks,
                           double tolerance = kQuadTolerance) {
    if (!(hi > lo)) return 0.0;
    breaks.push_back(lo);
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    double total = 0.0;
    double prev = lo;
    for (double b : breaks) {
        if (b <= prev || b > hi) continue;
        total += gauss_kronrod<double, 31>::integrate(f, prev, b, kQuadDepth, tolerance);
        prev = b;
    }
    return total;
}

double class_lens_area(const Scenario& s, ScattererKind kind) {
    validate(s);
    const double area = geometry::lens_area(s.of(kind).lens(s.d_prime));
    if (area <= 0.0)
        throw DegenerateScenarioError(std::string(to_string(kind)) + " class has no active region at this separation");
    return area;
}

// Distance CDF of a scatterer uniform in the lens of radii (own, other), where
// `own` is the radius of the circle centered at the point the distance is taken
// from.
double lens_distance_cdf(double r, double d_prime, double own, double other, double total_area) {
    const double r_min = std::max(d_prime - other, 0.0);
    const double r_max = std::min(d_prime + other, own);
    if (r <= r_min) return 0.0;
    if (r >= r_max) return 1.0;
    return std::clamp(geometry::lens_area({d_prime, r, other}) / total_area, 0.0, 1.0);
}

double lens_mean_distance(double d_prime, double own, double other, double total_area) {
    const double r_min = std::max(d_prime - other, 0.0);
    const double r_max = std::min(d_prime + other, own);
    auto survival = [&](double r) { return 1.0 - lens_distance_cdf(r, d_prime, own, other, total_area); };
    return r_min + integrate_piecewise(survival, r_min, r_max, {other - d_prime, other + d_prime, d_prime - other});
}

double path_length_mean(const Scenario& s, ScattererKind kind) {
    return mean_distance_bs(s, kind) + mean_distance_ms(s, kind);
}

double draw_coefficient(const InteractionModel& m, Rng& rng) {
    if (m.coeff_var == 0.0) return m.coeff_mean;
    return std::normal_distribution<double>(m.coeff_mean, std::sqrt(m.coeff_var))(rng);
}

double sample_variance(double sum, double sum_sq, std::size_t n) {
    if (n < 2) return 0.0;
    const double mean = sum / static_cast<double>(n);
    return std::max(0.0, (sum_sq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1));
}

double sample_covariance(double sx, double sy, double sxy, std::size_t n) {
    if (n < 2) return 0.0;
    const double dn = static_cast<double>(n);
    return (sxy - sx * sy / dn) / (dn - 1.0);
}

}  // namespace

// ---------------------------------------------------------------- MPC count

double poisson_pmf(unsigned n, double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("poisson_pmf: mean must be finite and >= 0");
    if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
    const double dn = static_cast<double>(n);
    return std::exp(dn * std::log(mean) - mean - std::lgamma(dn + 1.0));
}

double mpc_pmf(unsigned n, const Scenario& s) {
    validate(s);
    const double mu_s = mean_active_count(s, ScattererKind::Short);
    const double mu_t = mean_active_count(s, ScattererKind::Tall);
    return s.gamma * poisson_pmf(n, mu_s + mu_t) + (1.0 - s.gamma) * poisson_pmf(n, mu_s);
}

double mpc_mean(const Scenario& s) {
    validate(s);
    return mean_active_count(s, ScattererKind::Short) + s.gamma * mean_active_count(s, ScattererKind::Tall);
}

// ----------------------------------------------------------- distance laws

double distance_cdf_bs(double x, const Scenario& s, ScattererKind kind) {
    const double area = class_lens_area(s, kind);
    const ScattererClass& c = s.of(kind);
    return lens_distance_cdf(x, s.d_prime, c.v1, c.v2, area);
}

double distance_cdf_ms(double y, const Scenario& s, ScattererKind kind) {
    const double area = class_lens_area(s, kind);
    const ScattererClass& c = s.of(kind);
    return lens_distance_cdf(y, s.d_prime, c.v2, c.v1, area);
}

double mean_distance_bs(const Scenario& s, ScattererKind kind) {
    const double area = class_lens_area(s, kind);
    const ScattererClass& c = s.of(kind);
    return lens_mean_distance(s.d_prime, c.v1, c.v2, area);
}

double mean_distance_ms(const Scenario& s, ScattererKind kind) {
    const double area = class_lens_area(s, kind);
    const ScattererClass& c = s.of(kind);
    return lens_mean_distance(s.d_prime, c.v2, c.v1, area);
}

// ---------------------------------------------------------- time of arrival

double mean_toa(const Scenario& s) {
    validate(s);
    const double mu_s = mean_active_count(s, ScattererKind::Short);
    const double mu_t = mean_active_count(s, ScattererKind::Tall);
    const double len_s = mu_s > 0.0 ? path_length_mean(s, ScattererKind::Short) : 0.0;
    const double len_t = mu_t > 0.0 ? path_length_mean(s, ScattererKind::Tall) : 0.0;

    // P[U = u, N >= 1]
    const double w1 = s.gamma * -std::expm1(-(mu_s + mu_t));
    const double w0 = (1.0 - s.gamma) * -std::expm1(-mu_s);
    if (!(w1 + w0 > 0.0)) throw NoPathError("no scatterer class can produce a multipath component");

    const double given_u1 = mu_s + mu_t > 0.0 ? (mu_s * len_s + mu_t * len_t) / (mu_s + mu_t) : 0.0;
    const double given_u0 = len_s;
    return (w1 * given_u1 + w0 * given_u0) / (w1 + w0) / kSpeedOfLight;
}

double mean_toa_unconditioned(const Scenario& s) {
    validate(s);
    const double mu_s = mean_active_count(s, ScattererKind::Short);
    const double mu_t = mean_active_count(s, ScattererKind::Tall);
    if (!(mu_s > 0.0)) throw DegenerateScenarioError("mean_toa_unconditioned requires a non-degenerate short class");
    const double len_s = path_length_mean(s, ScattererKind::Short);
    const double len_t = mu_t > 0.0 ? path_length_mean(s, ScattererKind::Tall) : 0.0;
    const double given_u1 = (mu_s * len_s + mu_t * len_t) / (mu_s + mu_t);
    return (s.gamma * given_u1 + (1.0 - s.gamma) * len_s) / kSpeedOfLight;
}

// ------------------------------------------------------- joint distance law

double joint_support_y_max(double x, const Scenario& s, ScattererKind kind) {
    const ScattererClass& c = s.of(kind);
    const double d = s.d_prime;
    if (c.v1 - c.v2 >= d) return c.v2;
    if (c.v2 - c.v1 >= d) return std::min(d + x, d + c.v1);
    if (c.v1 < d && c.v2 < d) return c.v2;
    return std::min(d + x, c.v2);
}

double joint_pdf(double x, double y, const Scenario& s, ScattererKind kind) {
    const double area = class_lens_area(s, kind);
    const double d = s.d_prime;
    if (d <= 0.0) throw std::domain_error("joint_pdf: the joint distance law is singular at zero separation");
    const ScattererClass& c = s.of(kind);
    const double x_min = std::max(d - c.v2, 0.0);
    const double x_max = std::min(d + c.v2, c.v1);
    if (!(x > x_min && x < x_max)) return 0.0;
    const double y_min = std::max(d - x, 0.0);
    const double y_max = joint_support_y_max(x, s, kind);
    if (!(y > y_min && y < y_max)) return 0.0;
    try {
        return geometry::density_kernel(d, x, y) / area;
    } catch (const std::domain_error&) {
        return 0.0;
    }
}

double joint_pdf_marginal_x(double x, const Scenario& s, ScattererKind kind) {
    class_lens_area(s, kind);
    const double d = s.d_prime;
    if (d <= 0.0) throw std::domain_error("joint_pdf: the joint distance law is singular at zero separation");
    const double lo_full = std::abs(x - d);
    const double hi_full = x + d;
    const double lo = std::max({std::max(d - x, 0.0), lo_full});
    const double hi = std::min(joint_support_y_max(x, s, kind), hi_full);
    if (!(hi > lo) || !(x > 0.0)) return 0.0;

    // With y^2 = p + (q - p) sin^2(phi) the kernel times dy/dphi is exactly 4x.
    const double p = lo_full * lo_full;
    const double span = hi_full * hi_full - p;
    auto to_phi = [&](double y) { return std::asin(std::sqrt(std::clamp((y * y - p) / span, 0.0, 1.0))); };
    return 4.0 * x * (to_phi(hi) - to_phi(lo)) / class_lens_area(s, kind);
}

double joint_pdf_total_mass(const Scenario& s, ScattererKind kind) {
    class_lens_area(s, kind);
    const ScattererClass& c = s.of(kind);
    const double d = s.d_prime;
    const double x_min = std::max(d - c.v2, 0.0);
    const double x_max = std::min(d + c.v2, c.v1);
    auto marginal = [&](double x) { return joint_pdf_marginal_x(x, s, kind); };
    return integrate_piecewise(marginal, x_min, x_max,
                               {d, std::abs(c.v2 - d), c.v2 + d, c.v1 - d, std::abs(c.v1 - c.v2)}, 1e-8);
}

// ------------------------------------------------------------ received power

std::string_view to_string(InteractionMode mode) {
    return mode == InteractionMode::Reflection ? "reflection" : "scattering";
}

double InteractionModel::k0() const {
    const double four_pi = 4.0 * std::numbers::pi;
    if (mode == InteractionMode::Reflection) {
        const double r = wavelength_m / four_pi;
        return transmit_power_w * r * r;
    }
    return transmit_power_w * wavelength_m * wavelength_m / (four_pi * four_pi * four_pi);
}

double InteractionModel::phase(double x, double y) const {
    return 2.0 * std::numbers::pi * phase_length(x, y) / wavelength_m;
}

void validate(const InteractionModel& m) {
    if (!std::isfinite(m.transmit_power_w) || m.transmit_power_w <= 0.0)
        throw std::invalid_argument("transmit power must be finite and positive");
    if (!std::isfinite(m.wavelength_m) || m.wavelength_m <= 0.0)
        throw std::invalid_argument("wavelength must be finite and positive");
    if (!std::isfinite(m.coeff_mean)) throw std::invalid_argument("coefficient mean must be finite");
    if (!std::isfinite(m.coeff_var) || m.coeff_var < 0.0)
        throw std::invalid_argument("coefficient variance must be finite and non-negative");
}

void MomentAccumulator::add(double a, double b) {
    const double q = a * a + b * b;
    ++n;
    sa += a;
    sb += b;
    sq += q;
    saa += a * a;
    sbb += b * b;
    sqq += q * q;
    sab += a * b;
    saq += a * q;
    sbq += b * q;
    sa4 += a * a * a * a;
    sb4 += b * b * b * b;
}

void MomentAccumulator::merge(const MomentAccumulator& o) {
    n += o.n;
    sa += o.sa;
    sb += o.sb;
    sq += o.sq;
    saa += o.saa;
    sbb += o.sbb;
    sqq += o.sqq;
    sab += o.sab;
    saq += o.saq;
    sbq += o.sbq;
    sa4 += o.sa4;
    sb4 += o.sb4;
}

MomentTerms summarize(const MomentAccumulator& acc, InteractionMode mode) {
    MomentTerms t;
    t.mode = mode;
    t.samples = acc.n;
    if (acc.n == 0) return t;
    const double dn = static_cast<double>(acc.n);
    t.h = acc.sa / dn;
    t.h_prime = acc.sb / dn;
    t.g = sample_variance(acc.sa, acc.saa, acc.n);
    t.g_prime = sample_variance(acc.sb, acc.sbb, acc.n);
    t.h_se = std::sqrt(t.g / dn);
    t.h_prime_se = std::sqrt(t.g_prime / dn);
    // Var of the squared deviation, dropping the O(h) corrections.
    t.g_se = std::sqrt(sample_variance(acc.saa, acc.sa4, acc.n) / dn);
    t.g_prime_se = std::sqrt(sample_variance(acc.sbb, acc.sb4, acc.n) / dn);
    return t;
}

MomentAccumulator accumulate_moments(const Scenario& s, ScattererKind kind, const InteractionModel& model,
                                     std::size_t n_mc, std::uint64_t seed, unsigned workers) {
    validate(model);
    class_lens_area(s, kind);
    const geometry::LensSampler sampler(s.of(kind).lens(s.d_prime));
    const std::uint64_t tag = stream::moments + static_cast<std::uint64_t>(kind);
    const std::size_t n_blocks = (n_mc + kBlockSize - 1) / kBlockSize;

    auto block = [&](std::size_t b) {
        Rng rng = make_rng(seed, tag, b);
        MomentAccumulator acc;
        const std::size_t end = std::min(n_mc, (b + 1) * kBlockSize);
        for (std::size_t i = b * kBlockSize; i < end; ++i) {
            const Point p = sampler(rng);
            const double x = std::hypot(p.x, p.y);
            const double y = std::hypot(p.x - s.d_prime, p.y);
            const double r = draw_coefficient(model, rng);
            const double theta = model.phase(x, y);
            const double g2 = model.amplitude_divisor(x, y);
            acc.add(r * std::cos(theta) / g2, r * std::sin(theta) / g2);
        }
        return acc;
    };
    MomentAccumulator total;
    for (const auto& part : map_blocks<MomentAccumulator>(n_blocks, workers, block)) total.merge(part);
    return total;
}

MomentTerms moment_terms(const Scenario& s, ScattererKind kind, const InteractionModel& model, std::size_t n_mc,
                         std::uint64_t seed, unsigned workers) {
    if (n_mc < kMinMomentSamples) throw std::invalid_argument("moment_terms: need at least 10^4 Monte Carlo samples");
    return summarize(accumulate_moments(s, kind, model, n_mc, seed, workers), model.mode);
}

Estimate assemble_received_power(const Scenario& s, const InteractionModel& model, const MomentAccumulator& short_m,
                                 const MomentAccumulator& tall_m) {
    validate(s);
    validate(model);
    const double mu[2] = {mean_active_count(s, ScattererKind::Short), mean_active_count(s, ScattererKind::Tall)};
    const bool active[2] = {mu[0] > 0.0, mu[1] > 0.0 && s.gamma > 0.0};
    if (!active[0] && !active[1]) throw NoPathError("no scatterer class contributes received power");
    const MomentAccumulator* acc[2] = {&short_m, &tall_m};
    MomentTerms terms[2];
    for (int k = 0; k < 2; ++k) {
        if (!active[k]) continue;
        if (acc[k]->n < 2) throw std::invalid_argument("assemble_received_power: missing moment samples for an active class");
        terms[k] = summarize(*acc[k], model.mode);
    }

    const double gamma = s.gamma;
    double second = 0.0;  // sum_k (g + h^2 + g' + h'^2) mu_k
    double sum_h = 0.0;   // sum_k h_k mu_k
    double sum_hp = 0.0;  // sum_k h'_k mu_k
    for (int k = 0; k < 2; ++k) {
        if (!active[k]) continue;
        const MomentTerms& t = terms[k];
        second += (t.g + t.h * t.h + t.g_prime + t.h_prime * t.h_prime) * mu[k];
        sum_h += t.h * mu[k];
        sum_hp += t.h_prime * mu[k];
    }
    double only_short = 0.0;
    if (active[0]) {
        const MomentTerms& t = terms[0];
        only_short = (t.g + t.h * t.h + t.g_prime + t.h_prime * t.h_prime) * mu[0] + std::pow(t.h * mu[0], 2) +
                     std::pow(t.h_prime * mu[0], 2);
    }
    const double k0 = model.k0();
    Estimate out;
    out.value = gamma * k0 * (second + sum_h * sum_h + sum_hp * sum_hp) + (1.0 - gamma) * k0 * only_short;

    // Delta method on the sample means of (q, a, b) per class.
    double variance = 0.0;
    for (int k = 0; k < 2; ++k) {
        if (!active[k]) continue;
        const bool is_short = k == 0;
        const MomentTerms& t = terms[k];
        const double c_q = k0 * mu[k] * (gamma + (is_short ? 1.0 - gamma : 0.0));
        const double c_a = k0 * 2.0 * mu[k] * (gamma * sum_h + (is_short ? (1.0 - gamma) * mu[0] * t.h : 0.0));
        const double c_b = k0 * 2.0 * mu[k] * (gamma * sum_hp + (is_short ? (1.0 - gamma) * mu[0] * t.h_prime : 0.0));
        const MomentAccumulator& m = *acc[k];
        const double var_q = sample_variance(m.sq, m.sqq, m.n);
        const double var_a = sample_variance(m.sa, m.saa, m.n);
        const double var_b = sample_variance(m.sb, m.sbb, m.n);
        const double cov_qa = sample_covariance(m.sq, m.sa, m.saq, m.n);
        const double cov_qb = sample_covariance(m.sq, m.sb, m.sbq, m.n);
        const double cov_ab = sample_covariance(m.sa, m.sb, m.sab, m.n);
        const double var_psi = c_q * c_q * var_q + c_a * c_a * var_a + c_b * c_b * var_b + 2.0 * c_q * c_a * cov_qa +
                               2.0 * c_q * c_b * cov_qb + 2.0 * c_a * c_b * cov_ab;
        variance += std::max(0.0, var_psi) / static_cast<double>(m.n);
    }
    out.std_error = std::sqrt(variance);
    return out;
}

Estimate mean_received_power(const Scenario& s, const InteractionModel& model, std::size_t n_mc, std::uint64_t seed,
                             unsigned workers) {
    validate(s);
    validate(model);
    if (n_mc < kMinMomentSamples)
        throw std::invalid_argument("mean_received_power: need at least 10^4 Monte Carlo samples");
    MomentAccumulator moments[2];
    const ScattererKind kinds[2] = {ScattererKind::Short, ScattererKind::Tall};
    for (int k = 0; k < 2; ++k) {
        const bool contributes = mean_active_count(s, kinds[k]) > 0.0 && (k == 0 || s.gamma > 0.0);
        if (contributes) moments[k] = accumulate_moments(s, kinds[k], model, n_mc, seed, workers);
    }
    return assemble_received_power(s, model, moments[0], moments[1]);
}

}  // namespace dualvr
