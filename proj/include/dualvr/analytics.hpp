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

// Closed-form statistics of the dual visibility region model: MPC count law,
// scatterer distance distributions, mean time of arrival, joint distance density,
// and the mean NLoS received power.

#include "dualvr/pointprocess.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace dualvr {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// No class can produce a multipath component for this scenario.
class NoPathError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// ---------------------------------------------------------------- MPC count

/// Poisson probability mass e^-mean mean^n / n!, evaluated in log space.
double poisson_pmf(unsigned n, double mean);

/// P[N = n] for the total number of MPCs: a two-component Poisson mixture.
double mpc_pmf(unsigned n, const Scenario& scenario);

/// E[N] = mu_short + gamma * mu_tall.
double mpc_mean(const Scenario& scenario);

// ----------------------------------------------------------- distance laws

/// CDF of the BS-scatterer distance of an active scatterer of class `kind`.
double distance_cdf_bs(double x, const Scenario& scenario, ScattererKind kind);
/// CDF of the MS-scatterer distance of an active scatterer of class `kind`.
double distance_cdf_ms(double y, const Scenario& scenario, ScattererKind kind);

/// E[X] by adaptive Gauss-Kronrod quadrature of the survival function, split at
/// the branch points of the lens area (relative tolerance 1e-9).
double mean_distance_bs(const Scenario& scenario, ScattererKind kind);
double mean_distance_ms(const Scenario& scenario, ScattererKind kind);

// ---------------------------------------------------------- time of arrival

/// Mean ToA in seconds of one MPC picked uniformly among the active scatterers of
/// a snapshot that has at least one.
///
/// Inside the U = 1 branch a picked MPC is tall with probability
/// mu_t / (mu_s + mu_t). The two U branches are weighted by
/// P[U = u, N >= 1], which reduces to gamma and 1 - gamma whenever every
/// branch almost surely carries an MPC (e^-mu_s negligible). Throws NoPathError
/// when no branch can produce an MPC.
double mean_toa(const Scenario& scenario);

/// The same expectation with the branch weights fixed at gamma and 1 - gamma,
/// i.e. ignoring snapshots without MPCs. Requires a non-degenerate short class
/// (DegenerateScenarioError otherwise).
double mean_toa_unconditioned(const Scenario& scenario);

// ------------------------------------------------------- joint distance law

/// Upper MS-distance bound of the joint support at BS distance `x`. Four cases on
/// (v1, v2, d'), matched in order:
///   v1 - v2 >= d'                 -> v2
///   v2 - v1 >= d'                 -> min(d' + x, d' + v1)
///   v1 < d' and v2 < d'           -> v2
///   otherwise                     -> min(d' + x, v2)
double joint_support_y_max(double x, const Scenario& scenario, ScattererKind kind);

/// Joint density of (X, Y) for an active scatterer; zero outside the support and
/// wherever the kernel is undefined. Throws std::domain_error at d' = 0, where the
/// law is singular (X = Y).
double joint_pdf(double x, double y, const Scenario& scenario, ScattererKind kind);

/// Integral of joint_pdf over y at fixed x. Under the substitution
/// y^2 = (x - d')^2 + 4 x d' sin^2(phi) the kernel times dy/dphi is the constant 4x,
/// so the marginal is 4x (phi_hi - phi_lo) / area over the clipped y range.
double joint_pdf_marginal_x(double x, const Scenario& scenario, ScattererKind kind);

/// Integral of joint_pdf over its whole support (validation helper).
double joint_pdf_total_mass(const Scenario& scenario, ScattererKind kind);

// ------------------------------------------------------------ received power

enum class InteractionMode { Reflection, Scattering };

std::string_view to_string(InteractionMode mode);

/// Electromagnetic interaction profile. Reflection: g1 = g2 = X + Y,
/// k0 = Pt (lambda / 4 pi)^2. Scattering: g1 = X + Y, g2 = X Y,
/// k0 = Pt lambda^2 / (4 pi)^3. Coefficients R are Normal(coeff_mean, coeff_var).
struct InteractionModel {
    InteractionMode mode = InteractionMode::Reflection;
    double transmit_power_w = 10.0;
    double wavelength_m = kSpeedOfLight / 2.0e9;
    double coeff_mean = -1.17;
    double coeff_var = 0.4;

    double k0() const;
    double phase_length(double x, double y) const { return x + y; }
    double amplitude_divisor(double x, double y) const {
        return mode == InteractionMode::Reflection ? x + y : x * y;
    }
    /// Phase 2 pi g1 / lambda of a path.
    double phase(double x, double y) const;
};

void validate(const InteractionModel& model);

/// Running sums of a = R cos(theta)/g2, b = R sin(theta)/g2 and q = a^2 + b^2 for
/// one scatterer class. Merging is exact concatenation of samples.
struct MomentAccumulator {
    std::size_t n = 0;
    double sa = 0.0, sb = 0.0, sq = 0.0;
    double saa = 0.0, sbb = 0.0, sqq = 0.0;
    double sab = 0.0, saq = 0.0, sbq = 0.0;
    double sa4 = 0.0, sb4 = 0.0;

    void add(double a, double b);
    void merge(const MomentAccumulator& other);
};

/// Per-class moment terms (units 1/m for reflection, 1/m^2 for scattering):
/// h = E[a], g = Var[a], h_prime = E[b], g_prime = Var[b], with standard errors.
struct MomentTerms {
    InteractionMode mode = InteractionMode::Reflection;
    std::size_t samples = 0;
    double h = 0.0, g = 0.0, h_prime = 0.0, g_prime = 0.0;
    double h_se = 0.0, g_se = 0.0, h_prime_se = 0.0, g_prime_se = 0.0;
};

MomentTerms summarize(const MomentAccumulator& acc, InteractionMode mode);

inline constexpr std::size_t kMinMomentSamples = 10000;

/// Monte Carlo moment sums for one class: (X, Y) from uniform lens points, R
/// independent Normal. Work is split into fixed blocks with their own RNG
/// substreams, so the result does not depend on `workers`.
MomentAccumulator accumulate_moments(const Scenario& scenario, ScattererKind kind, const InteractionModel& model,
                                     std::size_t n_mc, std::uint64_t seed, unsigned workers = 1);

MomentTerms moment_terms(const Scenario& scenario, ScattererKind kind, const InteractionModel& model,
                         std::size_t n_mc, std::uint64_t seed, unsigned workers = 1);

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Mean NLoS received power (watts) assembled from per-class moment terms and mean
/// counts, with a delta-method standard error. Classes with zero mean count are
/// skipped; NoPathError when no class contributes.
Estimate mean_received_power(const Scenario& scenario, const InteractionModel& model, std::size_t n_mc,
                             std::uint64_t seed, unsigned workers = 1);

/// The same assembly from already computed moment sums (either may be empty when
/// its class does not contribute).
Estimate assemble_received_power(const Scenario& scenario, const InteractionModel& model,
                                 const MomentAccumulator& short_moments, const MomentAccumulator& tall_moments);

}  // namespace dualvr
