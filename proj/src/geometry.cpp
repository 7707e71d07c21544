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

#include "dualvr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace dualvr::geometry {
namespace {

constexpr double kRadicandTolerance = 1e-9;

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

// Snaps radicands within floating-point noise of zero; `scale` carries the units
// of the radicand.
double snap_radicand(double value, double scale) {
    if (value < 0.0 && value > -kRadicandTolerance * scale) return 0.0;
    return value;
}

bool finite_all(double a, double b, double c) {
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(c);
}

}  // namespace

void validate(const LensSpec& spec) {
    if (!finite_all(spec.d0, spec.a, spec.b))
        throw std::invalid_argument("lens parameters must be finite");
    if (spec.d0 < 0.0) throw std::invalid_argument("lens center separation must be non-negative");
    if (spec.a <= 0.0 || spec.b <= 0.0) throw std::invalid_argument("lens radii must be positive");
}

LensKind classify(const LensSpec& spec) {
    validate(spec);
    if (spec.a + spec.b <= spec.d0) return LensKind::disjoint;
    if (std::abs(spec.a - spec.b) >= spec.d0) return LensKind::contained;
    return LensKind::lens;
}

double lens_area(const LensSpec& spec) {
    switch (classify(spec)) {
        case LensKind::disjoint:
            return 0.0;
        case LensKind::contained: {
            const double r = std::min(spec.a, spec.b);
            return std::numbers::pi * r * r;
        }
        case LensKind::lens:
            break;
    }
    return lens_area_partial(spec.d0, spec.a, spec.b);
}

double lens_area_partial(double d0, double a, double b) {
    if (!finite_all(d0, a, b) || d0 <= 0.0 || a <= 0.0 || b <= 0.0)
        throw std::invalid_argument("lens_area_partial: requires finite d0 > 0, a > 0, b > 0");
    const double slack = 1e-12 * (d0 + a + b);
    if (std::abs(a - b) > d0 + slack || d0 > a + b + slack)
        throw std::invalid_argument("lens_area_partial: circles do not form a lens (need |a-b| <= d0 <= a+b)");

    const double d2 = d0 * d0;
    const double a2 = a * a;
    const double b2 = b * b;
    const double cos_b = clamp_unit((d2 + b2 - a2) / (2.0 * d0 * b));
    const double cos_a = clamp_unit((d2 + a2 - b2) / (2.0 * d0 * a));
    const double q = d2 - b2 + a2;
    const double scale = 4.0 * d2 * a2;
    const double radicand = std::max(0.0, snap_radicand(scale - q * q, scale));
    return b2 * std::acos(cos_b) + a2 * std::acos(cos_a) - 0.5 * std::sqrt(radicand);
}

double density_kernel(double d_prime, double x, double y) {
    if (!finite_all(d_prime, x, y) || d_prime <= 0.0 || x <= 0.0 || y <= 0.0)
        throw std::domain_error("density_kernel: requires finite positive d', x, y");
    // 4 d'^2 x^2 - (d'^2 + x^2 - y^2)^2 factored as a product of the four triangle terms
    const double r = (d_prime + x + y) * (d_prime + x - y) * (d_prime - x + y) * (x + y - d_prime);
    if (!(r > 0.0))
        throw std::domain_error("density_kernel: distances violate the strict triangle inequality");
    return 4.0 * x * y / std::sqrt(r);
}

double density_kernel_expanded(double d_prime, double x, double y) {
    if (!finite_all(d_prime, x, y) || d_prime <= 0.0 || x <= 0.0 || y <= 0.0)
        throw std::domain_error("density_kernel: requires finite positive d', x, y");

    const double d2 = d_prime * d_prime;
    const double x2 = x * x;
    const double y2 = y * y;

    const double p = d2 - x2 + y2;
    const double s = snap_radicand(1.0 - p * p / (4.0 * d2 * y2), 1.0);
    const double q = d2 + x2 - y2;
    const double r_scale = 4.0 * d2 * x2;
    const double r = snap_radicand(r_scale - q * q, r_scale);
    if (!(s > 0.0) || !(r > 0.0))
        throw std::domain_error("density_kernel: distances violate the strict triangle inequality");

    const double t1 = x / (d_prime * std::sqrt(s));
    const double t2 = 4.0 * x * y * y2 * q / (r * std::sqrt(r));
    const double t3 = x * (d2 * d2 - 2.0 * d2 * x2 + x2 * x2 - y2 * y2) / (4.0 * d2 * d_prime * y2 * s * std::sqrt(s));
    return t1 + t2 - t3;
}

SupportBounds support_bounds(const LensSpec& spec) {
    if (lens_area(spec) <= 0.0) throw EmptyRegionError("support_bounds: lens has zero area");
    return SupportBounds{
        .a_min = std::max(spec.d0 - spec.b, 0.0),
        .a_max = std::min(spec.d0 + spec.b, spec.a),
        .b_min = std::max(spec.d0 - spec.a, 0.0),
        .b_max = std::min(spec.d0 + spec.a, spec.b),
    };
}

Box bounding_box(const LensSpec& spec) {
    validate(spec);
    const double d0 = spec.d0;
    const double a = spec.a;
    const double b = spec.b;
    Box box;
    box.x_lo = std::max(-a, d0 - b);
    box.x_hi = std::min(a, d0 + b);

    double half_height = 0.0;
    if (d0 * d0 + a * a <= b * b) {
        half_height = a;  // top of the BS circle lies inside the MS circle
    } else if (d0 * d0 + b * b <= a * a) {
        half_height = b;
    } else if (a + b > d0) {
        const double xc = (d0 * d0 + a * a - b * b) / (2.0 * d0);
        half_height = std::sqrt(std::max(0.0, a * a - xc * xc));
    }
    box.y_lo = -half_height;
    box.y_hi = half_height;
    return box;
}

bool contains(const LensSpec& spec, Point p) {
    const double dx = p.x - spec.d0;
    return p.x * p.x + p.y * p.y <= spec.a * spec.a && dx * dx + p.y * p.y <= spec.b * spec.b;
}

LensSampler::LensSampler(const LensSpec& spec) : spec_(spec), area_(lens_area(spec)), box_(bounding_box(spec)) {
    if (area_ <= 0.0 || box_.area() <= 0.0) throw EmptyRegionError("cannot sample from a zero-area lens");
}

Point LensSampler::operator()(Rng& rng) const {
    std::uniform_real_distribution<double> ux(box_.x_lo, box_.x_hi);
    std::uniform_real_distribution<double> uy(box_.y_lo, box_.y_hi);
    for (;;) {
        const Point p{ux(rng), uy(rng)};
        if (contains(spec_, p)) return p;
    }
}

Point sample_uniform_in_lens(const LensSpec& spec, Rng& rng) { return LensSampler(spec)(rng); }

}  // namespace dualvr::geometry
