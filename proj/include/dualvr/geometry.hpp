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

// Circle-circle lens geometry in the BS-MS plane. The BS sits at the origin and
// the MS at (d0, 0); radius `a` belongs to the BS circle and `b` to the MS circle.
// Lengths are meters, areas square meters.

#include "dualvr/rng.hpp"

#include <stdexcept>

namespace dualvr::geometry {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct LensSpec {
    double d0 = 0.0;  // center separation
    double a = 0.0;   // radius of the circle centered at the BS
    double b = 0.0;   // radius of the circle centered at the MS
};

enum class LensKind { disjoint, contained, lens };

/// Raised when a sampler is asked for a point in a region of zero area.
class EmptyRegionError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Throws std::invalid_argument unless d0 >= 0, a > 0, b > 0 and all are finite.
void validate(const LensSpec& spec);

/// Ties resolve to the degenerate branches: a + b == d0 is disjoint and
/// |a - b| == d0 is contained.
LensKind classify(const LensSpec& spec);

/// Intersection area of the two circles, total over all configurations.
double lens_area(const LensSpec& spec);

/// Closed-form lens area valid only for |a - b| <= d0 <= a + b with d0 > 0.
/// Arccosine arguments are clamped to [-1, 1] and tiny negative radicands are
/// snapped to zero, so both tangent configurations evaluate exactly.
double lens_area_partial(double d0, double a, double b);

/// Mixed second partial d^2 A'(d', x, y) / dx dy of the lens area with respect to
/// the two radii. Throws std::domain_error where the radicands are not strictly
/// positive, i.e. where (x, y, d') fail the strict triangle inequality.
double density_kernel(double d_prime, double x, double y);

/// Same quantity evaluated term by term from the expanded three-term expression.
/// Loses precision near the triangle-inequality boundary; kept for cross-checks.
double density_kernel_expanded(double d_prime, double x, double y);

struct SupportBounds {
    double a_min = 0.0;
    double a_max = 0.0;
    double b_min = 0.0;
    double b_max = 0.0;
};

/// Range of BS distances [a_min, a_max] and MS distances [b_min, b_max] over the
/// lens. Throws EmptyRegionError when the lens has zero area.
SupportBounds support_bounds(const LensSpec& spec);

struct Box {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double y_lo = 0.0;
    double y_hi = 0.0;

    double area() const { return (x_hi - x_lo) * (y_hi - y_lo); }
};

/// Tight axis-aligned bounding box of the lens.
Box bounding_box(const LensSpec& spec);

bool contains(const LensSpec& spec, Point p);

/// Rejection sampler for points uniform over a lens. Construction precomputes the
/// proposal box, so one instance should be reused across draws.
class LensSampler {
  public:
    explicit LensSampler(const LensSpec& spec);

    Point operator()(Rng& rng) const;

    const LensSpec& spec() const { return spec_; }
    double area() const { return area_; }
    const Box& box() const { return box_; }

  private:
    LensSpec spec_;
    double area_;
    Box box_;
};

Point sample_uniform_in_lens(const LensSpec& spec, Rng& rng);

}  // namespace dualvr::geometry
