# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Reference values frozen into the C++ tests.

Everything here is computed in polar coordinates around the BS with scipy
quadrature, without the lens-area closed form or the distance CDFs used by
the library. Rerun with `python3 compute_oracles.py` to regenerate.
"""
import math

import numpy as np
from scipy import integrate, stats

C = 299792458.0
SHORT = dict(v1=500.0, v2=300.0, density=70.7e-6)
TALL = dict(v1=4100.0, v2=4000.0, density=0.42e-6)
GAMMA = 0.22


def half_angle(r, d, b):
    """Half-width of the arc of the BS-centered circle of radius r inside the MS disc."""
    if d == 0.0:
        return math.pi if r <= b else 0.0
    c = (r * r + d * d - b * b) / (2.0 * r * d)
    if c <= -1.0:
        return math.pi
    if c >= 1.0:
        return 0.0
    return math.acos(c)


def lens_moments(d, a, b):
    """Area, E[X], E[Y] of a uniform point in the lens."""
    lo, hi = max(0.0, d - b), min(a, d + b)
    if hi <= lo:
        return 0.0, math.nan, math.nan
    pts = sorted({lo, hi, *[p for p in (b - d, d, abs(a - b)) if lo < p < hi]})

    def piecewise(f):
        return sum(integrate.quad(f, p, q, epsabs=0, epsrel=1e-12, limit=400)[0] for p, q in zip(pts, pts[1:]))

    area = piecewise(lambda r: 2.0 * half_angle(r, d, b) * r)
    ex = piecewise(lambda r: 2.0 * half_angle(r, d, b) * r * r) / area

    def inner_y(r):
        t = half_angle(r, d, b)
        if t == 0.0:
            return 0.0
        g = lambda th: math.sqrt(max(r * r + d * d - 2.0 * r * d * math.cos(th), 0.0))
        return 2.0 * r * integrate.quad(g, 0.0, t, epsabs=0, epsrel=1e-12, limit=200)[0]

    ey = piecewise(inner_y) / area
    return area, ex, ey


def mean_toa(d, gamma):
    a_s, ex_s, ey_s = lens_moments(d, SHORT["v1"], SHORT["v2"])
    a_t, ex_t, ey_t = lens_moments(d, TALL["v1"], TALL["v2"])
    mu_s, mu_t = SHORT["density"] * a_s, TALL["density"] * a_t
    w1 = gamma * (1.0 - math.exp(-(mu_s + mu_t)))
    w0 = (1.0 - gamma) * (1.0 - math.exp(-mu_s))
    num = 0.0
    if w1 > 0:
        num += w1 * (mu_s * (ex_s + ey_s if mu_s > 0 else 0.0) + mu_t * (ex_t + ey_t)) / (mu_s + mu_t)
    if w0 > 0:
        num += w0 * (ex_s + ey_s)
    if w1 + w0 == 0:
        return math.nan
    return num / (w1 + w0) / C


def main():
    print("lens_area(1,1,1)", repr(lens_moments(1.0, 1.0, 1.0)[0]))
    print("lens_area(200,4100,4000)", repr(lens_moments(200.0, 4100.0, 4000.0)[0]))
    print("lens_area(3,2,2)", repr(lens_moments(3.0, 2.0, 2.0)[0]))
    for name, c in (("short", SHORT), ("tall", TALL)):
        area, ex, ey = lens_moments(200.0, c["v1"], c["v2"])
        print(f"gtu {name}: area={area!r} mu={c['density'] * area!r} E[X]={ex!r} E[Y]={ey!r}")
    a_s = lens_moments(200.0, SHORT["v1"], SHORT["v2"])[0]
    a_t = lens_moments(200.0, TALL["v1"], TALL["v2"])[0]
    mu_s, mu_t = SHORT["density"] * a_s, TALL["density"] * a_t
    n = np.arange(0, 120)
    pmf = (1 - GAMMA) * stats.poisson.pmf(n, mu_s) + GAMMA * stats.poisson.pmf(n, mu_s + mu_t)
    peaks = [int(k) for k in n[1:-1] if pmf[k] > pmf[k - 1] and pmf[k] > pmf[k + 1]]
    print("pmf local maxima", peaks, "pmf[20]", repr(pmf[20]), "pmf[41]", repr(pmf[41]))
    print("mean toa (us), gamma in 0, 0.22, 0.5, 1")
    for d in range(100, 1001, 100):
        print(d, [round(mean_toa(float(d), g) * 1e6, 9) for g in (0.0, 0.22, 0.5, 1.0)])


if __name__ == "__main__":
    main()
