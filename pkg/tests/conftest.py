"""Shared test helpers: random rational fans and calibrations."""

import math
import random
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from qtoric.calibration import CalibratedFan, Calibration
from qtoric.lattice_fan import QLattice, QuantumFan, fan_from_max_cones
from qtoric.scalars import Parameter, Scalar, Witness

Q = Fraction


def rand_fraction(rng, lo=-6, hi=6, max_den=5, nonzero=False):
    while True:
        f = Q(rng.randint(lo, hi), rng.randint(1, max_den))
        if not nonzero or f != 0:
            return f


def random_circle_fan(rng, p) -> QuantumFan:
    """Complete simplicial fan in R^2: p distinct rational directions in
    cyclic order with every consecutive gap under 180 degrees, consecutive
    pairs as maximal cones."""
    while True:
        dirs = set()
        while len(dirs) < p:
            x = rng.randint(-9, 9)
            y = rng.randint(-9, 9)
            if x == 0 and y == 0:
                continue
            g = math.gcd(abs(x), abs(y))
            dirs.add((x // g, y // g))
        dirs = sorted(dirs, key=lambda v: math.atan2(v[1], v[0]))
        gaps_ok = all(
            dirs[i][0] * dirs[(i + 1) % p][1]
            - dirs[i][1] * dirs[(i + 1) % p][0] > 0
            for i in range(p))
        if gaps_ok:
            break
    rays = [list(v) for v in dirs]
    cones = [[i + 1, (i + 1) % p + 1] for i in range(p)]
    gamma = QLattice(2, rays)
    return fan_from_max_cones(gamma, rays, cones)


def random_bipyramid_fan(rng, k) -> QuantumFan:
    """Complete simplicial fan in R^3: k planar directions plus two poles,
    cones (i, i+1, pole)."""
    base = random_circle_fan(rng, k)
    rays = [list(v) + [Scalar.zero()] for v in base.rays]
    north = [0, 0, 1]
    south = [0, 0, -1]
    rays = rays + [north, south]
    n_idx, s_idx = k + 1, k + 2
    cones = []
    for i in range(k):
        a, b = i + 1, (i + 1) % k + 1
        cones.append([a, b, n_idx])
        cones.append([a, b, s_idx])
    gamma = QLattice(3, rays)
    return fan_from_max_cones(gamma, rays, cones)


def random_complete_fan(rng, d) -> QuantumFan:
    if d == 1:
        return fan_from_max_cones(QLattice(1, [[1], [-1]]),
                                  [[1], [-1]], [[1], [2]])
    if d == 2:
        return random_circle_fan(rng, rng.randint(3, 6))
    return random_bipyramid_fan(rng, rng.randint(3, 5))


def random_even_calibrated_fan(rng, d) -> CalibratedFan:
    """Complete simplicial maximal-length calibrated fan with n - d even:
    a random complete fan trivially calibrated, padded with virtual
    generators whose images are small lattice combinations of the rays."""
    fan = random_complete_fan(rng, d)
    p = fan.nrays
    extra = (p - d) % 2
    n = p + extra + 2 * rng.randint(0, 1)
    images = [list(v) for v in fan.rays]
    for _ in range(n - p):
        coeffs = [rng.randint(-2, 2) for _ in range(p)]
        img = [Scalar.zero()] * d
        for c, v in zip(coeffs, fan.rays):
            img = [x + Scalar.coerce(c) * y for x, y in zip(img, v)]
        images.append(img)
    J = list(range(p + 1, n + 1))
    I = list(range(1, p + 1))
    cal = Calibration(fan.gamma, images, J, I)
    return CalibratedFan(fan, cal)


def plain_witness(**vals) -> Witness:
    return Witness({Parameter(k): Q(v) for k, v in vals.items()})


EMPTY_WITNESS = Witness({})
