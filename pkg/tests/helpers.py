"""Shared test utilities."""

from __future__ import annotations

import numpy as np

from backorbit.poly import Polynomial, homogeneous_compose
from backorbit.ratmap import RationalMap


def conjugate(R: RationalMap, a: complex, b: complex, c: complex, d: complex) -> RationalMap:
    """``M o R o M^-1`` for ``M(z) = (a z + b) / (c z + d)``."""
    inv = [Polynomial([-b, d]), Polynomial([a, -c])]
    p1, q1 = homogeneous_compose([R.p, R.q], R.degree, inv)
    p2 = p1.scale(a) + q1.scale(b)
    q2 = p1.scale(c) + q1.scale(d)
    s = max(p2.max_abs_coeff(), q2.max_abs_coeff())
    return RationalMap(p2.scale(1 / s), q2.scale(1 / s), label=f"conj({R.label})")


def mobius_apply(a, b, c, d, z: complex) -> complex:
    den = c * z + d
    return np.inf if den == 0 else (a * z + b) / den
