"""Points of the Riemann sphere in normalized projective coordinates."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-9
DEFAULT_DIGITS = 17

# fixed generic direction for the dedup sweep; avoids axis-aligned ties
_SWEEP_DIR = np.array([1.0, math.sqrt(2.0), math.sqrt(3.0)]) / math.sqrt(6.0)


@dataclass(frozen=True, order=False)
class SpherePoint:
    """A point ``[z : w]`` of the sphere.

    Always built through :func:`normalize`, so ``|z|^2 + |w|^2 = 1`` and the
    component of larger modulus is real and positive.
    """

    z: complex
    w: complex
    # affine coordinate the point was built from, kept so printing round-trips
    given: complex | None = field(default=None, compare=False, repr=False)

    @property
    def is_infinity(self) -> bool:
        return self.w == 0

    def affine(self) -> complex:
        """Affine coordinate ``z / w``; ``inf`` for the point at infinity."""
        if self.w == 0:
            return complex(math.inf, 0.0)
        if self.given is not None:
            return self.given
        return self.z / self.w

    def sort_key(self) -> tuple:
        if self.w == 0:
            return (1, 0.0, 0.0)
        a = self.affine()
        return (0, a.real, a.imag)

    def embedding(self) -> np.ndarray:
        """Image on the unit sphere in R^3 (chordal distance = Euclidean distance)."""
        zw = self.z * self.w.conjugate()
        return np.array([2 * zw.real, 2 * zw.imag, abs(self.z) ** 2 - abs(self.w) ** 2])

    def __lt__(self, other: "SpherePoint") -> bool:
        return self.sort_key() < other.sort_key()

    def to_text(self, digits: int = DEFAULT_DIGITS) -> str:
        return format_point(self, digits)

    def __repr__(self) -> str:
        return f"SpherePoint({self.to_text()})"


def normalize(z: complex, w: complex) -> SpherePoint:
    """Canonical representative of the projective pair ``[z : w]``."""
    z = complex(z)
    w = complex(w)
    if not (cmath.isfinite(z) and cmath.isfinite(w)):
        raise ValueError(f"non-finite projective pair ({z}, {w})")
    if z == 0 and w == 0:
        raise ValueError("[0 : 0] is not a point of the sphere")
    if w == 0:
        return SpherePoint(1.0 + 0j, 0j)
    if z == 0:
        return SpherePoint(0j, 1.0 + 0j)
    # rescale first so the norm cannot overflow or underflow
    s = max(abs(z), abs(w))
    z, w = z / s, w / s
    norm = math.hypot(abs(z), abs(w))
    w_leads = abs(w) >= abs(z)
    lead = w if w_leads else z
    phase = lead.conjugate() / abs(lead)
    z, w = z * phase / norm, w * phase / norm
    # decide once: after rounding the moduli may compare the other way
    if w_leads:
        w = complex(w.real, 0.0)
    else:
        z = complex(z.real, 0.0)
    return SpherePoint(z, w)


def point(a: complex) -> SpherePoint:
    """Embed a finite complex number (or ``inf``) into the sphere."""
    a = complex(a)
    if cmath.isinf(a):
        return INFINITY
    p = normalize(a, 1.0)
    return SpherePoint(p.z, p.w, a)


INFINITY = SpherePoint(1.0 + 0j, 0j)
ZERO = SpherePoint(0j, 1.0 + 0j)


def chordal_distance(p: SpherePoint, q: SpherePoint) -> float:
    num = abs(p.z * q.w - q.z * p.w)
    den = math.hypot(abs(p.z), abs(p.w)) * math.hypot(abs(q.z), abs(q.w))
    return min(2.0, 2.0 * num / den)


def chordal_affine(a: complex, b: complex) -> float:
    """Chordal distance between two finite affine coordinates."""
    # divide step by step so moduli near the float range cannot overflow
    return 2.0 * (abs(a - b) / math.hypot(1.0, abs(a))) / math.hypot(1.0, abs(b))


def points_equal(p: SpherePoint, q: SpherePoint, tol: float = DEFAULT_TOL) -> bool:
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    return chordal_distance(p, q) <= tol


def _find(parent: list[int], i: int) -> int:
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


def cluster_points(points: Sequence[SpherePoint], tol: float = DEFAULT_TOL) -> list[list[int]]:
    """Connected components of the graph ``d(p, q) <= tol``.

    Components do not depend on input order. Each component is returned as a
    list of indices; components come out sorted by their canonically smallest
    member.
    """
    n = len(points)
    if n == 0:
        return []
    emb = np.array([p.embedding() for p in points])
    key = emb @ _SWEEP_DIR
    order = np.argsort(key, kind="stable")
    parent = list(range(n))
    for a in range(n):
        i = int(order[a])
        for b in range(a + 1, n):
            j = int(order[b])
            if key[j] - key[i] > tol:
                break
            if chordal_distance(points[i], points[j]) <= tol:
                ri, rj = _find(parent, i), _find(parent, j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(_find(parent, i), []).append(i)
    comps = [sorted(g, key=lambda k: points[k].sort_key()) for g in groups.values()]
    comps.sort(key=lambda g: points[g[0]].sort_key())
    return comps


def unique_points(points: Iterable[SpherePoint], tol: float = DEFAULT_TOL) -> list[SpherePoint]:
    """Deduplicate under chordal tolerance; canonical order, smallest member kept."""
    pts = list(points)
    return [pts[g[0]] for g in cluster_points(pts, tol)]


def _fmt(x: float, digits: int) -> str:
    return format(x, f".{digits}g")


def format_point(p: SpherePoint, digits: int = DEFAULT_DIGITS) -> str:
    if p.is_infinity:
        return "inf"
    a = p.affine()
    re, im = a.real + 0.0, a.imag + 0.0
    sign = "-" if math.copysign(1.0, im) < 0 else "+"
    return f"{_fmt(re, digits)}{sign}{_fmt(abs(im), digits)}i"
