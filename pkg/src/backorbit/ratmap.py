"""Rational maps of the sphere: evaluation, critical points, fibers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import mpmath
import numpy as np

from .poly import (
    DEFAULT_PRECISION,
    ESCALATED_PRECISION,
    Polynomial,
    RootFindingError,
    all_roots,
    gcd_degree,
    homogeneous_compose,
)
from .sphere import (
    DEFAULT_TOL,
    INFINITY,
    SpherePoint,
    chordal_distance,
    cluster_points,
    normalize,
    point,
)

U = 2.0**-53
# finite fiber members this close to a critical point (chordal) are merged into it
CRITICAL_CAPTURE = 1e-3
FIBER_CACHE_SIZE = 1 << 16


class MapError(ValueError):
    """Invalid rational map (degree below two, or numerator and denominator share a root)."""


class NumericalError(ArithmeticError):
    """A structural identity failed to close after precision escalation."""


@dataclass(frozen=True)
class CriticalPoint:
    location: SpherePoint
    branch_index: int


@dataclass(frozen=True)
class Fiber:
    target: SpherePoint
    members: tuple[tuple[SpherePoint, int], ...]

    @property
    def points(self) -> list[SpherePoint]:
        return [p for p, _ in self.members]

    @property
    def index_sum(self) -> int:
        return sum(e for _, e in self.members)


@dataclass(frozen=True)
class RiemannHurwitzReport:
    total: int
    expected: int

    @property
    def passed(self) -> bool:
        return self.total == self.expected


@dataclass(frozen=True, eq=False)
class RationalMap:
    """``R = P / Q`` with coprime ``P``, ``Q`` and ``deg R = max(deg P, deg Q) >= 2``.

    ``tol`` is the chordal identification tolerance used for fibers and
    deduplication; ``precision_bits`` the root-finder working precision.
    """

    p: Polynomial
    q: Polynomial
    tol: float = DEFAULT_TOL
    precision_bits: int = DEFAULT_PRECISION
    label: str = field(default="", compare=False)

    def __post_init__(self):
        p, q = self.p.numeric(), self.q.numeric()
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        if q.is_zero:
            raise MapError("denominator is the zero polynomial")
        if p.is_zero:
            raise MapError("numerator is the zero polynomial")
        if self.degree < 2:
            raise MapError(f"degree {self.degree} map; degree at least 2 is required")
        if gcd_degree(p, q, precision_bits=self.precision_bits) != 0:
            raise MapError("numerator and denominator are not relatively prime")

    @classmethod
    def from_coefficients(cls, p: Sequence[complex], q: Sequence[complex] = (1.0,), **kw) -> "RationalMap":
        return cls(Polynomial(p), Polynomial(q), **kw)

    @property
    def degree(self) -> int:
        return max(self.p.degree, self.q.degree)

    def __repr__(self) -> str:
        return f"RationalMap(p={self.p.coeffs.tolist()}, q={self.q.coeffs.tolist()})"

    def forms(self) -> tuple[np.ndarray, np.ndarray]:
        """Coefficients of the homogenized pair, both padded to length ``N + 1``."""
        n = self.degree
        a = np.zeros(n + 1, dtype=complex)
        b = np.zeros(n + 1, dtype=complex)
        a[: self.p.coeffs.size] = self.p.coeffs
        b[: self.q.coeffs.size] = self.q.coeffs
        return a, b

    # ------------------------------------------------------------------
    def apply(self, x: SpherePoint) -> SpherePoint:
        a, b = self.forms()
        u, v = _hom_eval(a, x.z, x.w), _hom_eval(b, x.z, x.w)
        if max(abs(u), abs(v)) < 1e-300:
            u, v = _hom_eval_mp(a, b, x.z, x.w)
        return normalize(u, v)

    def __call__(self, x: SpherePoint) -> SpherePoint:
        return self.apply(x)

    def value_at_infinity(self) -> SpherePoint:
        a, b = self.forms()
        return normalize(a[-1], b[-1])

    def fiber_polynomial(self, y: SpherePoint) -> Polynomial:
        """``y_w P - y_z Q`` with leading coefficients at rounding level removed."""
        f = self.p.scale(y.w) - self.q.scale(y.z)
        noise = 16 * U * (abs(y.w) * self.p.max_abs_coeff() + abs(y.z) * self.q.max_abs_coeff())
        return f.trimmed(noise)

    def _roots(self, poly: Polynomial, bits: int):
        return all_roots(poly, precision_bits=bits, cluster_tol=self.tol)

    # ------------------------------------------------------------------
    @cached_property
    def critical_points(self) -> tuple[CriticalPoint, ...]:
        """Critical points with branch indices, canonically sorted.

        Finite ones are roots of the Wronskian ``P'Q - PQ'`` (a root of
        multiplicity ``m`` has index ``m + 1``); the index at infinity is the
        degree drop of the fiber polynomial over ``R(inf)``. The total is
        checked against Riemann-Hurwitz and recomputed at higher precision on
        mismatch.
        """
        for bits in (self.precision_bits, max(ESCALATED_PRECISION, self.precision_bits)):
            crit = self._critical_points(bits)
            if sum(c.branch_index - 1 for c in crit) == 2 * self.degree - 2:
                return crit
        raise NumericalError(
            f"critical points {crit} violate Riemann-Hurwitz for degree {self.degree}"
        )

    def _critical_points(self, bits: int) -> tuple[CriticalPoint, ...]:
        w = self.p.derivative() * self.q - self.p * self.q.derivative()
        scale = max(self.p.max_abs_coeff(), 1.0) * max(self.q.max_abs_coeff(), 1.0)
        w = w.trimmed(16 * U * self.degree * scale)
        out = []
        if w.degree >= 1:
            for loc, m in self._roots(w, bits).roots:
                out.append(CriticalPoint(point(loc), m + 1))
        e_inf = self.degree - max(self.fiber_polynomial(self.value_at_infinity()).degree, 0)
        if e_inf >= 2:
            out.append(CriticalPoint(INFINITY, e_inf))
        out.sort(key=lambda c: c.location.sort_key())
        return tuple(out)

    @cached_property
    def critical_values(self) -> tuple[tuple[CriticalPoint, SpherePoint], ...]:
        return tuple((c, self.apply(c.location)) for c in self.critical_points)

    @property
    def branched_points(self) -> list[SpherePoint]:
        return [c.location for c in self.critical_points]

    def branch_index_at_infinity(self) -> int:
        return self.degree - max(self.fiber_polynomial(self.value_at_infinity()).degree, 0)

    # ------------------------------------------------------------------
    def snap(self, y: SpherePoint) -> SpherePoint:
        """Replace ``y`` by a critical value or ``R(inf)`` within ``tol`` of it."""
        specials = [v for _, v in self.critical_values] + [self.value_at_infinity()]
        best = min(specials, key=lambda v: chordal_distance(v, y))
        return best if chordal_distance(best, y) <= self.tol else y

    @cached_property
    def _fiber_cache(self) -> dict:
        return {}

    def fiber(self, y: SpherePoint) -> Fiber:
        """``R^{-1}(y)`` as distinct points with branch indices summing to ``N``.

        A target within ``tol`` of a critical value is identified with it; the
        roots gathered around each critical point over that value are merged
        into the critical point with its branch index.
        """
        cache = self._fiber_cache
        hit = cache.get(y)
        if hit is not None:
            return hit
        y = self.snap(y)
        try:
            fib = self._fiber(y, self.precision_bits)
        except (RootFindingError, NumericalError):
            if self.precision_bits >= ESCALATED_PRECISION:
                raise
            fib = self._fiber(y, ESCALATED_PRECISION)
        if len(cache) >= FIBER_CACHE_SIZE:
            cache.clear()
        cache[y] = fib
        return fib

    def _fiber(self, y: SpherePoint, bits: int) -> Fiber:
        f = self.fiber_polynomial(y)
        if f.is_zero:
            raise NumericalError("fiber polynomial vanished; P and Q cannot be coprime")
        drop = self.degree - f.degree
        pool: list[list] = []
        if f.degree >= 1:
            pool = [[point(loc), m] for loc, m in self._roots(f, bits).roots]
        # a degree drop stands for roots at or near infinity, so capture must see it
        if drop > 0:
            pool.append([INFINITY, drop])
        for crit, value in self.critical_values:
            if crit.location.is_infinity or chordal_distance(value, y) > self.tol:
                continue
            pool = _capture(pool, crit, self.tol)
        pts = [p for p, _ in pool]
        members = []
        for comp in cluster_points(pts, self.tol):
            # prefer the exact critical/infinity representative if present
            rep = next((pts[k] for k in comp if pts[k].is_infinity), pts[comp[0]])
            members.append((rep, sum(pool[k][1] for k in comp)))
        fib = Fiber(y, tuple(members))
        if fib.index_sum != self.degree:
            raise NumericalError(f"fiber over {y} has index sum {fib.index_sum} != {self.degree}")
        return fib

    def verify_riemann_hurwitz(self) -> RiemannHurwitzReport:
        total = sum(c.branch_index - 1 for c in self._critical_points(self.precision_bits))
        return RiemannHurwitzReport(total, 2 * self.degree - 2)

    # ------------------------------------------------------------------
    def iterate_forms(self, n: int) -> tuple[Polynomial, Polynomial]:
        """Numerator and denominator of ``R^n`` (degree ``N^n``) by homogeneous composition."""
        pn, qn = self.p, self.q
        for _ in range(n - 1):
            pn, qn = _pad_compose(self, pn, qn)
        return pn, qn


def _pad_compose(r: RationalMap, a: Polynomial, b: Polynomial):
    """``R(A / B)`` as a polynomial pair, with ``A / B`` read as a form of degree max(deg A, deg B)."""
    return tuple(homogeneous_compose([r.p, r.q], r.degree, [a, b]))


def _capture(pool: list, crit: CriticalPoint, tol: float) -> list:
    """Merge the ``e`` roots nearest ``crit`` into it."""
    if any(chordal_distance(p, crit.location) <= tol and m == crit.branch_index for p, m in pool):
        return [[crit.location, m] if chordal_distance(p, crit.location) <= tol else [p, m] for p, m in pool]
    ranked = sorted(range(len(pool)), key=lambda k: chordal_distance(pool[k][0], crit.location))
    need = crit.branch_index
    taken = []
    for k in ranked:
        if need <= 0:
            break
        if chordal_distance(pool[k][0], crit.location) > CRITICAL_CAPTURE or pool[k][1] > need:
            raise NumericalError(f"cannot resolve the fiber cluster at critical point {crit.location}")
        taken.append(k)
        need -= pool[k][1]
    if need:
        raise NumericalError(f"too few roots near critical point {crit.location}")
    rest = [pool[k] for k in range(len(pool)) if k not in taken]
    return rest + [[crit.location, crit.branch_index]]


def _hom_eval(c: np.ndarray, z: complex, w: complex) -> complex:
    """``sum c_k z^k w^(N-k)`` via Horner in the larger coordinate."""
    n = c.size - 1
    if abs(w) >= abs(z):
        t = z / w
        acc = 0j
        for a in c[::-1]:
            acc = acc * t + a
        return acc * w**n
    t = w / z
    acc = 0j
    for a in c:
        acc = acc * t + a
    return acc * z**n


def _hom_eval_mp(a: np.ndarray, b: np.ndarray, z: complex, w: complex):
    with mpmath.workprec(ESCALATED_PRECISION):
        zz, ww = mpmath.mpc(z), mpmath.mpc(w)
        n = a.size - 1
        u = sum(mpmath.mpc(complex(a[k])) * zz**k * ww ** (n - k) for k in range(n + 1))
        v = sum(mpmath.mpc(complex(b[k])) * zz**k * ww ** (n - k) for k in range(n + 1))
        s = max(abs(u), abs(v))
        return complex(u / s), complex(v / s)


def compose_pairs(outer: RationalMap, inner: tuple[Polynomial, Polynomial]) -> tuple[Polynomial, Polynomial]:
    """``outer`` applied to the map given by the coprime pair ``inner``."""
    return _pad_compose(outer, *inner)
