"""Backward orbits counted without multiplicity.

``b_n(z)`` is the number of distinct points of ``R^{-n}(z)``. Levels are
built by taking fibers of every point of the previous level and
deduplicating under the map's chordal tolerance.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .poly import all_roots
from .ratmap import NumericalError, RationalMap
from .sphere import INFINITY, SpherePoint, chordal_distance, cluster_points, point, unique_points

log = logging.getLogger(__name__)

DEFAULT_DEPTH = 12
ORACLE_DEGREE_GUARD = 10_000


@dataclass(frozen=True)
class OrbitLevels:
    start: SpherePoint
    levels: tuple[tuple[SpherePoint, ...], ...]

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(lv) for lv in self.levels)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1


class OrbitError(NumericalError):
    def __init__(self, message: str, level: int):
        super().__init__(f"{message} (at level {level})")
        self.level = level


def _map_ordered(fn, items: Sequence, jobs: int):
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def next_level(R: RationalMap, level: Sequence[SpherePoint], jobs: int = 1) -> tuple[SpherePoint, ...]:
    fibers = _map_ordered(R.fiber, list(level), jobs)
    pts = [p for fib in fibers for p in fib.points]
    return tuple(unique_points(pts, R.tol))


def backward_levels(R: RationalMap, z: SpherePoint, depth: int = DEFAULT_DEPTH, jobs: int = 1) -> OrbitLevels:
    """Levels ``R^{-n}(z)`` for ``n = 0..depth``; ``counts[n] = b_n(z)``."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    levels = [(z,)]
    for n in range(1, depth + 1):
        try:
            levels.append(next_level(R, levels[-1], jobs))
        except ArithmeticError as exc:
            raise OrbitError(str(exc), n) from exc
    return OrbitLevels(z, tuple(levels))


def bseq(R: RationalMap, z: SpherePoint, depth: int = DEFAULT_DEPTH, jobs: int = 1) -> tuple[int, ...]:
    return backward_levels(R, z, depth, jobs).counts


# ----------------------------------------------------------------------
# closed form for z^2 - 1 at 0


def closed_form_b(k: int) -> int:
    """``b_k(0)`` for ``z^2 - 1``: ``(1 + 2^(k+1)) / 3`` for even k, ``(2 + 2^(k+1)) / 3`` for odd k."""
    if k % 2 == 0:
        return (1 + 2 ** (k + 1)) // 3
    return (2 + 2 ** (k + 1)) // 3


def bseq_closed_form_check(n_max: int, R: RationalMap | None = None, jobs: int = 1) -> dict:
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if R is None:
        R = RationalMap.from_coefficients([-1, 0, 1])
    computed = list(bseq(R, point(0), n_max, jobs))
    expected = [closed_form_b(k) for k in range(n_max + 1)]
    mismatch = next((k for k in range(n_max + 1) if computed[k] != expected[k]), None)
    return {"computed": computed, "expected": expected, "first_mismatch": mismatch, "passed": mismatch is None}


# ----------------------------------------------------------------------
# exceptional points


@dataclass(frozen=True)
class ExceptionalResult:
    exceptional: bool
    orbit: tuple[SpherePoint, ...]
    witness_level: int | None = None
    witness_count: int | None = None


def is_exceptional(R: RationalMap, z: SpherePoint, probe_depth: int = 4) -> ExceptionalResult:
    """A point is exceptional iff its grand backward orbit is finite (then at most two points)."""
    if probe_depth < 2:
        raise ValueError("probe_depth must be >= 2")
    seen = [z]
    level: tuple[SpherePoint, ...] = (z,)
    for n in range(1, probe_depth + 1):
        level = next_level(R, level)
        seen = unique_points(seen + list(level), R.tol)
        if len(seen) > 2:
            return ExceptionalResult(False, tuple(seen), n, len(level))
    closed = all(
        any(chordal_distance(x, s) <= R.tol for s in seen) for p in seen for x in R.fiber(p).points
    )
    if not closed:
        return ExceptionalResult(False, tuple(seen), probe_depth, len(level))
    return ExceptionalResult(True, tuple(seen))


# ----------------------------------------------------------------------
# brute-force oracle


def oracle_bn(R: RationalMap, z: SpherePoint, n: int) -> int:
    """``b_n(z)`` from the roots of the single equation ``R^n(x) = z``.

    Builds ``R^n`` by composing the homogenized pair, so it shares nothing
    with the level-by-level fibers except the root finder.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 1
    big = R.degree**n
    if big > ORACLE_DEGREE_GUARD:
        raise ValueError(f"N^n = {big} exceeds the oracle guard {ORACLE_DEGREE_GUARD}")
    pn, qn = R.iterate_forms(n)
    f = pn.scale(z.w) - qn.scale(z.z)
    noise = 16 * 2.0**-53 * big * (abs(z.w) * pn.max_abs_coeff() + abs(z.z) * qn.max_abs_coeff())
    f = f.trimmed(noise)
    pts = []
    if f.degree >= 1:
        pts = [point(r) for r, _ in all_roots(f, R.precision_bits, R.tol).roots]
    if f.degree < big:
        pts.append(INFINITY)
    return len(cluster_points(pts, R.tol))


# ----------------------------------------------------------------------
# counts from forward critical orbits


def forward_orbit(R: RationalMap, x: SpherePoint, steps: int) -> list[SpherePoint]:
    """``[x, R(x), ..., R^steps(x)]``.

    Once an iterate returns within ``tol`` of an earlier one the orbit is
    continued periodically, so rounding does not accumulate along cycles.
    """
    orbit = [x]
    while len(orbit) <= steps:
        nxt = R.apply(orbit[-1])
        hit = next((i for i, p in enumerate(orbit) if chordal_distance(p, nxt) <= R.tol), None)
        if hit is None:
            orbit.append(nxt)
            continue
        period = len(orbit) - hit
        while len(orbit) <= steps:
            orbit.append(orbit[len(orbit) - period])
    return orbit


def lands_on(R: RationalMap, orbit: Sequence[SpherePoint], j: int, z: SpherePoint) -> bool:
    """Whether ``R^j(orbit[0]) = z``, confirmed by a backward chain.

    A forward iterate near ``z`` is not enough (orbits converging to a
    superattracting point get arbitrarily close without landing), so the
    chain ``z, R^{-1}, ...`` is walked back choosing at each step the
    preimage closest to the forward orbit, and must stay within ``tol``.
    """
    if chordal_distance(orbit[j], z) > R.tol:
        return False
    y = z
    for i in range(j - 1, -1, -1):
        y = min(R.fiber(y).points, key=lambda p: chordal_distance(p, orbit[i]))
        if chordal_distance(y, orbit[i]) > R.tol:
            return False
    return True


def counts_from_critical_orbits(R: RationalMap, z: SpherePoint, depth: int) -> tuple[int, ...]:
    """``b_0..b_depth`` via ``b_{j+1} = N b_j - sum_c (e(c) - 1) [R^{j+1}(c) = z]``.

    Distinct points have disjoint fibers and the fiber of ``y`` has
    ``N - sum (e(x) - 1)`` points, the sum running over critical ``x``
    above ``y``; so only the forward orbits of critical points matter.
    """
    orbits = [(c.branch_index, forward_orbit(R, c.location, depth)) for c in R.critical_points]
    b = [1]
    for j in range(depth):
        lost = sum(e - 1 for e, orb in orbits if lands_on(R, orb, j + 1, z))
        b.append(R.degree * b[-1] - lost)
    return tuple(b)


def extended_counts(
    R: RationalMap, z: SpherePoint, depth: int, enumerate_depth: int | None = None, jobs: int = 1
) -> tuple[int, ...]:
    """``b_0..b_depth``: enumerated levels as far as affordable, then the critical-orbit recurrence.

    The recurrence is checked against the enumeration on the overlap.
    """
    if enumerate_depth is None:
        enumerate_depth = 0
        while enumerate_depth < depth and R.degree ** (enumerate_depth + 1) <= 256:
            enumerate_depth += 1
    enumerate_depth = min(enumerate_depth, depth)
    listed = bseq(R, z, enumerate_depth, jobs)
    via_crit = counts_from_critical_orbits(R, z, depth)
    if tuple(via_crit[: enumerate_depth + 1]) != tuple(listed):
        raise NumericalError(f"enumerated counts {listed} disagree with critical-orbit counts {via_crit}")
    return tuple(listed) + tuple(via_crit[enumerate_depth + 1 :])
