"""Transfer operator on finitely supported measures and the KMS-trace sequences.

``F_X(delta_y)`` is the sum of unit point masses on the *distinct* preimages
of ``y``. With ``F_beta = e^{-beta} F_X`` the trace attached to a branched
point ``z`` is ``tau = m sum_k F_beta^k(delta_z)``, normalized to mass one,
and ``c_n = F_beta^n(tau)(1)``. Since ``F_X^n(delta_z)(1) = b_n(z)``, the
counts come back as ``b_n = e^{n beta} (c_n - c_{n+1}) / (1 - c_1)``.

Series are truncated at depth ``K``; because ``b_k <= N^k`` every
truncation carries the tail bound ``(N e^{-beta})^{K+1} / (1 - N e^{-beta})``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .orbit import backward_levels, extended_counts
from .ratmap import NumericalError, RationalMap
from .sphere import DEFAULT_TOL, SpherePoint, chordal_distance, cluster_points

MAX_ATOMS = 1 << 15


class ConvergenceError(ValueError):
    """Parameters outside the region where the defining series converge."""


@dataclass(frozen=True)
class FiniteMeasure:
    """Nonnegative measure with finitely many atoms, canonically ordered."""

    atoms: tuple[tuple[SpherePoint, float], ...]

    @classmethod
    def build(cls, pairs: Iterable[tuple[SpherePoint, float]], tol: float = DEFAULT_TOL) -> "FiniteMeasure":
        pairs = [(p, float(w)) for p, w in pairs]
        if any(w < 0 for _, w in pairs):
            raise ValueError("measure weights must be nonnegative")
        return cls(tuple((p, w) for p, w in merge_atoms(pairs, tol) if w > 0))

    @classmethod
    def dirac(cls, p: SpherePoint, weight: float = 1.0) -> "FiniteMeasure":
        return cls(((p, float(weight)),))

    @property
    def total_mass(self) -> float:
        return math.fsum(w for _, w in self.atoms)

    def weight_at(self, p: SpherePoint, tol: float = DEFAULT_TOL) -> float:
        return math.fsum(w for q, w in self.atoms if chordal_distance(p, q) <= tol)

    def scaled(self, a: float) -> "FiniteMeasure":
        if a < 0:
            raise ValueError("negative scaling")
        return FiniteMeasure(tuple((p, a * w) for p, w in self.atoms if a * w > 0))

    def plus(self, other: "FiniteMeasure", tol: float = DEFAULT_TOL) -> "FiniteMeasure":
        return FiniteMeasure.build(self.atoms + other.atoms, tol)

    def __len__(self) -> int:
        return len(self.atoms)


def merge_atoms(pairs: Sequence[tuple[SpherePoint, float]], tol: float) -> list[tuple[SpherePoint, float]]:
    """Sum weights of atoms within ``tol``; signed weights allowed."""
    pts = [p for p, _ in pairs]
    return [(pts[g[0]], math.fsum(pairs[k][1] for k in g)) for g in cluster_points(pts, tol)]


class _FiberCache:
    def __init__(self, R: RationalMap):
        self.R = R
        self.store: dict[SpherePoint, list[SpherePoint]] = {}

    def __call__(self, y: SpherePoint) -> list[SpherePoint]:
        pts = self.store.get(y)
        if pts is None:
            pts = self.store[y] = self.R.fiber(y).points
        return pts


def pf_apply(R: RationalMap, mu: FiniteMeasure, _fibers: _FiberCache | None = None) -> FiniteMeasure:
    """``F_X(mu)``: every atom spreads its weight to each distinct preimage."""
    fibers = _fibers or _FiberCache(R)
    pairs = [(x, w) for y, w in mu.atoms for x in fibers(y)]
    return FiniteMeasure.build(pairs, R.tol)


def pf_mass_sequence(R: RationalMap, z: SpherePoint, n_max: int) -> list[float]:
    """Total masses of ``F_X^n(delta_z)`` for ``n = 0..n_max``; these are ``b_n(z)``."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    fibers = _FiberCache(R)
    mu = FiniteMeasure.dirac(z)
    out = [mu.total_mass]
    for _ in range(n_max):
        mu = pf_apply(R, mu, fibers)
        out.append(mu.total_mass)
    return out


@dataclass(frozen=True)
class KmsParams:
    beta: float
    z: SpherePoint
    depth: int
    degree: int

    def __post_init__(self):
        if not self.beta > 0:
            raise ConvergenceError("beta must be positive")
        if self.depth < 1:
            raise ConvergenceError("truncation depth must be >= 1")
        if not self.ratio < 1:
            raise ConvergenceError(
                f"N e^-beta = {self.ratio:.6g} >= 1; need beta > log N = {math.log(self.degree):.6g}"
            )

    @classmethod
    def for_map(cls, R: RationalMap, z: SpherePoint, beta: float, depth: int = 40) -> "KmsParams":
        return cls(float(beta), z, int(depth), R.degree)

    @property
    def ratio(self) -> float:
        return self.degree * math.exp(-self.beta)

    @property
    def tail_bound(self) -> float:
        return self.ratio ** (self.depth + 1) / (1 - self.ratio)

    @property
    def within_stated_regime(self) -> bool:
        """Whether ``beta > N``, the regime the trace construction is stated for."""
        return self.beta > self.degree


@dataclass(frozen=True)
class Normalizer:
    m: float
    lower: float
    upper: float
    partial_sum: float
    counts: tuple[int, ...]


def normalizer(R: RationalMap, z: SpherePoint, params: KmsParams, counts: Sequence[int] | None = None) -> Normalizer:
    """``m = (sum_k e^{-k beta} b_k)^{-1}`` truncated at ``K``.

    The exact normalizer lies in ``[1 / (S_K + tail_bound), 1 / S_K]``;
    the bounds are widened by a few ulps to cover rounding in ``S_K``.
    """
    if counts is None or len(counts) < params.depth + 1:
        counts = extended_counts(R, z, params.depth)
    counts = tuple(counts[: params.depth + 1])
    s = math.fsum(math.exp(-k * params.beta) * b for k, b in enumerate(counts))
    slack = 8 * (len(counts) + 1) * 2.0**-53
    return Normalizer(1 / s, (1 - slack) / (s + params.tail_bound), (1 + slack) / s, s, counts)


def kms_trace(R: RationalMap, z: SpherePoint, params: KmsParams, max_atoms: int = MAX_ATOMS) -> FiniteMeasure:
    """Truncated ``tau_{beta,z}``: level ``k`` points carry ``m e^{-k beta}`` each."""
    norm = normalizer(R, z, params)
    if sum(norm.counts) > max_atoms:
        raise ValueError(f"truncated trace needs {sum(norm.counts)} atoms (limit {max_atoms})")
    levels = backward_levels(R, z, params.depth).levels
    pairs = [(x, norm.m * math.exp(-k * params.beta)) for k, lv in enumerate(levels) for x in lv]
    return FiniteMeasure.build(pairs, R.tol)


@dataclass(frozen=True)
class CSequence:
    values: tuple[float, ...]
    measure_values: tuple[float, ...] | None
    m: float
    tail_bound: float
    counts: tuple[int, ...]

    @property
    def route_gap(self) -> float | None:
        if self.measure_values is None:
            return None
        return max(abs(a - b) for a, b in zip(self.values, self.measure_values))


def c_sequence(
    R: RationalMap,
    z: SpherePoint,
    params: KmsParams,
    n_max: int,
    max_atoms: int = MAX_ATOMS,
    counts: Sequence[int] | None = None,
) -> CSequence:
    """``c_0..c_{n_max}`` as ``m sum_{j=n}^{K} e^{-j beta} b_j``.

    When the truncated trace and its images fit in ``max_atoms`` the values
    are also computed as masses of ``F_beta^n(tau)``; those sums run to
    level ``K + n``, so the two routes agree to within ``m * tail_bound``.
    """
    if n_max < 0 or n_max + 1 > params.depth:
        raise ValueError("need 0 <= n_max < K")
    norm = normalizer(R, z, params, counts)
    b, beta, m = norm.counts, params.beta, norm.m
    weights = [math.exp(-j * beta) * b[j] for j in range(params.depth + 1)]
    values = tuple(m * math.fsum(weights[n:]) for n in range(n_max + 1))

    measure_values = None
    if sum(b) + sum(b[-1] * R.degree**k for k in range(1, n_max + 1)) <= max_atoms:
        fibers = _FiberCache(R)
        mu = kms_trace(R, z, params, max_atoms)
        measure_values = [mu.total_mass]
        damp = math.exp(-beta)
        for _ in range(n_max):
            mu = pf_apply(R, mu, fibers).scaled(damp)
            measure_values.append(mu.total_mass)
        gap = max(abs(a - c) for a, c in zip(values, measure_values))
        if gap > m * params.tail_bound * (1 + 1e-9) + 1e-14:
            raise NumericalError(f"c-sequence routes differ by {gap:.3g} > m * tail_bound")
        measure_values = tuple(measure_values)
    return CSequence(values, measure_values, m, params.tail_bound, b)


@dataclass(frozen=True)
class Recovery:
    counts: tuple[int, ...]
    raw: tuple[float, ...]

    @property
    def residuals(self) -> tuple[float, ...]:
        return tuple(abs(r - b) for r, b in zip(self.raw, self.counts))

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)


def recover_bseq(c: Sequence[float], beta: float) -> Recovery:
    """``b_n = round(e^{n beta} (c_n - c_{n+1}) / (1 - c_1))`` for ``n = 0..len(c) - 2``."""
    if len(c) < 2:
        raise ValueError("need at least c_0 and c_1")
    denom = 1 - c[1]
    if not denom > 0:
        raise ConvergenceError(f"1 - c_1 = {denom:.3g} is not positive; parameters do not converge")
    raw = tuple(math.exp(n * beta) * (c[n] - c[n + 1]) / denom for n in range(len(c) - 1))
    return Recovery(tuple(int(round(r)) for r in raw), raw)


def recover_bseq_uncorrected(c: Sequence[float]) -> tuple[float, ...]:
    """``(c_n - c_{n+1}) / (1 - c_1)`` without the ``e^{n beta}`` factor, for comparison.

    This equals ``e^{-n beta} b_n``, so it reproduces the counts only at ``n = 0``.
    """
    denom = 1 - c[1]
    return tuple((c[n] - c[n + 1]) / denom for n in range(len(c) - 1))


@dataclass(frozen=True)
class TelescopingReport:
    weight_at_z: float
    m: float
    tail_bound: float
    max_other: float
    other_bound: float
    residual: tuple[tuple[SpherePoint, float], ...]

    @property
    def passed(self) -> bool:
        return abs(self.weight_at_z - self.m) <= self.m * self.tail_bound and self.max_other <= self.other_bound


def telescoping(R: RationalMap, z: SpherePoint, params: KmsParams, max_atoms: int = MAX_ATOMS) -> TelescopingReport:
    """Signed measure ``tau - F_beta(tau)`` for the truncated trace.

    Exactly, it is ``m delta_z - m e^{-(K+1) beta}`` times the level ``K+1``
    counting measure; the atom at ``z`` must be ``m`` within ``m * tail_bound``
    and every other atom is bounded by ``m e^{-(K+1) beta}``.
    """
    tau = kms_trace(R, z, params, max_atoms)
    norm = normalizer(R, z, params)
    image = pf_apply(R, tau).scaled(math.exp(-params.beta))
    signed = merge_atoms(list(tau.atoms) + [(p, -w) for p, w in image.atoms], R.tol)
    at_z = math.fsum(w for p, w in signed if chordal_distance(p, z) <= R.tol)
    others = [abs(w) for p, w in signed if chordal_distance(p, z) > R.tol]
    bound = norm.m * math.exp(-(params.depth + 1) * params.beta) + 64 * 2.0**-53
    return TelescopingReport(at_z, norm.m, params.tail_bound, max(others, default=0.0), bound, tuple(signed))
