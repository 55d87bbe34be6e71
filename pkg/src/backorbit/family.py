"""Real quadratic family ``z^2 + c_m`` whose critical point 0 has exact period ``m``.

``f_1 = 1`` and ``f_{k+1}(x) = x f_k(x)^2 + 1``. The orbit of 0 under
``z^2 + c`` is ``g_n(c) = c f_n(c)``, so the real roots of ``f_m`` are
parameters with ``R^m(0) = 0``; ``c_m`` is the smallest one.

The expanded ``f_m`` is badly conditioned near ``-2`` (Horner noise reaches
``1e-4`` at ``m = 6``), so every numerical evaluation goes through the
recursion instead. Coefficients are kept as exact integers for reporting
and for the constant-term identity check.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .orbit import bseq
from .poly import ESCALATED_PRECISION, Polynomial, aberth, initial_guesses
from .ratmap import NumericalError, RationalMap
from .sphere import point

MAX_M = 13
BRACKET_WIDTH = 1e-12
REAL_TOL = 1e-6
RETURN_TOL = 1e-8
AVOID_TOL = 1e-4
IDENTITY_TOL = 1e-10
# parameters with a periodic critical point of period >= 2 lie here
WINDOW = (-2.0, -1.0)

_IV_LOCK = threading.Lock()


@lru_cache(maxsize=None)
def f_polynomial(m: int) -> Polynomial:
    """Exact integer polynomial ``f_m``, of degree ``2^(m-1) - 1``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m > MAX_M:
        raise ValueError(f"m = {m} exceeds the cap {MAX_M} (degree {2 ** (m - 1) - 1} > {2 ** (MAX_M - 1) - 1})")
    f = Polynomial.exact([1])
    x = Polynomial.exact([0, 1])
    for _ in range(m - 1):
        f = x * f * f + Polynomial.exact([1])
    return f


def f_value(m: int, x):
    """``f_m(x)`` by the recursion; works for floats, mpmath numbers and intervals."""
    f = x * 0 + 1
    for _ in range(m - 1):
        f = x * f * f + 1
    return f


def _log_derivative(m: int):
    """Evaluator of ``f_m'/f_m`` in reciprocal form, safe against overflow.

    With ``r_k = 1/f_k`` and ``L_k = f_k'/f_k``:
    ``L_{k+1} = (1 + 2x L_k) / (x + r_k^2)`` and ``r_{k+1} = r_k^2 / (x + r_k^2)``.
    """

    def evaluate(x):
        r = x * 0 + 1
        ld = x * 0
        with np.errstate(all="ignore"):
            for _ in range(m - 1):
                d = x + r * r
                ld = (1 + 2 * x * ld) / d
                r = r * r / d
        return ld, np.zeros(len(x), dtype=bool)

    return evaluate


@dataclass(frozen=True)
class FamilyParameter:
    m: int
    f_m: Polynomial
    c_m: float
    residual: float
    bracket: tuple[float, float]
    real_roots: tuple[float, ...]

    @property
    def bracket_width(self) -> float:
        return self.bracket[1] - self.bracket[0]


def _complex_roots(m: int, bits: int) -> np.ndarray:
    n = 2 ** (m - 1) - 1
    z0 = initial_guesses(n, 2.5)
    if bits <= 53:
        z, _, active = aberth(_log_derivative(m), z0, 2.0**-53, max_iter=2000)
    else:
        with mpmath.workprec(bits):
            z0 = np.array([mpmath.mpc(complex(v)) for v in z0], dtype=object)
            z, _, active = aberth(_log_derivative(m), z0, 2.0 ** (-bits), max_iter=2000)
            z = np.array([complex(v) for v in z])
    if active.any():
        raise NumericalError(f"root iteration for f_{m} did not settle at {bits} bits")
    return z


def _sign(m: int, x: float, prec: int = 200) -> int:
    """Certified sign of ``f_m(x)`` at a binary64 point; 0 when not decidable."""
    with _IV_LOCK:
        saved = mpmath.iv.prec
        mpmath.iv.prec = prec
        try:
            v = f_value(m, mpmath.iv.mpf(x))
        finally:
            mpmath.iv.prec = saved
    if v.a > 0:
        return 1
    if v.b < 0:
        return -1
    return 0


def _bisect(m: int, lo: float, hi: float, slo: int) -> tuple[float, float]:
    with mpmath.workprec(160):
        a, b = mpmath.mpf(lo), mpmath.mpf(hi)
        while b - a > BRACKET_WIDTH / 4:
            mid = (a + b) / 2
            v = f_value(m, mid)
            if v == 0:
                return float(mid), float(mid)
            if (v > 0) == (slo > 0):
                a = mid
            else:
                b = mid
        return math.nextafter(float(a), -math.inf), math.nextafter(float(b), math.inf)


def _bracket(m: int, x: float, spacing: float) -> tuple[float, float] | None:
    """Sign-changing bracket of width <= 1e-12 around the approximate root ``x``."""
    step = 1e-14
    limit = spacing / 3
    while step <= limit:
        lo, hi = x - step, x + step
        slo, shi = _sign(m, lo), _sign(m, hi)
        if slo and shi and slo != shi:
            lo, hi = _bisect(m, lo, hi, slo)
            if lo == hi:
                return lo, hi
            if _sign(m, lo) == slo and _sign(m, hi) == shi:
                return lo, hi
            return None
        step *= 4
    return None


def _solve(m: int, bits: int) -> FamilyParameter:
    f = f_polynomial(m)
    if m == 2:
        return FamilyParameter(2, f, -1.0, 0.0, (-1.0, -1.0), (-1.0,))
    z = _complex_roots(m, bits)
    near_real = sorted((float(v.real), k) for k, v in enumerate(z) if abs(v.imag) < REAL_TOL)
    brackets = []
    for x, k in near_real:
        spacing = float(np.min(np.abs(np.delete(z, k) - x), initial=1.0))
        br = _bracket(m, x, spacing)
        if br is None:
            raise NumericalError(f"no certified sign change of f_{m} near {x!r}")
        brackets.append(br)
    if not brackets:
        raise NumericalError(f"no real root of f_{m} found")
    lo, hi = brackets[0]
    c = (lo + hi) / 2
    with mpmath.workprec(160):
        residual = float(abs(f_value(m, mpmath.mpf(c))))
    return FamilyParameter(m, f, c, residual, (lo, hi), tuple((a + b) / 2 for a, b in brackets))


@lru_cache(maxsize=None)
def solve_cm(m: int) -> FamilyParameter:
    """Smallest real root of ``f_m`` with a certified bracket.

    Every approximately real root gets a bracket whose endpoint signs are
    checked in interval arithmetic; the smallest such root is ``c_m``.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    f_polynomial(m)
    try:
        par = _solve(m, 53)
    except NumericalError:
        par = _solve(m, ESCALATED_PRECISION)
    if not WINDOW[0] < par.c_m <= WINDOW[1]:
        par = _solve(m, ESCALATED_PRECISION)
        if not WINDOW[0] < par.c_m <= WINDOW[1]:
            raise NumericalError(f"c_{m} = {par.c_m!r} outside {WINDOW}")
    return par


def family_map(m: int, **kw) -> RationalMap:
    return RationalMap.from_coefficients([solve_cm(m).c_m, 0.0, 1.0], label=f"z^2+c_{m}", **kw)


@dataclass(frozen=True)
class CriticalOrbitReport:
    m: int
    c: float
    orbit: tuple[float, ...]
    return_residual: float
    min_intermediate: float
    identity_gap: float
    precision_bits: int

    @property
    def passed(self) -> bool:
        return (
            self.return_residual <= RETURN_TOL
            and self.min_intermediate >= AVOID_TOL
            and self.identity_gap <= IDENTITY_TOL
        )


def _refine(m: int, bits: int):
    """``c_m`` to about ``bits`` bits by bisecting inside the certified bracket."""
    par = solve_cm(m)
    lo, hi = par.bracket
    with mpmath.workprec(bits + 20):
        a, b = mpmath.mpf(lo), mpmath.mpf(hi)
        sa = mpmath.sign(f_value(m, a))
        for _ in range(bits + 10):
            mid = (a + b) / 2
            v = f_value(m, mid)
            if v == 0:
                return mid
            if mpmath.sign(v) == sa:
                a = mid
            else:
                b = mid
        return (a + b) / 2


def _orbit_report(m: int, bits: int) -> CriticalOrbitReport:
    f_coeffs = [f_polynomial(n).coeffs for n in range(1, m + 1)]
    with mpmath.workprec(max(bits, 113)):
        if bits <= 53:
            c = solve_cm(m).c_m
            orbit = [0.0]
            for _ in range(m):
                orbit.append(orbit[-1] ** 2 + c)
        else:
            c = _refine(m, bits)
            orbit = [mpmath.mpf(0)]
            for _ in range(m):
                orbit.append(orbit[-1] ** 2 + c)
        cm = mpmath.mpf(c)
    gap = 0.0
    for n in range(1, m + 1):
        coeffs = f_coeffs[n - 1]
        # cancellation in the expanded form costs about log2(sum |a| 2^k) bits
        lost = int(sum(abs(int(a)) << k for k, a in enumerate(coeffs))).bit_length()
        with mpmath.workprec(max(bits, 113) + lost):
            x = mpmath.mpf(cm)
            fn = mpmath.mpf(0)
            for a in coeffs[::-1]:
                fn = fn * x + int(a)
            gap = max(gap, float(abs(orbit[n] - x * fn)))
    return CriticalOrbitReport(
        m,
        float(c),
        tuple(float(v) for v in orbit),
        float(abs(orbit[m])),
        min(float(abs(v)) for v in orbit[1:m]),
        gap,
        bits,
    )


def verify_critical_orbit(m: int) -> CriticalOrbitReport:
    """Forward orbit of 0 under ``z^2 + c_m``: returns to 0 at step ``m`` and not before.

    Also compares ``g_n(c) = R^n(0)`` with ``c f_n(c)`` from the expanded
    coefficients. A failed check is retried once at higher precision.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    rep = _orbit_report(m, 53)
    if not rep.passed:
        rep = _orbit_report(m, ESCALATED_PRECISION)
    return rep


def family_bseq(m: int, depth: int | None = None, jobs: int = 1) -> tuple[int, ...]:
    """``b_n(0)`` for ``z^2 + c_m``: ``2^k`` for ``k < m``, then ``2^m - 1`` at ``k = m``."""
    if m < 2:
        raise ValueError("m must be >= 2")
    depth = m + 1 if depth is None else depth
    if depth < m + 1:
        raise ValueError("depth must be >= m + 1")
    b = bseq(family_map(m), point(0), depth, jobs)
    expected = [2**k for k in range(m)] + [2**m - 1]
    if list(b[: m + 1]) != expected:
        raise NumericalError(f"b(0) for z^2+c_{m} starts {b[: m + 1]}, expected {tuple(expected)}")
    return b
