"""Dense univariate polynomials and a simultaneous-iteration root finder.

Coefficients are stored constant term first. ``all_roots`` runs an
Ehrlich-Aberth iteration from a circle of Cauchy-bound radius, polishes
isolated roots with Newton steps and then groups the approximations into
clusters. Two approximations belong to the same cluster when their
inclusion discs overlap or when they are within ``cluster_tol`` in the
chordal metric; the cluster size is the multiplicity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
import numpy as np

from .sphere import DEFAULT_TOL, chordal_affine

DEFAULT_PRECISION = 53
ESCALATED_PRECISION = 128


class RootFindingError(ArithmeticError):
    """The iteration did not converge or produced an unresolvable cluster layout."""

    def __init__(self, message: str, worst_residual: float = math.nan, precision_bits: int = 53):
        super().__init__(message)
        self.worst_residual = worst_residual
        self.precision_bits = precision_bits


class Polynomial:
    """Immutable dense polynomial.

    ``coeffs`` is a numpy array; complex128 for numeric work, object dtype
    when built from Python integers (exact arithmetic, used by the quadratic
    family recursion).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence | np.ndarray = ()):
        arr = np.asarray(coeffs)
        if arr.dtype == object and all(isinstance(c, (int, np.integer)) for c in arr.ravel()):
            arr = np.array([int(c) for c in arr.ravel()], dtype=object)
        elif arr.size == 0:
            arr = np.zeros(0, dtype=complex)
        else:
            arr = arr.astype(complex).ravel()
            if not np.all(np.isfinite(arr)):
                raise ValueError("polynomial coefficients must be finite")
        n = arr.size
        while n > 0 and arr[n - 1] == 0:
            n -= 1
        arr = arr[:n].copy()
        arr.flags.writeable = False
        self.coeffs = arr

    @classmethod
    def exact(cls, coeffs: Sequence[int]) -> "Polynomial":
        return cls(np.array([int(c) for c in coeffs], dtype=object))

    @classmethod
    def from_roots(cls, roots: Sequence[complex], lead: complex = 1.0) -> "Polynomial":
        p = cls([lead])
        for r in roots:
            p = p * cls([-r, 1.0])
        return p

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return self.coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    @property
    def is_exact(self) -> bool:
        return self.coeffs.dtype == object

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs.size else 0

    def numeric(self) -> "Polynomial":
        if not self.is_exact:
            return self
        return Polynomial(np.array([complex(c) for c in self.coeffs], dtype=complex))

    def __call__(self, x):
        return peval(self, x)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs.size == other.coeffs.size and bool(np.all(self.coeffs == other.coeffs))

    def __hash__(self):
        return hash(tuple(self.coeffs.tolist()))

    def __repr__(self) -> str:
        return f"Polynomial({self.coeffs.tolist()!r})"

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, np.integer)) and self.is_exact:
            return Polynomial.exact([other])
        return Polynomial([other])

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        n = max(self.coeffs.size, other.coeffs.size)
        dtype = object if (self.is_exact and other.is_exact) else complex
        out = np.zeros(n, dtype=dtype)
        if dtype is object:
            out[:] = 0
        out[: self.coeffs.size] += self.coeffs
        out[: other.coeffs.size] += other.coeffs
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-self.coeffs)

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            if isinstance(other, (int, np.integer)) and self.is_exact:
                return Polynomial(self.coeffs * int(other))
            return self.scale(other)
        if self.is_zero or other.is_zero:
            return Polynomial()
        if self.is_exact != other.is_exact:
            return self.numeric() * other.numeric()
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.exact([1]) if self.is_exact else Polynomial([1.0])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, s: complex) -> "Polynomial":
        return Polynomial(self.numeric().coeffs * complex(s))

    def derivative(self) -> "Polynomial":
        if self.coeffs.size <= 1:
            return Polynomial.exact([]) if self.is_exact else Polynomial()
        k = np.arange(1, self.coeffs.size)
        if self.is_exact:
            return Polynomial(np.array([int(i) * c for i, c in zip(k, self.coeffs[1:])], dtype=object))
        return Polynomial(self.coeffs[1:] * k)

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """``self(inner(x))`` by Horner's scheme over polynomials."""
        if self.is_zero:
            return Polynomial()
        acc = Polynomial([self.coeffs[-1]]) if not self.is_exact else Polynomial.exact([self.coeffs[-1]])
        for c in self.coeffs[-2::-1]:
            acc = acc * inner + (Polynomial.exact([c]) if self.is_exact else Polynomial([c]))
        return acc

    def trimmed(self, abs_tol: float) -> "Polynomial":
        """Drop leading coefficients with modulus ``<= abs_tol``."""
        c = self.numeric().coeffs
        n = c.size
        while n > 0 and abs(c[n - 1]) <= abs_tol:
            n -= 1
        return Polynomial(c[:n])

    def max_abs_coeff(self) -> float:
        if self.is_zero:
            return 0.0
        return float(max(abs(complex(c)) if not self.is_exact else abs(int(c)) for c in self.coeffs))


def peval(p: Polynomial, x):
    """Horner evaluation; works elementwise on arrays."""
    if p.is_zero:
        return 0 * x
    c = p.coeffs
    acc = c[-1] * (x * 0 + 1)
    for a in c[-2::-1]:
        acc = acc * x + a
    return acc


def derivative(p: Polynomial) -> Polynomial:
    return p.derivative()


def compose(p: Polynomial, q: Polynomial) -> Polynomial:
    return p.compose(q)


def homogeneous_compose(outer: Sequence[Polynomial], degree: int, inner: Sequence[Polynomial]):
    """Substitute the pair ``inner = (A, B)`` into the degree-``degree`` forms ``outer``.

    Each ``P`` in ``outer`` is read as the form ``sum p_k X^k Y^(degree-k)``;
    the result is ``[P(A, B) for P in outer]``.
    """
    a, b = inner
    apow = [Polynomial([1.0])]
    bpow = [Polynomial([1.0])]
    for _ in range(degree):
        apow.append(apow[-1] * a)
        bpow.append(bpow[-1] * b)
    out = []
    for form in outer:
        acc = Polynomial()
        for k, c in enumerate(form.numeric().coeffs):
            if c != 0:
                acc = acc + (apow[k] * bpow[degree - k]).scale(c)
        out.append(acc)
    return out


# --------------------------------------------------------------------------
# root finding


@dataclass
class RootSet:
    """Roots as ``(location, multiplicity)`` pairs sorted by (Re, Im)."""

    roots: list[tuple[complex, int]]
    residual_bound: float
    precision_bits: int = DEFAULT_PRECISION
    iterations: int = 0
    radii: list[float] = field(default_factory=list, repr=False)

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.roots)

    def locations(self) -> list[complex]:
        return [r for r, _ in self.roots]


def cauchy_bound(p: Polynomial) -> float:
    c = np.abs(p.numeric().coeffs)
    return 1.0 + float(np.max(c[:-1]) / c[-1]) if c.size > 1 else 1.0


def horner_state(coeffs: np.ndarray, z: np.ndarray, unit_roundoff: float = 2.0**-53):
    """Evaluate ``p'/p``, ``log|p|`` and a rounding-noise flag at each ``z``.

    For ``|z| > 1`` the reversed polynomial is evaluated at ``1/z``, so high
    degrees cannot overflow. The noise flag is set where ``|p(z)|`` is below
    the running error bound ``2 n u sum |c_k| |z|^k`` of Horner's scheme.
    """
    n = coeffs.size - 1
    absc = np.abs(coeffs)
    az = np.abs(z)
    big = az > 1
    with np.errstate(all="ignore"):
        t = np.where(big, 1 / np.where(big, z, 1), z)
        at = np.abs(t)
        p_s = np.full(z.shape, coeffs[-1], dtype=complex)
        dp_s = np.zeros(z.shape, dtype=complex)
        p_b = np.full(z.shape, coeffs[0], dtype=complex)
        dp_b = np.zeros(z.shape, dtype=complex)
        m_s = np.full(z.shape, absc[-1])
        m_b = np.full(z.shape, absc[0])
        for k in range(n - 1, -1, -1):
            dp_s = dp_s * t + p_s
            p_s = p_s * t + coeffs[k]
            dp_b = dp_b * t + p_b
            p_b = p_b * t + coeffs[n - k]
            m_s = m_s * at + absc[k]
            m_b = m_b * at + absc[n - k]
        p = np.where(big, p_b, p_s)
        dp = np.where(big, dp_b, dp_s)
        mag = np.where(big, m_b, m_s)
        # p(z) = z^n p_rev(1/z)  =>  p'/p = t (n - t p_rev'(t) / p_rev(t))
        ld = np.where(big, (n - t * dp / p) * t, dp / p)
        shift = np.where(big, n * np.log(np.where(big, az, 1.0)), 0.0)
        absp = np.abs(p)
        logp = np.where(absp > 0, np.log(np.where(absp > 0, absp, 1.0)), -np.inf) + shift
        quiet = absp <= 2 * n * unit_roundoff * mag
    return ld, logp, quiet


def _mp_state(coeffs: list, z: np.ndarray, unit_roundoff: float):
    n = len(coeffs) - 1
    absc = [abs(a) for a in coeffs]
    ld = np.empty(z.shape, dtype=object)
    logp = np.empty(z.shape, dtype=float)
    quiet = np.zeros(z.shape, dtype=bool)
    for i, zi in enumerate(z):
        az = abs(zi)
        p, dp, mag = coeffs[-1], mpmath.mpc(0), absc[-1]
        for k in range(n - 1, -1, -1):
            dp = dp * zi + p
            p = p * zi + coeffs[k]
            mag = mag * az + absc[k]
        ap = abs(p)
        ld[i] = dp / p if p != 0 else mpmath.mpc(mpmath.inf)
        logp[i] = float(mpmath.log(ap)) if p != 0 else -math.inf
        quiet[i] = ap <= 2 * n * unit_roundoff * mag
    return ld, logp, quiet


def aberth(evaluate: Callable, z0: np.ndarray, unit_roundoff: float, max_iter: int = 500, chunk: int = 1024):
    """Ehrlich-Aberth simultaneous iteration.

    ``evaluate(z)`` returns ``(p'/p, quiet)`` at the array ``z``. A root
    stops moving once it is quiet, its correction drops below ``4 u |z|``,
    or a correction below ``sqrt(u) |z|`` fails to halve (stalled at the
    evaluation noise floor). Returns ``(roots, iterations, still_active)``.
    """
    z = np.array(z0)
    n = z.size
    active = np.ones(n, dtype=bool)
    prev = np.full(n, np.inf)
    floor = math.sqrt(unit_roundoff)
    it = 0
    for it in range(1, max_iter + 1):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            it -= 1
            break
        zi = z[idx]
        ld, quiet = evaluate(zi)
        s = np.zeros(idx.size, dtype=z.dtype)
        for start in range(0, idx.size, chunk):
            rows = slice(start, start + chunk)
            diff = zi[rows, None] - z[None, :]
            diff[np.arange(diff.shape[0]), idx[rows]] = 1
            with np.errstate(all="ignore"):
                s[rows] = np.sum(1 / diff, axis=1) - 1
        with np.errstate(all="ignore"):
            w = 1 / (ld - s)
        if z.dtype == object:
            finite = np.array([bool(mpmath.isfinite(x)) for x in w], dtype=bool)
        else:
            finite = np.isfinite(w)
        w = np.where(finite, w, 0)
        aw = np.abs(w).astype(float)
        az = np.maximum(np.abs(zi).astype(float), unit_roundoff)
        tiny = aw <= 4 * unit_roundoff * az
        stalled = (aw <= floor * az) & (aw > 0.5 * prev[idx])
        move = ~(np.asarray(quiet, dtype=bool) | tiny | stalled)
        prev[idx] = aw
        z[idx[move]] = zi[move] - w[move]
        active[idx[~move]] = False
    return z, it, active


def initial_guesses(n: int, radius: float) -> np.ndarray:
    theta = 2 * np.pi * np.arange(n) / n + 0.4
    return radius * np.exp(1j * theta)


def _union_find(n: int, pairs) -> list[list[int]]:
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in pairs:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _horner_scalar(c: list, x: complex):
    p, dp = c[-1], 0j
    for a in c[-2::-1]:
        dp = dp * x + p
        p = p * x + a
    return p, dp


def _aberth_small(c: list, z0, u: float, max_iter: int):
    """Scalar Ehrlich-Aberth for low degree, same stopping rules as :func:`aberth`."""
    n = len(c) - 1
    absc = [abs(a) for a in c]
    z = [complex(x) for x in z0]
    active = [True] * n
    it = 0
    for it in range(1, max_iter + 1):
        moved = False
        for i in range(n):
            if not active[i]:
                continue
            zi = z[i]
            az = abs(zi)
            if az > 1:
                t = 1 / zi
                p, dp = _horner_scalar(c[::-1], t)
                mag = 0.0
                for a in absc:
                    mag = mag * abs(t) + a
                quiet = abs(p) <= 2 * n * u * mag
                ld = (n - t * dp / p) * t if p != 0 else None
            else:
                p, dp = _horner_scalar(c, zi)
                mag = 0.0
                for a in reversed(absc):
                    mag = mag * az + a
                quiet = abs(p) <= 2 * n * u * mag
                ld = dp / p if p != 0 else None
            if quiet or ld is None:
                active[i] = False
                continue
            s = 0j
            for j in range(n):
                if j != i:
                    d = zi - z[j]
                    if d != 0:
                        s += 1 / d
            den = ld - s
            if den == 0:
                active[i] = False
                continue
            w = 1 / den
            if abs(w) <= 4 * u * max(az, u):
                active[i] = False
                continue
            z[i] = zi - w
            moved = True
        if not moved:
            break
    z = np.array(z, dtype=complex)
    _, logp, _ = horner_state(np.asarray(c, dtype=complex), z, u)
    return z, logp, it, np.array(active)


def _approximate(c: np.ndarray, precision_bits: int, max_iter: int):
    n = c.size - 1
    z0 = initial_guesses(n, 1.0 + float(np.max(np.abs(c[:-1])) / abs(c[-1])))
    if precision_bits <= 53:
        u = 2.0**-53
        if n <= 16:
            z, logp, iters, active = _aberth_small(c.tolist(), z0, u, max_iter)
        else:
            z, iters, active = aberth(lambda zz: horner_state(c, zz, u)[::2], z0, u, max_iter)
            _, logp, _ = horner_state(c, z, u)
    else:
        u = 2.0**-precision_bits
        with mpmath.workprec(precision_bits):
            coeffs = [mpmath.mpc(complex(a)) for a in c]
            zs = np.array([mpmath.mpc(complex(x)) for x in z0], dtype=object)
            z, iters, active = aberth(lambda zz: _mp_state(coeffs, zz, u)[::2], zs, u, max_iter)
            _, logp, _ = _mp_state(coeffs, z, u)
            z = np.array([complex(x) for x in z], dtype=complex)
    if np.any(active):
        worst = float(np.max(logp[active]))
        raise RootFindingError(
            f"root iteration did not converge in {max_iter} steps at {precision_bits} bits",
            math.exp(min(worst, 700.0)),
            precision_bits,
        )
    return z, logp, iters


def _log_eta(c: np.ndarray, x: np.ndarray, coef_rel_err: float) -> np.ndarray:
    n = c.size - 1
    return math.log(coef_rel_err * float(np.max(np.abs(c)))) + n * np.log(np.maximum(1.0, np.abs(x)))


def cluster_roots(
    c: np.ndarray, z: np.ndarray, logp: np.ndarray, coef_rel_err: float, cluster_tol: float
) -> tuple[list[list[int]], list[float]]:
    """Group root approximations into clusters.

    Approximations within ``cluster_tol`` (chordal) always share a cluster.
    Beyond that, clusters are merged closest-first while their pseudo-zero
    discs overlap. A cluster of ``k`` members centred at ``x`` gets radius
    ``spread + (n (|p(x)| + eta) / (|a_n| prod_{j outside} |x - z_j|))^(1/k)``
    where ``eta`` is the normwise coefficient uncertainty at ``x``.
    """
    n = z.size
    loga = math.log(abs(c[-1]))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if chordal_affine(z[i], z[j]) <= cluster_tol]
    groups = _union_find(n, pairs)
    cnum = Polynomial(c)
    while True:
        centers = np.array([np.mean(z[g]) for g in groups])
        radii = np.empty(len(groups))
        for k, g in enumerate(groups):
            x = centers[k]
            outside = np.ones(n, dtype=bool)
            outside[g] = False
            with np.errstate(divide="ignore"):
                logprod = float(np.sum(np.log(np.abs(x - z[outside]))))
            if len(g) == 1:
                lp = float(logp[g[0]])
            else:
                val = abs(peval(cnum, complex(x)))
                lp = math.log(val) if val > 0 else -math.inf
            le = float(_log_eta(c, np.array([x]), coef_rel_err)[0])
            logr = (math.log(n) + np.logaddexp(lp, le) - loga - logprod) / len(g)
            spread = float(np.max(np.abs(z[g] - x)))
            radii[k] = spread + math.exp(min(logr, 700.0))
        m = len(groups)
        if m == 1:
            return groups, radii.tolist()
        dist = np.abs(centers[:, None] - centers[None, :])
        gap = dist - (radii[:, None] + radii[None, :])
        np.fill_diagonal(gap, np.inf)
        np.fill_diagonal(dist, np.inf)
        overlapping = gap <= 0
        if not overlapping.any():
            return groups, radii.tolist()
        d = np.where(overlapping, dist, np.inf)
        i, j = np.unravel_index(int(np.argmin(d)), d.shape)
        i, j = min(i, j), max(i, j)
        groups[i] = sorted(groups[i] + groups[j])
        del groups[j]


def all_roots(
    p: Polynomial,
    precision_bits: int = DEFAULT_PRECISION,
    cluster_tol: float = DEFAULT_TOL,
    coef_rel_err: float | None = None,
    max_iter: int = 500,
    escalate: bool = True,
) -> RootSet:
    """All complex roots of ``p`` with multiplicities.

    ``coef_rel_err`` is the normwise relative uncertainty assumed for the
    coefficients when deciding which approximations form a cluster
    (default ``8 n 2^-53``). Non-convergence, or two clusters closer than
    ``10 * cluster_tol``, triggers one retry at ``ESCALATED_PRECISION`` bits.
    """
    if p.is_zero:
        raise ValueError("the zero polynomial has no root set")
    if p.degree < 1:
        raise ValueError("all_roots needs degree >= 1")
    if precision_bits < 53:
        raise ValueError("precision_bits must be >= 53")
    try:
        return _all_roots(p, precision_bits, cluster_tol, coef_rel_err, max_iter)
    except RootFindingError:
        if not escalate or precision_bits >= ESCALATED_PRECISION:
            raise
        return _all_roots(p, ESCALATED_PRECISION, cluster_tol, coef_rel_err, max_iter)


def _all_roots(p, precision_bits, cluster_tol, coef_rel_err, max_iter) -> RootSet:
    c = p.numeric().coeffs
    # vanishing low-order coefficients are exact roots at zero
    zero_mult = int(np.argmax(c != 0))
    c = c[zero_mult:]
    n = c.size - 1
    roots: list[tuple[complex, int]] = []
    radii: list[float] = []
    iters = 0
    if n == 1:
        roots.append((complex(-c[0] / c[1]), 1))
        radii.append(0.0)
    elif n >= 2:
        z, logp, iters = _approximate(c, precision_bits, max_iter)
        cre = 8 * n * 2.0**-53 if coef_rel_err is None else coef_rel_err
        groups, rad = cluster_roots(c, z, logp, cre, cluster_tol)
        clist = c.tolist()
        for g, r in zip(groups, rad):
            if len(g) == 1:
                loc = newton_polish(clist, z[g[0]])
            elif chart_mean(z[g]) != complex(np.mean(z[g])):
                loc = chart_mean(z[g])
            else:
                loc = cluster_center(c, z[g], r)
            roots.append((loc, len(g)))
            radii.append(r)
    if zero_mult:
        roots.append((0j, zero_mult))
        radii.append(0.0)
    residual = 0.0
    if n >= 1:
        scale = float(np.max(np.abs(c)))
        clist = c.tolist()
        for loc, _ in roots:
            if abs(loc) <= 1:
                val = abs(_horner_scalar(clist, loc)[0])
            else:
                # p(x) / x^n, evaluated in 1/x so large roots cannot overflow
                val = abs(_horner_scalar(clist[::-1], 1 / loc)[0])
            residual = max(residual, val / scale)
    roots, radii = _merge_close(roots, radii, cluster_tol)
    order = sorted(range(len(roots)), key=lambda k: (roots[k][0].real, roots[k][0].imag))
    roots = [roots[k] for k in order]
    radii = [radii[k] for k in order]
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            d = chordal_affine(roots[i][0], roots[j][0])
            if d <= 10 * cluster_tol:
                raise RootFindingError(
                    f"root clusters {roots[i][0]} and {roots[j][0]} are {d:.3g} apart, "
                    f"need > {10 * cluster_tol:.3g}",
                    residual,
                    precision_bits,
                )
    return RootSet(roots, residual, precision_bits, iters, radii)


def chart_mean(locs, weights=None) -> complex:
    """Weighted mean of chordally close points, taken in the chart where they are close.

    A cluster near infinity can straddle the origin in the affine chart
    (``+-1e22``), where the plain mean lands at 0; there the mean of ``1/z`` is used.
    """
    x = np.asarray(locs, dtype=complex)
    w = np.ones(x.size) if weights is None else np.asarray(weights, dtype=float)
    mean = complex(np.sum(w * x) / np.sum(w))
    big = float(np.max(np.abs(x)))
    if big <= 1 or float(np.max(np.abs(x - mean))) <= 0.5 * big:
        return mean
    inv = complex(np.sum(w / x) / np.sum(w))
    return 1 / inv if inv != 0 else complex(x[int(np.argmax(np.abs(x)))])


def _merge_close(roots, radii, tol):
    """Merge roots within ``tol`` (e.g. a tiny computed root next to an exact zero root)."""
    pairs = [(i, j) for i in range(len(roots)) for j in range(i + 1, len(roots))
             if chordal_affine(roots[i][0], roots[j][0]) <= tol]
    if not pairs:
        return roots, radii
    out, out_r = [], []
    for g in _union_find(len(roots), pairs):
        mult = sum(roots[k][1] for k in g)
        exact = [roots[k][0] for k in g if radii[k] == 0.0 and roots[k][0] == 0]
        loc = exact[0] if exact else chart_mean([roots[k][0] for k in g], [roots[k][1] for k in g])
        out.append((loc, mult))
        out_r.append(max(radii[k] for k in g) + max(abs(roots[k][0] - loc) for k in g))
    return out, out_r


def newton_polish(c: list, z0: complex, steps: int = 2) -> complex:
    """A few Newton steps, each kept only if it lowers ``|p|``."""
    z = complex(z0)
    p, dp = _horner_scalar(c, z)
    best = abs(p)
    for _ in range(steps):
        if dp == 0 or best == 0:
            break
        cand = z - p / dp
        pc, dpc = _horner_scalar(c, cand)
        if not abs(pc) < best:
            break
        z, p, dp, best = cand, pc, dpc, abs(pc)
    return z


def cluster_center(c: np.ndarray, members: np.ndarray, radius: float) -> complex:
    """Location for a cluster of ``m`` approximations.

    An m-fold root is a simple root of the (m-1)-th derivative; Newton on
    that derivative from the centroid is kept if it stays inside the cluster.
    """
    centroid = complex(np.mean(members))
    dm = Polynomial(c)
    for _ in range(members.size - 1):
        dm = dm.derivative()
    z = newton_polish(dm.coeffs.tolist(), centroid, steps=4)
    spread = max(radius, float(np.max(np.abs(members - centroid))))
    return z if abs(z - centroid) <= spread else centroid


def gcd_degree(p: Polynomial, q: Polynomial, tol: float = 1e-8, precision_bits: int = DEFAULT_PRECISION) -> int:
    """Degree of the approximate gcd, found by matching roots within ``tol``."""
    if p.is_zero or q.is_zero:
        raise ValueError("gcd_degree needs nonzero polynomials")
    if p.degree < 1 or q.degree < 1:
        return 0
    remaining = [list(x) for x in all_roots(q, precision_bits).roots]
    total = 0
    for loc, m in all_roots(p, precision_bits).roots:
        cands = [(chordal_affine(loc, lq), k) for k, (lq, mq) in enumerate(remaining) if mq > 0]
        if not cands:
            break
        d, k = min(cands)
        if d <= tol:
            shared = min(m, remaining[k][1])
            total += shared
            remaining[k][1] -= shared
    return total
