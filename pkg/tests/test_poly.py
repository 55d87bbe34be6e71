import math

import numpy as np
import pytest

from backorbit.poly import (
    ESCALATED_PRECISION,
    Polynomial,
    RootFindingError,
    all_roots,
    cauchy_bound,
    gcd_degree,
    homogeneous_compose,
)


def test_arithmetic():
    p = Polynomial([1, 1])
    assert (p * p).coeffs.tolist() == [1, 2, 1]
    assert (p - p).is_zero
    assert (p**3).degree == 3
    assert Polynomial([1, 2, 3]).derivative().coeffs.tolist() == [2, 6]
    assert Polynomial([0, 0, 1]).compose(Polynomial([1, 1])).coeffs.tolist() == [1, 2, 1]
    assert Polynomial([1, 0, 0]).degree == 0


def test_exact_polynomials_stay_integral():
    x = Polynomial.exact([0, 1])
    f = x * Polynomial.exact([1, 1]) ** 2 + Polynomial.exact([1])
    assert f.is_exact
    assert [int(c) for c in f.coeffs] == [1, 1, 2, 1]


def test_homogeneous_compose_matches_direct():
    p, q = Polynomial([1, 0, 1]), Polynomial([0, 2])
    a, b = Polynomial([1, 1]), Polynomial([2, -1])
    u, v = homogeneous_compose([p, q], 2, [a, b])
    for x in (0.3, -1.2 + 0.5j, 2j):
        t = a(x) / b(x)
        assert abs(u(x) / v(x) - p(t) / q(t)) < 1e-12


def test_triple_root():
    rs = all_roots(Polynomial.from_roots([1, 1, 1]))
    assert len(rs.roots) == 1
    assert rs.roots[0][1] == 3
    assert abs(rs.roots[0][0] - 1) < 1e-10


def test_mixed_multiplicities_both_precisions():
    p = Polynomial.from_roots([2, -1j, -1j, 0.5, 0.5, 0.5])
    for bits in (53, ESCALATED_PRECISION):
        rs = all_roots(p, precision_bits=bits)
        got = sorted((m, round(r.real, 6), round(r.imag, 6)) for r, m in rs.roots)
        assert got == [(1, 2.0, 0.0), (2, 0.0, -1.0), (3, 0.5, 0.0)]


def test_zero_roots_exact():
    rs = all_roots(Polynomial([0, 0, -1, 1]))
    assert rs.roots[0] == (0j, 2)
    assert abs(rs.roots[1][0] - 1) < 1e-15


def test_cubic_family_root():
    rs = all_roots(Polynomial([1, 1, 2, 1]))
    real = [r for r, _ in rs.roots if abs(r.imag) < 1e-12]
    assert len(real) == 1
    assert abs(real[0].real - (-1.754877666246692760)) < 1e-14


def test_random_reconstruction():
    rng = np.random.default_rng(1)
    for deg in (5, 20, 40):
        roots = rng.normal(size=deg) + 1j * rng.normal(size=deg)
        p = Polynomial.from_roots(roots)
        rs = all_roots(p)
        assert rs.total_multiplicity == deg
        q = Polynomial.from_roots([r for r, m in rs.roots for _ in range(m)])
        assert np.max(np.abs(q.coeffs - p.coeffs)) <= 1e-8 * p.max_abs_coeff()


def test_cauchy_bound_contains_roots():
    p = Polynomial([6, -5, 1])
    assert cauchy_bound(p) >= 3


def test_gcd_degree():
    a = Polynomial.from_roots([1, 2])
    assert gcd_degree(a, Polynomial.from_roots([2, 3])) == 1
    assert gcd_degree(a, Polynomial.from_roots([3j])) == 0
    assert gcd_degree(Polynomial.from_roots([1, 1]), Polynomial.from_roots([1, 5])) == 1


def test_bad_inputs():
    with pytest.raises(ValueError):
        all_roots(Polynomial())
    with pytest.raises(ValueError):
        all_roots(Polynomial([3]))
    with pytest.raises(ValueError):
        all_roots(Polynomial([1, 1]), precision_bits=24)
    assert issubclass(RootFindingError, ArithmeticError)
    assert math.isfinite(all_roots(Polynomial([1, 1])).residual_bound)


def test_merged_cluster_near_infinity_stays_near_infinity():
    # roots +-c^(-1/2) are chordally indistinguishable; their affine mean would be 0
    rs = all_roots(Polynomial([1, 0, 3.5e-44j]))
    assert rs.total_multiplicity == 2
    assert all(abs(loc) > 1e20 for loc, _ in rs.roots)
