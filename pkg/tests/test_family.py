import pytest

from backorbit.family import (
    MAX_M,
    f_polynomial,
    f_value,
    family_bseq,
    solve_cm,
    verify_critical_orbit,
)

# minimum real roots of f_m, from exact real-root isolation (sympy) at 25 digits
C_REF = {
    2: -1.0,
    3: -1.754877666246692760049509,
    4: -1.940799806529484752232091,
    5: -1.985424253054205310609751,
    6: -1.996376137711193750644880,
    7: -1.999095682327018473210630,
}
# number of distinct real roots of f_m
REAL_COUNT = {2: 1, 3: 1, 4: 3, 5: 3, 6: 7, 7: 9}


def coeffs(m):
    return [int(c) for c in f_polynomial(m).coeffs]


def test_f_polynomial_examples():
    assert coeffs(1) == [1]
    assert coeffs(2) == [1, 1]
    assert coeffs(3) == [1, 1, 2, 1]
    assert coeffs(4) == [1, 1, 2, 5, 6, 6, 4, 1]
    for m in range(1, 10):
        assert f_polynomial(m).degree == 2 ** (m - 1) - 1


def test_f_polynomial_guard():
    with pytest.raises(ValueError):
        f_polynomial(0)
    with pytest.raises(ValueError):
        f_polynomial(MAX_M + 1)


def test_recursion_matches_expansion():
    for m in range(1, 7):
        for x in (-1.3, 0.4, 0.2 + 0.5j):
            assert abs(f_value(m, x) - f_polynomial(m)(x)) <= 1e-9 * max(1, abs(f_value(m, x)))


@pytest.mark.parametrize("m", sorted(C_REF))
def test_solve_cm_against_reference(m):
    par = solve_cm(m)
    assert abs(par.c_m - C_REF[m]) <= 1e-12
    assert par.bracket[0] <= C_REF[m] <= par.bracket[1]
    assert par.bracket_width <= 1e-12
    assert len(par.real_roots) == REAL_COUNT[m]


def test_c2_exact():
    assert solve_cm(2).c_m == -1.0


def test_next_polynomial_is_one_at_cm():
    for m in range(2, 6):
        assert abs(f_value(m + 1, solve_cm(m).c_m) - 1) <= 1e-12


def test_parameters_decrease_and_stay_in_window():
    cs = [solve_cm(m) for m in range(2, 9)]
    for a, b in zip(cs, cs[1:]):
        assert b.bracket[1] < a.bracket[0]
    assert all(-2 < p.c_m <= -1 for p in cs)


def test_earlier_polynomials_do_not_vanish():
    for m in range(3, 9):
        c = solve_cm(m).c_m
        for k in range(1, m):
            assert abs(f_value(k, c)) > 1e-6


def test_critical_orbit_examples():
    rep = verify_critical_orbit(2)
    assert rep.orbit == (0.0, -1.0, 0.0)
    rep = verify_critical_orbit(3)
    c = solve_cm(3).c_m
    assert rep.orbit[1] == c
    assert abs(rep.orbit[2] - (c * c + c)) < 1e-15
    assert rep.passed
    for m in range(4, 10):
        assert verify_critical_orbit(m).passed


def test_family_bseq_examples():
    assert family_bseq(2) == (1, 2, 3, 6)
    assert family_bseq(3, 4) == (1, 2, 4, 7, 14)
    assert family_bseq(4)[:5] == (1, 2, 4, 8, 15)
    with pytest.raises(ValueError):
        family_bseq(3, 3)
