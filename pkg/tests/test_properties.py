"""Cheap seeded properties; the heavy 500-case suites live in ``properties.py``."""

import math

from hypothesis import given, settings
from hypothesis import strategies as st

from backorbit.compare import compare, invariant
from backorbit.parse import format_map, parse_map, parse_point
from backorbit.ratmap import RationalMap
from backorbit.sphere import chordal_distance, format_point, normalize, point

coord = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
unit = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
# moderate scale factors, so z * s cannot underflow to [0 : 0]
scales = st.builds(complex, unit, unit).filter(lambda c: abs(c) > 1e-3)


@settings(max_examples=200)
@given(st.builds(complex, coord, coord), st.builds(complex, coord, coord), scales)
def test_normalize_is_projective(z, w, s):
    if z == 0 and w == 0:
        return
    p, q = normalize(z, w), normalize(z * s, w * s)
    assert chordal_distance(p, q) <= 1e-12
    # the real, positive component is the larger one (up to rounding at ties)
    lead, other = (p.w, p.z) if p.w.imag == 0 and p.w.real > 0 else (p.z, p.w)
    assert lead.imag == 0 and lead.real > 0
    assert abs(lead) >= abs(other) * (1 - 1e-15)
    assert abs(math.hypot(abs(p.z), abs(p.w)) - 1) <= 1e-15


@settings(max_examples=200)
@given(st.builds(complex, coord, coord))
def test_point_text_round_trip(a):
    p = point(a)
    assert parse_point(format_point(p)).affine() == p.affine()


@settings(max_examples=100)
@given(st.lists(st.builds(complex, unit, unit), min_size=3, max_size=3).filter(lambda c: abs(c[2]) > 0.1))
def test_map_text_round_trip(coeffs):
    R = RationalMap.from_coefficients(coeffs)
    S = parse_map(format_map(R))
    assert S.p.coeffs.tolist() == R.p.coeffs.tolist()
    assert S.q.coeffs.tolist() == R.q.coeffs.tolist()


@settings(max_examples=50)
@given(st.builds(complex, unit, unit), st.builds(complex, unit, unit))
def test_compare_is_reflexive_and_symmetric(c, d):
    a = invariant(RationalMap.from_coefficients([c, 0, 1]), 3)
    b = invariant(RationalMap.from_coefficients([d, 0, 1]), 3)
    assert compare(a, a).equal
    assert compare(a, b).verdict == compare(b, a).verdict
