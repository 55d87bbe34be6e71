import pytest

from backorbit.family import family_map
from backorbit.orbit import (
    backward_levels,
    bseq,
    bseq_closed_form_check,
    closed_form_b,
    counts_from_critical_orbits,
    extended_counts,
    is_exceptional,
    oracle_bn,
)
from backorbit.parse import parse_map
from backorbit.sphere import INFINITY, ZERO, point


def test_backward_level_examples():
    assert bseq(parse_map("z^2+1"), ZERO, 5) == (1, 2, 4, 8, 16, 32)
    assert bseq(parse_map("z^2-1"), ZERO, 4) == (1, 2, 3, 6, 11)
    assert bseq(parse_map("z^2"), INFINITY, 4) == (1, 1, 1, 1, 1)
    assert bseq(family_map(3), ZERO, 4) == (1, 2, 4, 7, 14)


def test_levels_structure():
    lv = backward_levels(parse_map("z^2-1"), ZERO, 2)
    want = [[0], [-1, 1], [-2**0.5, 0, 2**0.5]]
    got = [[p.affine() for p in level] for level in lv.levels]
    assert [len(x) for x in got] == [1, 2, 3]
    for g, w in zip(got, want):
        assert all(abs(a - b) <= 1e-15 for a, b in zip(g, w))
    assert lv.depth == 2


def test_closed_form():
    assert closed_form_b(0) == 1
    assert closed_form_b(6) == 43
    rep = bseq_closed_form_check(4)
    assert rep["passed"] and rep["computed"] == [1, 2, 3, 6, 11]


def test_oracle_examples():
    assert oracle_bn(parse_map("z^2-1"), ZERO, 3) == 6
    assert oracle_bn(parse_map("z^2"), ZERO, 3) == 1
    assert oracle_bn(parse_map("z^2+1"), ZERO, 3) == 8
    with pytest.raises(ValueError):
        oracle_bn(parse_map("z^2+1"), ZERO, 14)


def test_exceptional_examples():
    r = is_exceptional(parse_map("z^2"), ZERO)
    assert r.exceptional and [p.to_text() for p in r.orbit] == ["0+0i"]
    assert is_exceptional(parse_map("z^2+1"), INFINITY).exceptional
    r = is_exceptional(parse_map("z^2+1"), ZERO)
    assert not r.exceptional and r.witness_level == 1 and r.witness_count == 2
    r = is_exceptional(parse_map("1/z^2"), ZERO)
    assert r.exceptional and len(r.orbit) == 2


def test_jobs_do_not_change_levels():
    R = parse_map("z^2-0.4+0.3i")
    assert backward_levels(R, point(0.2), 7, jobs=1) == backward_levels(R, point(0.2), 7, jobs=4)


def test_critical_orbit_recurrence_matches_enumeration():
    for R, z in [(parse_map("z^2-1"), ZERO), (family_map(4), ZERO), (parse_map("z^3-3*z"), point(1))]:
        assert counts_from_critical_orbits(R, z, 5) == bseq(R, z, 5)


def test_extended_counts_closed_form():
    b = extended_counts(parse_map("z^2-1"), ZERO, 30)
    assert list(b) == [closed_form_b(k) for k in range(31)]


def test_superattracting_orbit_is_not_a_hit():
    # the orbit of 0 under z^2+1 tends to infinity without landing there
    assert extended_counts(parse_map("z^2+1"), INFINITY, 25) == (1,) * 26


def test_depth_validation():
    with pytest.raises(ValueError):
        backward_levels(parse_map("z^2"), ZERO, -1)
