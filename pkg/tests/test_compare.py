import pytest

from backorbit.compare import DISTINGUISHED, EQUAL, compare, invariant
from backorbit.family import family_map
from backorbit.parse import parse_map
from helpers import conjugate


def seqs(inv):
    return {e.point.to_text(): e.counts for e in inv.entries}


def test_invariant_examples():
    assert seqs(invariant(parse_map("z^2"), 4)) == {"0+0i": (1,) * 5, "inf": (1,) * 5}
    assert seqs(invariant(parse_map("z^2+1"), 4)) == {"0+0i": (1, 2, 4, 8, 16), "inf": (1,) * 5}
    assert seqs(invariant(parse_map("z^2-1"), 4)) == {"0+0i": (1, 2, 3, 6, 11), "inf": (1,) * 5}


def test_distinguishing_example():
    v = compare(invariant(parse_map("z^2+1"), 3), invariant(parse_map("z^2-1"), 3))
    assert v.verdict == DISTINGUISHED
    assert v.witness.sequence == (1, 2, 4, 8)
    assert v.witness.candidate == (1, 2, 3, 6)
    assert v.witness.first_difference == 2


def test_reflexive_and_symmetric():
    a, b = invariant(parse_map("z^2-1"), 4), invariant(family_map(3), 4)
    assert compare(a, a).verdict == EQUAL
    assert compare(a, b).verdict == compare(b, a).verdict == DISTINGUISHED


def test_translation_conjugate():
    z2 = parse_map("z^2")
    q = parse_map("z^2-2*z+2")
    assert compare(invariant(z2, 4), invariant(q, 4)).verdict == EQUAL
    assert compare(invariant(z2, 4), invariant(conjugate(z2, 1, 1, 0, 1), 4)).verdict == EQUAL


def test_set_and_multiset_can_disagree():
    # z^2 has the sequence of ones twice; a map with one such point and one generic point differs as a multiset
    a = invariant(parse_map("z^2"), 3)
    b = invariant(parse_map("z^2+1"), 3)
    v = compare(a, b)
    assert v.verdict == DISTINGUISHED and v.set_verdict == DISTINGUISHED

    from backorbit.compare import InvariantEntry, OrbitInvariant

    e = a.entries[0]
    single = OrbitInvariant("one", (e,), 3)
    v = compare(a, single)
    assert v.verdict == DISTINGUISHED
    assert v.set_verdict == EQUAL
    assert v.set_multiset_disagree
    assert isinstance(e, InvariantEntry)


def test_depth_mismatch():
    with pytest.raises(ValueError):
        compare(invariant(parse_map("z^2"), 3), invariant(parse_map("z^2"), 4))
    with pytest.raises(ValueError):
        invariant(parse_map("z^2"), 0)
