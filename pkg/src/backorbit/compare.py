"""Truncated backward-orbit invariants of rational maps and their comparison.

The invariant of ``R`` is the collection of sequences ``b(z)`` over its
critical points. Two collections are compared both as multisets (one
sequence per critical point) and as sets; the verdict uses the multiset.
Equality of truncations is exact integer equality.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .orbit import DEFAULT_DEPTH, bseq
from .ratmap import RationalMap
from .sphere import SpherePoint

EQUAL = "EQUAL"
DISTINGUISHED = "DISTINGUISHED"


@dataclass(frozen=True)
class InvariantEntry:
    point: SpherePoint
    branch_index: int
    counts: tuple[int, ...]


@dataclass(frozen=True)
class OrbitInvariant:
    map_label: str
    entries: tuple[InvariantEntry, ...]
    depth: int

    def __post_init__(self):
        if any(len(e.counts) != self.depth + 1 for e in self.entries):
            raise ValueError("all sequences must be truncated at the invariant's depth")

    @property
    def sequences(self) -> list[tuple[int, ...]]:
        return sorted(e.counts for e in self.entries)

    @property
    def sequence_set(self) -> list[tuple[int, ...]]:
        return sorted(set(self.sequences))


def invariant(R: RationalMap, depth: int = DEFAULT_DEPTH, jobs: int = 1) -> OrbitInvariant:
    """``b_0..b_depth`` at every critical point of ``R``."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    entries = tuple(
        InvariantEntry(c.location, c.branch_index, tuple(bseq(R, c.location, depth, jobs)))
        for c in R.critical_points
    )
    return OrbitInvariant(R.label or repr(R), entries, depth)


@dataclass(frozen=True)
class Witness:
    side: str
    sequence: tuple[int, ...]
    candidate: tuple[int, ...] | None
    first_difference: int | None


@dataclass(frozen=True)
class Verdict:
    verdict: str
    matching: tuple[tuple[int, int], ...]
    witness: Witness | None
    set_verdict: str
    depth: int

    @property
    def equal(self) -> bool:
        return self.verdict == EQUAL

    @property
    def set_multiset_disagree(self) -> bool:
        return self.verdict != self.set_verdict


def _first_difference(a: Sequence[int], b: Sequence[int]) -> int:
    return next((k for k, (x, y) in enumerate(zip(a, b)) if x != y), min(len(a), len(b)))


def _best_candidate(seq, pool):
    """Candidate agreeing with ``seq`` on the longest prefix (ties: smallest)."""
    if not pool:
        return None, None
    best = min(sorted(set(pool)), key=lambda c: -_first_difference(seq, c))
    return best, _first_difference(seq, best)


def compare(inv_a: OrbitInvariant, inv_b: OrbitInvariant) -> Verdict:
    """Match sequences of ``inv_a`` and ``inv_b`` one-to-one under exact equality.

    Equal sequences are interchangeable, so a maximum matching pairs each
    distinct sequence ``min(count_a, count_b)`` times. When some sequence is
    left over the verdict is DISTINGUISHED, with the first leftover (from
    side ``a`` if any) and the first index where it departs from the
    closest unmatched sequence of the other side.
    """
    if inv_a.depth != inv_b.depth:
        raise ValueError(f"depth mismatch: {inv_a.depth} vs {inv_b.depth}")
    seq_a = [e.counts for e in inv_a.entries]
    seq_b = [e.counts for e in inv_b.entries]
    free_b: dict[tuple[int, ...], list[int]] = {}
    for j, s in enumerate(seq_b):
        free_b.setdefault(s, []).append(j)
    matching, left_a = [], []
    for i, s in enumerate(seq_a):
        if free_b.get(s):
            matching.append((i, free_b[s].pop(0)))
        else:
            left_a.append(i)
    left_b = sorted(j for js in free_b.values() for j in js)

    witness = None
    if left_a or left_b:
        if left_a:
            side, seq, pool = "a", seq_a[left_a[0]], [seq_b[j] for j in left_b] or seq_b
        else:
            side, seq, pool = "b", seq_b[left_b[0]], [seq_a[i] for i in left_a] or seq_a
        cand, diff = _best_candidate(seq, pool)
        witness = Witness(side, seq, cand, diff)

    set_equal = set(seq_a) == set(seq_b)
    return Verdict(
        EQUAL if witness is None else DISTINGUISHED,
        tuple(matching),
        witness,
        EQUAL if set_equal else DISTINGUISHED,
        inv_a.depth,
    )


def sequence_multiset(inv: OrbitInvariant) -> Counter:
    return Counter(e.counts for e in inv.entries)
