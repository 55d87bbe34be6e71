"""Reference example suite: fixed maps, known sequences and structural identities.

Every check is deterministic given the seed; nothing time-dependent enters
the report, so the emission is reproducible byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .compare import compare, invariant
from .family import family_bseq, family_map, solve_cm, verify_critical_orbit
from .kms import KmsParams, c_sequence, recover_bseq, telescoping
from .orbit import bseq, bseq_closed_form_check, extended_counts, is_exceptional, oracle_bn
from .parse import parse_map
from .ratmap import RationalMap
from .sphere import INFINITY, ZERO, chordal_distance, point

GOLDEN = {
    "z^2": {"0+0i": (1, 1, 1, 1, 1, 1, 1), "inf": (1, 1, 1, 1, 1, 1, 1)},
    "z^2+1": {"0+0i": (1, 2, 4, 8, 16, 32, 64), "inf": (1, 1, 1, 1, 1, 1, 1)},
    "z^2-1": {"0+0i": (1, 2, 3, 6, 11, 22, 43), "inf": (1, 1, 1, 1, 1, 1, 1)},
    "z^2+c_3": {"0+0i": (1, 2, 4, 7, 14, 28, 55), "inf": (1, 1, 1, 1, 1, 1, 1)},
}

CORPUS_TEXT = (
    "z^2",
    "z^2+1",
    "z^2-1",
    "z^2+c_3",
    "z^2+i",
    "z^2-2*z+2",
    "(z^2+1)/(2*z)",
    "(z^2-3)/(z^2+z+5)",
    "z^3-3*z",
    "(z^3-1)/(z^2+2)",
)


@lru_cache(maxsize=None)
def _quadratics() -> tuple[tuple[str, RationalMap], ...]:
    maps = {t: parse_map(t) for t in ("z^2", "z^2+1", "z^2-1")}
    maps["z^2+c_3"] = family_map(3)
    return tuple(maps.items())


def quadratics() -> dict[str, RationalMap]:
    """The four reference quadratics; shared instances so fiber caches are reused."""
    return dict(_quadratics())


def corpus() -> list[RationalMap]:
    """Eight quadratics and two cubics."""
    return [family_map(3) if t == "z^2+c_3" else parse_map(t) for t in CORPUS_TEXT]


def random_targets(rng: np.random.Generator, count: int) -> list:
    """Points spread over the sphere: affine coordinates ``r e^{it}`` with ``log r`` uniform."""
    r = np.exp(rng.uniform(-3, 3, count))
    t = rng.uniform(0, 2 * np.pi, count)
    return [point(complex(a)) for a in r * np.exp(1j * t)]


@dataclass
class Check:
    criterion: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"criterion": self.criterion, "name": self.name, "passed": bool(self.passed), "detail": self.detail}


def check_goldens(jobs: int = 1) -> list[Check]:
    out = []
    for label, R in quadratics().items():
        got = {c.location.to_text(): tuple(bseq(R, c.location, 6, jobs)) for c in R.critical_points}
        out.append(Check(1, f"golden {label}", got == GOLDEN[label], {"computed": got}))
    return out


def check_closed_form(jobs: int = 1) -> list[Check]:
    rep = bseq_closed_form_check(11, jobs=jobs)
    return [Check(2, "closed form z^2-1 at 0, k <= 11", rep["passed"], rep)]


def check_structure(seed: int, samples: int = 200) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    for R in corpus():
        rh = R.verify_riemann_hurwitz()
        targets = random_targets(rng, samples) + [v for _, v in R.critical_values]
        bad_sum = 0
        worst = 0.0
        for y in targets:
            fib = R.fiber(y)
            bad_sum += fib.index_sum != R.degree
            worst = max(worst, max(chordal_distance(R.apply(x), fib.target) for x in fib.points))
        ok = rh.passed and bad_sum == 0 and worst <= 1e-8
        out.append(
            Check(
                3,
                f"fiber sums and Riemann-Hurwitz {R.label}",
                ok,
                {"riemann_hurwitz": [rh.total, rh.expected], "bad_fibers": bad_sum, "targets": len(targets),
                 "max_image_error_ok": worst <= 1e-8},
            )
        )
    return out


def check_oracle(jobs: int = 1) -> list[Check]:
    out = []
    for R in corpus():
        n_max = 3 if R.degree == 2 else 2
        for c in R.critical_points:
            levels = bseq(R, c.location, n_max, jobs)
            brute = tuple(oracle_bn(R, c.location, n) for n in range(n_max + 1))
            out.append(Check(4, f"oracle {R.label} at {c.location.to_text()}", levels == brute,
                             {"levels": levels, "oracle": brute}))
    return out


def check_family(jobs: int = 1) -> list[Check]:
    out = []
    params = [solve_cm(m) for m in range(2, 7)]
    out.append(Check(5, "c_2 = -1", params[0].c_m == -1.0, {"c_2": params[0].c_m}))
    mono = all(params[k + 1].bracket[1] < params[k].bracket[0] for k in range(len(params) - 1))
    widths = all(p.bracket_width <= 1e-12 for p in params)
    out.append(Check(5, "c_m strictly decreasing, brackets <= 1e-12", mono and widths,
                     {"c": [p.c_m for p in params], "brackets": [list(p.bracket) for p in params]}))
    for m in range(2, 7):
        rep = verify_critical_orbit(m)
        b = family_bseq(m, m + 1, jobs)
        ok = rep.passed and b[m] == 2**m - 1
        out.append(Check(5, f"critical orbit and b_m for m = {m}", ok,
                         {"return_residual_ok": rep.return_residual <= 1e-8,
                          "min_intermediate_ok": rep.min_intermediate >= 1e-4,
                          "identity_ok": rep.identity_gap <= 1e-10, "b": b}))
    return out


def kms_grid() -> list[tuple[str, RationalMap, float]]:
    return [(label, R, beta) for label, R in quadratics().items()
            for beta in (math.log(2) + 0.5, math.log(2) + 2, 3.0)]


def check_kms(jobs: int = 1, depth: int = 6, truncation: int = 40) -> list[Check]:
    out = []
    cache: dict = {}
    for label, R, beta in kms_grid():
        for c in R.critical_points:
            key = (label, c.location)
            if key not in cache:
                cache[key] = extended_counts(R, c.location, truncation, jobs=jobs)
            counts = cache[key]
            params = KmsParams.for_map(R, c.location, beta, truncation)
            seq = c_sequence(R, c.location, params, depth + 1, counts=counts)
            rec = recover_bseq(seq.values, beta)
            ok = rec.counts == tuple(counts[: depth + 1]) and rec.max_residual < 1e-6
            out.append(Check(6, f"recovery {label} at {c.location.to_text()}, beta={beta!r}", ok,
                             {"recovered": rec.counts, "reference": counts[: depth + 1],
                              "residual_ok": rec.max_residual < 1e-6}))
    R = parse_map("z^2")
    for beta in (math.log(2) + 0.5, math.log(2) + 2, 3.0):
        params = KmsParams.for_map(R, INFINITY, beta, truncation)
        seq = c_sequence(R, INFINITY, params, depth + 1)
        gap = max(abs(v - math.exp(-n * beta)) for n, v in enumerate(seq.values))
        rec = recover_bseq(seq.values, beta)
        out.append(Check(6, f"closed form z^2 at inf, beta={beta!r}", gap <= 1e-12 and set(rec.counts) == {1},
                         {"within_1e-12": gap <= 1e-12, "recovered": rec.counts}))
    return out


def check_telescoping(truncation: int = 8) -> list[Check]:
    out = []
    for label, R, beta in kms_grid():
        for c in R.critical_points:
            rep = telescoping(R, c.location, KmsParams.for_map(R, c.location, beta, truncation))
            out.append(Check(7, f"telescoping {label} at {c.location.to_text()}, beta={beta!r}, K={truncation}",
                             rep.passed, {"atoms": len(rep.residual)}))
    return out


def check_conjugation(jobs: int = 1) -> list[Check]:
    a, b = parse_map("z^2"), parse_map("z^2-2*z+2")
    v = compare(invariant(a, 4, jobs), invariant(b, 4, jobs))
    return [Check(8, "z^2 vs its translate z^2-2z+2 at depth 4", v.equal, {"verdict": v.verdict})]


def check_distinguishing(jobs: int = 1) -> list[Check]:
    invs = {label: invariant(R, 3, jobs) for label, R in quadratics().items()}
    out = []
    for x, y in combinations(invs, 2):
        v = compare(invs[x], invs[y])
        w = v.witness
        out.append(Check(9, f"{x} vs {y} at depth 3", v.verdict == "DISTINGUISHED",
                         {"verdict": v.verdict,
                          "witness": None if w is None else [list(w.sequence), list(w.candidate or ()),
                                                             w.first_difference]}))
    return out


def check_exceptional() -> list[Check]:
    cases = [("z^2", ZERO, True), ("z^2+1", INFINITY, True), ("z^2+1", ZERO, False)]
    out = []
    for text, z, expected in cases:
        res = is_exceptional(parse_map(text), z)
        out.append(Check(0, f"exceptional {text} at {z.to_text()}", res.exceptional == expected,
                         {"exceptional": res.exceptional, "orbit": [p.to_text() for p in res.orbit]}))
    return out


def run_suite(seed: int = 0, jobs: int = 1) -> list[Check]:
    checks = []
    checks += check_goldens(jobs)
    checks += check_closed_form(jobs)
    checks += check_structure(seed)
    checks += check_oracle(jobs)
    checks += check_family(jobs)
    checks += check_kms(jobs)
    checks += check_telescoping()
    checks += check_conjugation(jobs)
    checks += check_distinguishing(jobs)
    checks += check_exceptional()
    return checks

