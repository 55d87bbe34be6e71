"""Command line interface.

Output is JSON (sorted keys, floats in shortest round-trip form, points as
text) or flat ``key,value`` CSV. Exit status: 0 on success, 1 on a
numerical failure, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any

from .compare import compare, invariant
from .family import MAX_M, family_bseq, solve_cm, verify_critical_orbit
from .kms import ConvergenceError, KmsParams, c_sequence, recover_bseq, recover_bseq_uncorrected
from .orbit import DEFAULT_DEPTH, backward_levels, extended_counts, is_exceptional
from .parse import ParseError, parse_map, parse_point
from .poly import DEFAULT_PRECISION
from .ratmap import MapError, RationalMap
from .sphere import DEFAULT_TOL, SpherePoint
from .verify import run_suite

EXIT_OK, EXIT_NUMERICAL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _plain(obj: Any) -> Any:
    """Convert results to JSON-ready values."""
    if isinstance(obj, SpherePoint):
        return obj.to_text()
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, complex):
        return f"{obj.real!r}{'-' if math.copysign(1, obj.imag) < 0 else '+'}{abs(obj.imag)!r}i"
    if hasattr(obj, "item"):
        return _plain(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def emit_json(data: Any) -> str:
    return json.dumps(_plain(data), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _flatten(prefix: str, obj: Any, rows: list):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else k, obj[k], rows)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, json.dumps(obj) if isinstance(obj, bool) or obj is None else obj))


def emit_csv(data: Any) -> str:
    rows: list = []
    _flatten("", _plain(data), rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in rows:
        w.writerow([k, repr(v) if isinstance(v, float) else v])
    return buf.getvalue()


def _common(p: argparse.ArgumentParser):
    p.add_argument("--map", help='rational map, e.g. "z^2-1" or "(z^2+1)/(2*z)"')
    p.add_argument("--point", help='point of the sphere, e.g. "0", "-1+2i" or "inf"')
    p.add_argument("--depth", type=int, help="orbit depth")
    p.add_argument("--beta", type=float, help="inverse temperature")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="chordal identification tolerance")
    p.add_argument("--precision-bits", type=int, default=DEFAULT_PRECISION, help="root-finder precision")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    p.add_argument("--jobs", type=int, default=1, help="worker threads; output does not depend on it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="backorbit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    cmds = {
        "critical": "critical points, branch indices, critical values",
        "fiber": "preimages of --point with branch indices",
        "orbit": "backward orbit counts b_n(--point)",
        "kms": "trace sequence c_n and recovered counts",
        "family": "parameter c_m of the periodic quadratic family",
        "compare": "compare backward-orbit invariants of two maps",
        "verify": "run the reference example suite",
    }
    subs = {}
    for name, text in cmds.items():
        subs[name] = sub.add_parser(name, help=text, description=text)
        _common(subs[name])
    subs["orbit"].add_argument("--levels", action="store_true", help="also list the points of each level")
    subs["kms"].add_argument("--truncation", type=int, default=40, help="series truncation depth K")
    subs["family"].add_argument("--m", type=int, required=True, help=f"period, 2..{MAX_M}")
    subs["compare"].add_argument("--map-a", required=True)
    subs["compare"].add_argument("--map-b", required=True)
    return parser


def _map(args, text: str | None = None) -> RationalMap:
    text = text if text is not None else args.map
    if text is None:
        raise UsageError("--map is required")
    try:
        return parse_map(text, tol=args.tol, precision_bits=args.precision_bits)
    except (ParseError, MapError) as exc:
        raise UsageError(str(exc)) from exc


def _point(args) -> SpherePoint:
    if args.point is None:
        raise UsageError("--point is required")
    try:
        return parse_point(args.point)
    except ParseError as exc:
        raise UsageError(str(exc)) from exc


def _depth(args, default: int) -> int:
    d = default if args.depth is None else args.depth
    if d < 0:
        raise UsageError("--depth must be >= 0")
    return d


def cmd_critical(args) -> dict:
    R = _map(args)
    rh = R.verify_riemann_hurwitz()
    return {
        "map": R.label,
        "degree": R.degree,
        "critical_points": [
            {"point": c.location, "branch_index": c.branch_index, "critical_value": v} for c, v in R.critical_values
        ],
        "riemann_hurwitz": {"total": rh.total, "expected": rh.expected, "passed": rh.passed},
    }


def cmd_fiber(args) -> dict:
    R = _map(args)
    fib = R.fiber(_point(args))
    return {
        "map": R.label,
        "target": fib.target,
        "members": [{"point": p, "branch_index": e} for p, e in fib.members],
        "index_sum": fib.index_sum,
    }


def cmd_orbit(args) -> dict:
    R = _map(args)
    z = _point(args)
    lv = backward_levels(R, z, _depth(args, DEFAULT_DEPTH), args.jobs)
    out = {
        "map": R.label,
        "point": z,
        "depth": lv.depth,
        "counts": list(lv.counts),
        "exceptional": is_exceptional(R, z).exceptional,
    }
    if args.levels:
        out["levels"] = [list(level) for level in lv.levels]
    return out


def cmd_kms(args) -> dict:
    R = _map(args)
    z = _point(args)
    if args.beta is None:
        raise UsageError("--beta is required")
    n_max = _depth(args, 6)
    try:
        params = KmsParams.for_map(R, z, args.beta, args.truncation)
    except ConvergenceError as exc:
        raise UsageError(str(exc)) from exc
    if n_max + 1 > params.depth:
        raise UsageError("--depth must be smaller than --truncation")
    if not params.within_stated_regime:
        print(
            f"warning: beta = {args.beta!r} <= N = {R.degree}; the series converge (beta > log N) "
            "but this lies outside the regime beta > N the trace construction is stated for",
            file=sys.stderr,
        )
    counts = extended_counts(R, z, params.depth, jobs=args.jobs)
    seq = c_sequence(R, z, params, n_max + 1, counts=counts)
    rec = recover_bseq(seq.values, args.beta)
    return {
        "map": R.label,
        "point": z,
        "beta": args.beta,
        "truncation": params.depth,
        "m": seq.m,
        "tail_bound": params.tail_bound,
        "c_sequence": list(seq.values),
        "recovered_b": list(rec.counts),
        "reference_b": list(counts[: n_max + 1]),
        "max_residual": rec.max_residual,
        "uncorrected_ratios": list(recover_bseq_uncorrected(seq.values)),
        "within_stated_regime": params.within_stated_regime,
    }


def cmd_family(args) -> dict:
    m = args.m
    if not 2 <= m <= MAX_M:
        raise UsageError(f"--m must lie in 2..{MAX_M}")
    par = solve_cm(m)
    rep = verify_critical_orbit(m)
    b = family_bseq(m, max(_depth(args, m + 1), m + 1), args.jobs)
    return {
        "m": m,
        "coefficients": [int(c) for c in par.f_m.coeffs],
        "c_m": par.c_m,
        "bracket": list(par.bracket),
        "residual": par.residual,
        "orbit_residuals": {
            "return": rep.return_residual,
            "min_intermediate": rep.min_intermediate,
            "identity_gap": rep.identity_gap,
            "precision_bits": rep.precision_bits,
            "passed": rep.passed,
        },
        "b_sequence": list(b),
    }


def cmd_compare(args) -> dict:
    depth = _depth(args, 6)
    if depth < 1:
        raise UsageError("--depth must be >= 1")
    a, b = _map(args, args.map_a), _map(args, args.map_b)
    ia, ib = invariant(a, depth, args.jobs), invariant(b, depth, args.jobs)
    v = compare(ia, ib)
    w = v.witness
    return {
        "depth": depth,
        "verdict": v.verdict,
        "set_verdict": v.set_verdict,
        "set_multiset_disagree": v.set_multiset_disagree,
        "matching": [list(p) for p in v.matching],
        "witness": None
        if w is None
        else {
            "side": w.side,
            "sequence": list(w.sequence),
            "candidate": None if w.candidate is None else list(w.candidate),
            "first_difference": w.first_difference,
        },
        "invariants": {
            side: {
                "map": inv.map_label,
                "entries": [
                    {"point": e.point, "branch_index": e.branch_index, "counts": list(e.counts)} for e in inv.entries
                ],
            }
            for side, inv in (("a", ia), ("b", ib))
        },
    }


def cmd_verify(args) -> dict:
    checks = run_suite(seed=args.seed, jobs=args.jobs)
    return {
        "seed": args.seed,
        "checks": [c.as_dict() for c in checks],
        "passed": all(c.passed for c in checks),
        "failed": [c.name for c in checks if not c.passed],
    }


COMMANDS = {
    "critical": cmd_critical,
    "fiber": cmd_fiber,
    "orbit": cmd_orbit,
    "kms": cmd_kms,
    "family": cmd_family,
    "compare": cmd_compare,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        if not args.tol > 0:
            raise UsageError("--tol must be positive")
        if args.precision_bits < 53:
            raise UsageError("--precision-bits must be >= 53")
        data = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    stdout.write(emit_json(data) if args.format == "json" else emit_csv(data))
    if args.command == "verify" and not data["passed"]:
        return EXIT_NUMERICAL
    return EXIT_OK
