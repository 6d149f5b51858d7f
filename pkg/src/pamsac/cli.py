"""Command-line front end.

Subcommands: ``tally``, ``compare``, ``check`` and ``expand``.  JSON output
uses sorted keys and writes every rational as a ``"p/q"`` string, so the same
input and flags always give byte-identical output.  Wall-clock timings are
left out unless ``--timing`` is given.

Exit codes: 0 success, 1 criterion violation, 2 unreadable input or bad
arguments, 3 infeasible configuration, 4 size guard exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
import time
from fractions import Fraction

from . import __version__, criteria
from .core import (
    ApprovalBallot,
    ApprovalProfile,
    BallotParseError,
    ElectionError,
    GuardExceeded,
    InfeasibleElection,
    ScoreProfile,
    fraction_str,
    load_profile,
)
from .methods import METHODS, get_method
from .transforms import cfat_expand_profile, kpt_expand

EXIT_VIOLATION = 1
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_GUARD = 4

CRITERIA = ("pr", "strong-pr", "monotonicity", "positive-support", "participation")


def _jsonable(value):
    if isinstance(value, Fraction):
        return fraction_str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (frozenset, set)):
        return sorted(_jsonable(v) for v in value)
    return value


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def _read(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise BallotParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise BallotParseError(f"{path} is not UTF-8 text") from exc
    return load_profile(text), "sha256:" + hashlib.sha256(data).hexdigest()


def result_record(result) -> dict:
    rec = {
        "method": result.method,
        "winners": list(result.winners),
        "score": result.score,
        "tie_trace": [[level, n] for level, n in result.tie_trace],
        "notes": list(result.notes),
    }
    ev = result.evaluation
    if ev is not None:
        rec["objective"] = ev.objective
        rec["approvals_after"] = ev.approvals_after
        rec["approvals_before"] = ev.approvals_before
        rec["removal"] = [
            {"ballot": i, "candidate": c, "weight": w} for i, c, w in sorted(ev.removed, key=lambda s: (s[0], s[1]))
        ]
    return rec


def _method_options(args) -> dict:
    return {
        "cfat_fraction": args.cfat_fraction,
        "removal": args.removal,
        "granularity": args.granularity,
        "sequential": args.sequential,
    }


def _echo(args, method=None) -> dict:
    out = {
        "seats": args.seats,
        "cfat_fraction": args.cfat_fraction,
        "removal": args.removal,
        "granularity": args.granularity,
        "search": "sequential" if args.sequential else "exhaustive",
    }
    if method is not None:
        out["method"] = method
    return out


def _timed(fn, *a):
    start = time.perf_counter()
    out = fn(*a)
    return out, time.perf_counter() - start


# tally

def cmd_tally(args, out) -> int:
    profile, digest = _read(args.ballots)
    method = get_method(args.method, **_method_options(args))
    result, elapsed = _timed(method, profile, args.seats)
    report = {
        "version": __version__,
        "input_digest": digest,
        "config": _echo(args, args.method),
        "result": result_record(result),
    }
    if args.timing:
        report["timing_seconds"] = f"{elapsed:.6f}"
    if args.text:
        out.write(_tally_text(report))
    else:
        out.write(dumps(report))
    return 0


def _tally_text(report) -> str:
    res = _jsonable(report["result"])
    lines = [
        f"method: {res['method']}",
        f"winners: {' '.join(res['winners'])}",
        f"score: {res['score']}",
    ]
    if "objective" in res:
        lines.append(f"approvals after/before removal: {res['approvals_after']} / {res['approvals_before']}")
    trace = ", ".join(f"{level}={n}" for level, n in res["tie_trace"])
    lines.append(f"tie trace: {trace}")
    for step in res.get("removal", []):
        lines.append(f"removed: ballot {step['ballot']} drops {step['weight']} of {step['candidate']}")
    for note in res["notes"]:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


# compare

def cmd_compare(args, out) -> int:
    names = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not names:
        raise _UsageError("--methods needs at least one method")
    for name in names:
        if name not in METHODS:
            raise _UsageError(f"unknown method {name!r}")
    profile, digest = _read(args.ballots)
    rows = []
    for name in names:
        result, elapsed = _timed(get_method(name, **_method_options(args)), profile, args.seats)
        row = {"method": name, "winners": list(result.winners), "score": result.score}
        if args.timing:
            row["timing_seconds"] = f"{elapsed:.6f}"
        rows.append(row)
    if args.text:
        width = max(len(n) for n in names)
        for row in _jsonable(rows):
            extra = f"  {row['timing_seconds']}s" if args.timing else ""
            out.write(f"{row['method']:<{width}}  {' '.join(row['winners']):<20} {row['score']}{extra}\n")
    else:
        out.write(dumps({"version": __version__, "input_digest": digest, "config": _echo(args), "rows": rows}))
    return 0


# check

def _random_faction_spec(rng, universal=False):
    letters = iter("ABCDEFGHIJKLMNOPQRSTUVWXYZ")
    block = tuple(next(letters) for _ in range(rng.randint(1, 2))) if universal else ()
    factions = []
    for _ in range(rng.randint(2, 4)):
        cands = tuple(next(letters) for _ in range(rng.randint(1, 4)))
        factions.append((rng.randint(1, 6), cands))
    spec = criteria.FactionProfileSpec(factions, block)
    seats = rng.randint(len(block) + 1, min(len(spec.roster), 8))
    return spec, seats


def _faction_specs(criterion, seed, trials):
    """A fixed showcase spec followed by seeded random ones."""
    if criterion == "pr":
        yield criteria.FactionProfileSpec([(1, "ABCDEF"), (1, "GHIJ")]), 6
    else:
        yield criteria.FactionProfileSpec([(2, "DEF"), (1, "G")], "ABC"), 6
    for t in range(trials):
        rng = random.Random(f"{seed}:{t}")
        spec, seats = _random_faction_spec(rng, universal=criterion == "strong-pr")
        floors = spec.floors(seats - len(spec.universal))
        if all(len(c) >= f for (_, c), f in zip(spec.factions, floors)):
            yield spec, seats


def _spec_json(spec, seats, report) -> dict:
    return {
        "profile": criteria.format_approval_profile(spec.profile()),
        "seats": seats,
        "winners": list(report.winners),
        "allocation": list(report.allocation),
        "floors": list(report.floors),
        "universal_elected": report.universal_elected,
    }


def cmd_check(args, out) -> int:
    if args.method not in METHODS:
        raise _UsageError(f"unknown method {args.method!r}")
    method = get_method(args.method, **_method_options(args))
    record = {"version": __version__, "criterion": args.criterion, "method": args.method}
    violations = []
    asserting = True
    if args.criterion in ("pr", "strong-pr"):
        check = criteria.check_pr if args.criterion == "pr" else criteria.check_strong_pr
        checked = 0
        for spec, seats in _faction_specs(args.criterion, args.seed, args.trials):
            report = check(method, spec, seats)
            checked += 1
            if not report.passed:
                violations.append(_spec_json(spec, seats, report))
        record["checked"] = checked
    elif args.criterion == "monotonicity":
        found = criteria.probe_monotonicity(method, args.seed, args.trials)
        violations = [e.to_json() for e in found]
        record["trials"] = args.trials
    elif args.criterion == "participation":
        found = criteria.probe_participation(method, args.seed, args.trials)
        violations = [e.to_json() for e in found]
        record["trials"] = args.trials
        asserting = args.strict
    else:
        scans = {}
        for family in (criteria.textbook_family(), criteria.clone_block_family()):
            rep = criteria.scan_positive_support(method, family, range(1, args.max_x + 1))
            scans[family.name] = {"crossover": rep.crossover, "tie_breaks_at": list(rep.ties)}
            if rep.crossover is None:
                violations.append({"family": family.name, "winners": [[x, list(w)] for x, w in rep.winners]})
        record["families"] = scans
    record["violations"] = len(violations)
    record["passed"] = not violations
    record["asserted"] = asserting
    if violations:
        os.makedirs(args.out_dir, exist_ok=True)
        path = os.path.join(args.out_dir, f"counterexamples-{args.criterion}-{args.method}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps(violations))
        record["counterexamples"] = path
    if args.text:
        status = "pass" if not violations else ("fail" if asserting else "reported")
        out.write(f"{args.criterion} / {args.method}: {status} ({len(violations)} violations)\n")
        for name, scan in record.get("families", {}).items():
            out.write(f"  {name}: crossover {scan['crossover']}\n")
        if violations:
            out.write(f"  counterexamples: {record['counterexamples']}\n")
    else:
        out.write(dumps(record))
    return EXIT_VIOLATION if violations and asserting else 0


# expand

def cmd_expand(args, out) -> int:
    profile, _ = _read(args.ballots)
    rows = []  # (weight, approved set, provenance)
    if isinstance(profile, ScoreProfile):
        if args.kpt:
            for i, b in enumerate(profile.ballots):
                part = kpt_expand(b, profile.max_score, source=i)
                rows.extend((x.weight, x.approved, f"ballot {i} part {p}") for x, (_, p) in zip(part.ballots, part.provenance))
            approval = ApprovalProfile(profile.roster, tuple(ApprovalBallot(w, s) for w, s, _ in rows))
        else:
            approval = profile.approval_image()
            if args.cfat is None:
                raise _UsageError("score ballots need --kpt (or --cfat on their approval image)")
    else:
        approval = profile
        rows = [(b.weight, b.approved, f"ballot {i}") for i, b in enumerate(profile.ballots)]
    if args.cfat is not None:
        restrict = [c.strip() for c in args.cfat.split(",") if c.strip()]
        unknown = [c for c in restrict if c not in approval.roster]
        if unknown:
            raise _UsageError(f"unknown candidates in --cfat: {', '.join(unknown)}")
        expanded = cfat_expand_profile(approval, restrict)
        origin = [label for _, _, label in rows] if rows else [f"ballot {i}" for i in range(len(approval.ballots))]
        rows = [
            (b.weight, b.approved, f"{origin[i]} keeps {{{' '.join(approval.sort_set(kept))}}}")
            for b, (i, kept) in zip(expanded.ballots, expanded.provenance)
        ]
    if args.text:
        for w, s, label in rows:
            body = " ".join(approval.sort_set(s))
            out.write(f"{fraction_str(w)}: {body}".rstrip() + f"  # {label}\n")
    else:
        payload = [{"weight": w, "approved": list(approval.sort_set(s)), "from": label} for w, s, label in rows]
        out.write(dumps({"version": __version__, "roster": list(approval.roster), "ballots": payload}))
    return 0


# argument parsing

class _UsageError(ElectionError):
    pass


def _seats(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("seats must be >= 1")
    return n


def _fraction(text):
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    if not 0 <= value <= Fraction(1, 2):
        raise argparse.ArgumentTypeError("cfat fraction must lie in [0, 1/2]")
    return value


def _add_method_options(p):
    p.add_argument("--cfat-fraction", type=_fraction, default=Fraction(1, 2), metavar="R")
    p.add_argument("--removal", choices=("none", "greedy", "exact"), default="greedy")
    p.add_argument("--granularity", type=int, default=6, metavar="Q")
    p.add_argument("--sequential", action="store_true", help="add seats one at a time")


def _add_format(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", dest="text", action="store_false", help="JSON output (default)")
    g.add_argument("--text", dest="text", action="store_true", help="plain-text output")
    p.set_defaults(text=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pamsac", description="Exact multiwinner approval elections.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tally", help="elect a committee")
    p.add_argument("--ballots", required=True, metavar="FILE")
    p.add_argument("--seats", required=True, type=_seats, metavar="W")
    p.add_argument("--method", choices=METHODS, default="pamsac")
    _add_method_options(p)
    _add_format(p)
    p.add_argument("--timing", action="store_true", help="include wall-clock time (breaks byte-identity)")
    p.set_defaults(func=cmd_tally)

    p = sub.add_parser("compare", help="run several methods on one profile")
    p.add_argument("--ballots", required=True, metavar="FILE")
    p.add_argument("--seats", required=True, type=_seats, metavar="W")
    p.add_argument("--methods", required=True, metavar="LIST", help="comma-separated method names")
    _add_method_options(p)
    _add_format(p)
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("check", help="run a criterion check against a method")
    p.add_argument("--criterion", required=True, choices=CRITERIA)
    p.add_argument("--method", required=True, metavar="M")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", default="0")
    p.add_argument("--max-x", type=int, default=50, help="largest block multiplier for positive support")
    p.add_argument("--out-dir", default=".", help="where counterexample JSON is written")
    p.add_argument("--strict", action="store_true", help="fail on participation violations")
    _add_method_options(p)
    _add_format(p)
    p.set_defaults(func=cmd_check, seats=None)

    p = sub.add_parser("expand", help="list transformed ballots")
    p.add_argument("--ballots", required=True, metavar="FILE")
    p.add_argument("--kpt", action="store_true", help="split score ballots into approval parts")
    p.add_argument("--cfat", metavar="SET", help="comma-separated candidates to coin-flip split")
    _add_format(p)
    p.set_defaults(func=cmd_expand)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except (BallotParseError, _UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InfeasibleElection as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except GuardExceeded as exc:
        print(f"guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
