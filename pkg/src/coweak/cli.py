"""Command-line entry point ``coweak``.

Every subcommand prints one JSON report.  Exit codes: 0 when the property
holds or the result was computed, 1 when a checked property fails (the
report carries a witness), 2 on input or validation errors, 3 when an
approximate result would be needed for a verdict.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bisim import InexactError, check_bisimulation, largest_bisimulation
from .fixpoint import path_oracle, saturate, solve
from .pattern import PatternError, builtin, load_pattern
from .segala import check_pattern_bisim, check_weak_prob_bisim, largest_weak_prob_bisim, parse_segala
from .semiring import SemiringError
from .system import (InputError, Partition, all_partitions, elaborate_process_term, parse_partition,
                     parse_system)
from .transform import NotAlgebraicError, check_semi_strong, check_theorem_red, check_theorem_red_largest

OK, FAILS, INPUT_ERROR, INEXACT = 0, 1, 2, 3


class _Refused(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def load_system(path: str):
    text = _read(path)
    if path.endswith(".proc"):
        return elaborate_process_term(text).system
    return parse_system(text)


def load_pattern_arg(spec: str, sys):
    if spec in ("strong", "weak", "delay"):
        return builtin(spec, sys.labels, sys.tau)
    doc = json.loads(_read(spec))
    pat = load_pattern(doc, sys.tau)
    missing = set(sys.labels) - set(pat.labels)
    if missing:
        raise PatternError(f"pattern alphabet lacks system label(s) {sorted(missing)}")
    return pat


def load_partition_arg(path, states):
    if path is None:
        return None
    return parse_partition(json.loads(_read(path)), states)


def _table_report(table, sys, pattern, command):
    rep = {"command": command}
    rep.update(table.to_json(sys.states, pattern.states))
    return rep


def cmd_check(args):
    sys_ = load_system(args.system)
    pat = load_pattern_arg(args.pattern, sys_)
    part = load_partition_arg(args.partition, sys_.states)
    if part is None:
        raise InputError("check needs --partition")
    v = check_bisimulation(sys_, pat, part, args.oplus, _exact(args.strategy), args.observables_only)
    rep = {"command": "check", "oplus": args.oplus, "pattern": pat.name, "partition": part.to_json()}
    rep.update(v.to_json(sys_.kind))
    return rep, OK if v.holds else FAILS


def _exact(strategy):
    # verdicts are computed exactly; 'iterate' is allowed when it stabilises
    return "exact" if strategy == "auto" else strategy


def cmd_largest(args):
    sys_ = load_system(args.system)
    pat = load_pattern_arg(args.pattern, sys_)
    part = largest_bisimulation(sys_, pat, args.oplus, _exact(args.strategy), args.observables_only)
    return {"command": "largest", "oplus": args.oplus, "pattern": pat.name, "partition": part.to_json()}, OK


def cmd_solve(args):
    sys_ = load_system(args.system)
    pat = load_pattern_arg(args.pattern, sys_)
    part = load_partition_arg(args.partition, sys_.states) or Partition.discrete(sys_.states)
    table = solve(sys_, pat, part, args.oplus, args.strategy, args.max_iter, args.widen_after)
    rep = _table_report(table, sys_, pat, "solve")
    rep["partition"] = part.to_json()
    return rep, OK if table.exact else INEXACT


def cmd_saturate(args):
    sys_ = load_system(args.system)
    pat = load_pattern_arg(args.pattern, sys_)
    table = solve(sys_, pat, None, args.oplus, args.strategy, args.max_iter, args.widen_after)
    if not table.exact:
        raise _Refused(f"saturation did not stabilise within {args.max_iter} iterations (bound {table.bound})", INEXACT)
    return _table_report(table, sys_, pat, "saturate"), OK


def cmd_oracle(args):
    sys_ = load_system(args.system)
    pat = load_pattern_arg(args.pattern, sys_)
    part = load_partition_arg(args.partition, sys_.states) or Partition.discrete(sys_.states)
    if args.depth < 0:
        raise InputError("--depth must be nonnegative")
    table = path_oracle(sys_, pat, part, args.depth, args.oplus)
    rep = _table_report(table, sys_, pat, "oracle")
    rep["depth"] = args.depth
    rep["partition"] = part.to_json()
    return rep, OK


def cmd_compare(args):
    sys_ = load_system(args.system)
    pat = load_pattern_arg(args.pattern, sys_)
    part = load_partition_arg(args.partition, sys_.states)
    if part is not None:
        parts = [part]
    elif len(sys_.states) <= 7:
        parts = list(all_partitions(sys_.states))
    else:
        raise InputError("compare without --partition enumerates partitions and is limited to 7 states")
    rows = []
    if args.mode == "red":
        sat = saturate(sys_, pat, args.oplus, "exact", pat.reachable)
        for p in parts:
            r = check_theorem_red(sys_, pat, args.oplus, p, sat)
            rows.append({"partition": p.to_json(), **r})
        extra = check_theorem_red_largest(sys_, pat, args.oplus)
        agree = all(r["agree"] for r in rows) and extra["agree"]
        rep = {"command": "compare", "mode": "red", "oplus": args.oplus, "results": rows, "largest": extra}
    else:
        if args.oplus != "join":
            raise InputError("the continuation comparison is defined for --oplus join")
        for p in parts:
            r = check_semi_strong(sys_, pat, p)
            rows.append({"partition": p.to_json(), **r})
        agree = all(r["agree"] for r in rows)
        rep = {"command": "compare", "mode": "semistrong", "oplus": "join", "results": rows}
    rep["agree"] = agree
    return rep, OK if agree else FAILS


def cmd_segala(args):
    seg = parse_segala(_read(args.system))
    part = load_partition_arg(args.partition, seg.states)
    if part is None:
        best = largest_weak_prob_bisim(seg, args.cap)
        if best is None:
            raise _Refused(f"weak-transition polytopes did not stabilise within cap {args.cap}", INEXACT)
        return {"command": "segala", "cap": args.cap, "largest": best.to_json()}, OK
    v = check_weak_prob_bisim(seg, part, args.cap)
    w = check_pattern_bisim(seg, part, args.cap)
    if not (v.stable and w.stable):
        raise _Refused(f"weak-transition polytopes did not stabilise within cap {args.cap}", INEXACT)
    rep = {"command": "segala", "cap": args.cap, "partition": part.to_json(), "holds": v.holds,
           "segala": v.to_json(), "pattern": w.to_json(), "agree": v.holds == w.holds}
    return rep, OK if v.holds else FAILS


COMMANDS = {
    "check": cmd_check,
    "largest": cmd_largest,
    "solve": cmd_solve,
    "saturate": cmd_saturate,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
    "segala": cmd_segala,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coweak", description="Pattern-based weak bisimulation checker.")
    ap.add_argument("--version", action="version", version=f"coweak {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, partition=True, pattern=True):
        p.add_argument("--system", required=True, help=".wts weighted system, .proc process terms")
        if pattern:
            p.add_argument("--pattern", default="weak", help="strong | weak | delay | path to pattern JSON")
        if partition:
            p.add_argument("--partition", help="partition JSON: {\"blocks\": [[...], ...]}")
        p.add_argument("--output", help="write the report here instead of stdout")
        p.add_argument("--pretty", action="store_true", help="indent the JSON report")
        p.add_argument("--json", action="store_true", help="JSON output (the default; accepted for symmetry)")

    def solver(p):
        p.add_argument("--oplus", choices=("join", "sum"), default="join")
        p.add_argument("--strategy", choices=("auto", "iterate", "exact"), default="auto")
        p.add_argument("--max-iter", type=int, default=10_000)
        p.add_argument("--widen-after", type=int, default=None)
        p.add_argument("--observables-only", action="store_true",
                       help="compare rows only at the pattern's observable states")

    for name, helptext in [("check", "check that a partition is a pattern bisimulation"),
                           ("largest", "compute the largest pattern bisimulation"),
                           ("solve", "solve the behaviour equation for a partition"),
                           ("saturate", "saturated system (identity target)"),
                           ("oracle", "truncated path-sum table"),
                           ("compare", "cross-check the reductions to kernel bisimulation")]:
        p = sub.add_parser(name, help=helptext)
        common(p, partition=name not in ("largest", "saturate"))
        solver(p)
        if name == "oracle":
            p.add_argument("--depth", type=int, default=30)
        if name == "compare":
            p.add_argument("--mode", choices=("red", "semistrong"), default="red")
    p = sub.add_parser("segala", help="weak probabilistic bisimulation on a simple Segala system")
    common(p, pattern=False)
    p.add_argument("--cap", type=int, default=64)
    return ap


def _emit(report, args):
    text = json.dumps(report, indent=2 if getattr(args, "pretty", False) else None, ensure_ascii=False)
    if getattr(args, "output", None):
        Path(args.output).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = COMMANDS[args.command](args)
    except _Refused as exc:
        report, code = {"command": args.command, "error": {"type": "inexact", "message": str(exc)}}, exc.code
    except InexactError as exc:
        report, code = {"command": args.command, "error": {"type": "inexact", "message": str(exc)}}, INEXACT
    except (InputError, PatternError, SemiringError, NotAlgebraicError, json.JSONDecodeError, ValueError) as exc:
        err = {"type": "input", "message": str(exc)}
        if getattr(exc, "line", None) is not None:
            err["line"], err["col"] = exc.line, exc.col
        report, code = {"command": args.command, "error": err}, INPUT_ERROR
    _emit(report, args)
    if "error" in report:
        print(f"coweak: {report['error']['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
