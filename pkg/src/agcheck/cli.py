"""Command-line front end.

Exit codes: 0 clean, 1 error-severity findings, 2 load/parse/validation
failure, 3 state budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .analysis import analyze_role
from .errors import AgError, BaselineDirty, BudgetExceeded
from .model import load_bundle
from .mutation import render_survivors, render_table, report_json, run_campaign
from .oracle import ERROR_KINDS, oracle_check
from .postorder import check_postorder
from .rolecfg import to_dot
from .samples import sample_text

EXIT_CLEAN, EXIT_FINDINGS, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


def _read_bundle(arg: str):
    """Load a bundle from a path, or from ``sample:NAME`` for a bundled sample."""
    if arg.startswith("sample:"):
        try:
            text = sample_text(arg[len("sample:"):])
        except FileNotFoundError as exc:
            raise AgError(f"no bundled sample named {arg[7:]!r}") from exc
    else:
        try:
            text = Path(arg).read_text(encoding="utf-8")
        except OSError as exc:
            raise AgError(f"cannot read {arg}: {exc.strerror}") from exc
    return load_bundle(text)


def _roles(g, args) -> list[str]:
    if getattr(args, "role", None):
        g.role(args.role)
        return [args.role]
    if not g.roles:
        raise AgError("bundle declares no roles")
    if getattr(args, "all_roles", False) or args.command == "check":
        return [r.name for r in g.roles]
    return [g.roles[0].name]


def _dot_path(base: str, role: str, many: bool) -> Path:
    p = Path(base)
    return p.with_name(f"{p.stem}.{role}{p.suffix or '.dot'}") if many else p


def cmd_check(args, out) -> int:
    g = _read_bundle(args.bundle)
    roles = _roles(g, args)
    runs = [
        analyze_role(g, name, opt1=not args.no_opt1, opt2=not args.no_opt2, budget=args.max_states)
        for name in roles
    ]
    if args.dot:
        for run in runs:
            _dot_path(args.dot, run.role, len(runs) > 1).write_text(to_dot(run.cfg), encoding="utf-8")
    if args.format == "json":
        doc = {"roles": [
            {"role": r.role, "violations": [v.to_json() for v in r.violations], "stats": r.stats.to_json(),
             "warnings": list(r.cfg.warnings)}
            for r in runs
        ]}
        print(json.dumps(doc, indent=2), file=out)
    else:
        for r in runs:
            n = len(r.violations)
            print(f"role {r.role}: {n} violation{'s' if n != 1 else ''}", file=out)
            for w in r.cfg.warnings:
                print(f"  warning: {w}", file=out)
            for v in r.violations:
                print(f"  {v.describe()}", file=out)
            s = r.stats
            print(f"  states expanded {s.statesExpanded}, deduped {s.statesDeduped}, cache hits {s.cacheHits}, "
                  f"cache entries {s.cacheEntries}, max worklist {s.maxWorklist}, {s.elapsed:.3f}s", file=out)
    return EXIT_FINDINGS if any(r.errors for r in runs) else EXIT_CLEAN


def cmd_postorder(args, out) -> int:
    g = _read_bundle(args.bundle)
    found = {name: check_postorder(g, name) for name in _roles(g, args)}
    if args.format == "json":
        print(json.dumps({"roles": [{"role": k, "diagnostics": [d.to_json() for d in v]} for k, v in found.items()]},
                         indent=2), file=out)
    else:
        for name, diags in found.items():
            print(f"role {name}: {len(diags)} postorder diagnostic{'s' if len(diags) != 1 else ''}", file=out)
            for d in diags:
                print(f"  error: {d.message}", file=out)
    return EXIT_FINDINGS if any(found.values()) else EXIT_CLEAN


def cmd_mutate(args, out) -> int:
    # --seed is accepted for a future sampling mode; enumeration is exhaustive
    g = _read_bundle(args.bundle)
    language = Path(args.bundle).stem if not args.bundle.startswith("sample:") else args.bundle[7:]
    reports = [
        run_campaign(g, name, use_oracle=args.oracle, budget=args.max_states, jobs=args.jobs, bound=args.bound,
                     language=language if len(g.roles) == 1 else f"{language}/{name}")
        for name in _roles(g, args)
    ]
    if args.format == "json":
        print(report_json(reports), file=out)
    else:
        print(render_table(reports), file=out)
        for r in reports:
            if r.survivors or r.checkMutants:
                print(f"\nsurvivors ({r.language}):", file=out)
                print(render_survivors(r), file=out)
            if r.oracleFaulty is not None:
                print(f"\noracle-confirmed faulty mutants ({r.language}): {r.oracleFaulty}, "
                      f"missed by the visit: {len(r.missed)}", file=out)
    return EXIT_CLEAN


def cmd_oracle(args, out) -> int:
    g = _read_bundle(args.bundle)
    found = {name: oracle_check(g, name, args.bound) for name in _roles(g, args)}
    if args.format == "json":
        doc = {"roles": [
            {"role": k, "faults": [dict(zip(("kind", "production", "index", "attr"), key)) for key in sorted(v)]}
            for k, v in found.items()
        ]}
        print(json.dumps(doc, indent=2), file=out)
    else:
        for name, keys in found.items():
            print(f"role {name}: {len(keys)} runtime fault{'s' if len(keys) != 1 else ''} (bound {args.bound})",
                  file=out)
            for kind, pid, i, n in sorted(keys):
                print(f"  {kind} in {pid}: ${i}.{n}", file=out)
    return EXIT_FINDINGS if any(k[0] in ERROR_KINDS for v in found.values() for k in v) else EXIT_CLEAN


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="agcheck", description="Static checks for modular attribute grammars.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log structural warnings to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, many=False):
        p.add_argument("bundle", help="bundle JSON path, or sample:NAME for a bundled sample")
        if many:
            g = p.add_mutually_exclusive_group()
            g.add_argument("--role", help="role to analyse")
            g.add_argument("--all-roles", action="store_true", help="analyse every role (default)")
        else:
            p.add_argument("--role", help="role to analyse (default: the first declared role)")
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("check", help="run the CFG visit")
    common(p, many=True)
    p.add_argument("--no-opt1", action="store_true", help="keep structurally duplicate productions")
    p.add_argument("--no-opt2", action="store_true", help="disable the per-nonterminal head cache")
    p.add_argument("--max-states", type=int, default=None, help="expanded-state budget")
    p.add_argument("--dot", metavar="PATH", help="write the role CFG as Graphviz DOT")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("postorder", help="run the signature-based postorder checker")
    common(p)
    p.set_defaults(func=cmd_postorder)

    p = sub.add_parser("mutate", help="run an attribute-rename mutation campaign")
    common(p)
    p.add_argument("--oracle", action="store_true", help="confirm faults by execution and classify survivors")
    p.add_argument("--seed", type=int, default=0, help="reserved; enumeration is exhaustive")
    p.add_argument("--jobs", type=int, default=1, help="analyse mutants in N worker processes")
    p.add_argument("--bound", type=int, default=2, help="oracle recursion bound")
    p.add_argument("--max-states", type=int, default=None)
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser("oracle", help="enumerate bounded trees and execute the role")
    common(p)
    p.add_argument("--bound", type=int, default=2, help="max occurrences of a production on any chain")
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR, format="%(levelname)s: %(message)s")
    try:
        return args.func(args, out)
    except BudgetExceeded as exc:
        print(f"agcheck: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except BaselineDirty as exc:
        print(f"agcheck: {exc}", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v.describe()}", file=sys.stderr)
        return EXIT_INPUT
    except AgError as exc:
        print(f"agcheck: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
