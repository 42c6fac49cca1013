"""Command line front end.

Subcommands::

    opineq run    --ids kitt,ando --dims 2,4 --trials 200 --seed 7 --out runs.jsonl
    opineq replay runs.jsonl
    opineq list

Every ``run`` option can also be set through an ``OPINEQ_<OPTION>``
environment variable (for example ``OPINEQ_TRIALS=50``); explicit flags
win.  Exit status is 0 when every asserted check passes, 1 on any
certification failure (or replay mismatch) and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Optional, Sequence

from .errors import DomainError
from .harness import IDS, REGISTRY, RunConfig, replay, run
from .posmaps import MAP_KINDS

log = logging.getLogger("opineq")

ENV_PREFIX = "OPINEQ_"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
REPLAY_RTOL = 1e-14


def _str_list(text: str) -> tuple:
    items = tuple(s.strip() for s in text.split(",") if s.strip())
    if not items:
        raise argparse.ArgumentTypeError("expected a comma-separated list")
    return items


def _ids(text: str) -> tuple:
    items = _str_list(text)
    if items == ("all",):
        return IDS
    return items


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(s) for s in _str_list(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def _flag(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


def _add_run_args(p: argparse.ArgumentParser) -> None:
    d = RunConfig()
    p.add_argument("--ids", type=_ids, default=IDS,
                   help="comma-separated inequality ids or 'all' (default: all)")
    p.add_argument("--dims", type=_int_list, default=d.dims, help="comma-separated dimensions")
    p.add_argument("--trials", type=int, default=d.trials, help="trials per id and dimension")
    p.add_argument("--seed", type=int, default=d.seed)
    t = p.add_mutually_exclusive_group()
    t.add_argument("--t-grid", type=int, default=d.t_grid_size, metavar="K",
                   help="K interior grid points plus 1/4, 1/2, 3/4 (default)")
    t.add_argument("--t-uniform", action="store_true", default=False,
                   help="draw t uniformly per trial")
    p.add_argument("--N", type=int, default=d.N, help="number of series terms")
    p.add_argument("--cond-cap", type=float, default=d.cond_cap)
    p.add_argument("--tol", type=float, default=d.tol)
    p.add_argument("--map-kinds", type=_str_list, default=d.map_kinds,
                   help=f"subset of {','.join(MAP_KINDS)}")
    p.add_argument("--out", default=None, help="output file (records)")
    p.add_argument("--format", choices=("jsonl", "csv"), default=d.format)
    p.add_argument("--workers", type=int, default=d.workers)
    p.add_argument("--json-summary", action="store_true",
                   help="print the summary as JSON instead of a table")


def _apply_env(p: argparse.ArgumentParser, environ) -> None:
    # environment values replace defaults, so explicit flags still win
    for action in p._actions:
        if not action.option_strings or action.dest == "help":
            continue
        key = ENV_PREFIX + action.dest.upper()
        if key not in environ:
            continue
        raw = environ[key]
        try:
            if action.type is not None:
                value = action.type(raw)
            elif isinstance(action.default, bool):
                value = _flag(raw)
            else:
                value = raw
        except (argparse.ArgumentTypeError, ValueError) as exc:
            p.error(f"bad value for {key}: {exc}")
        if action.choices is not None and value not in action.choices:
            p.error(f"bad value for {key}: {raw!r}")
        p.set_defaults(**{action.dest: value})


def build_parser(environ=None) -> argparse.ArgumentParser:
    environ = os.environ if environ is None else environ
    parser = argparse.ArgumentParser(
        prog="opineq", description="Seeded numerical certification of operator inequalities."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="generate and certify random instances")
    _add_run_args(p_run)
    _apply_env(p_run, environ)
    p_rep = sub.add_parser("replay", help="recompute every record of a jsonl file")
    p_rep.add_argument("records", help="jsonl file written by 'run'")
    sub.add_parser("list", help="list inequality ids")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        inequality_ids=tuple(args.ids), dims=tuple(args.dims), trials=args.trials,
        seed=args.seed, t_mode="uniform" if args.t_uniform else "grid",
        t_grid_size=args.t_grid, N=args.N, cond_cap=args.cond_cap, tol=args.tol,
        map_kinds=tuple(args.map_kinds), output_path=args.out, format=args.format,
        workers=args.workers,
    )


def _cmd_run(args) -> int:
    cfg = config_from_args(args)
    summary, _ = run(cfg)
    if args.json_summary:
        print(json.dumps(summary.to_dict(), indent=2, default=str))
    else:
        print(summary.format_table())
        print(f"failures: {summary.failures}")
    return EXIT_OK if summary.ok else EXIT_FAIL


def _cmd_replay(args) -> int:
    mismatches = 0
    total = 0
    with open(args.records) as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DomainError(f"line {line_no}: {exc}") from None
            rep = replay(record)
            total += 1
            ref = record["slack"]
            if abs(rep.slack - ref) > REPLAY_RTOL * max(abs(ref), abs(rep.slack)):
                mismatches += 1
                log.warning("line %d: slack %.17g, recorded %.17g", line_no, rep.slack, ref)
    print(f"replayed {total} records, {mismatches} mismatches")
    return EXIT_OK if mismatches == 0 else EXIT_FAIL


def _cmd_list(args) -> int:
    for name, entry in REGISTRY.items():
        print(f"{name:<14} {entry.description}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, environ=None) -> int:
    try:
        args = build_parser(environ).parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    commands = {"run": _cmd_run, "replay": _cmd_replay, "list": _cmd_list}
    try:
        return commands[args.command](args)
    except (DomainError, OSError) as exc:
        print(f"opineq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
