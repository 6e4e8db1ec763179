"""Command-line interface; ``build_parser`` lists the subcommands.

Exit codes: 0 for a complete solve, 2 when the time limit stopped the search
early, 1 for any error (bad arguments, unreadable or malformed files).
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .branching import ObMode
from .instances import (
    KINDS,
    InstanceFormatError,
    MoilpInstance,
    generate_random,
    read_generic,
    write_generic,
)
from .probing import ProbingConfig, ProbingMode
from .search import NodeRule, SolveConfig, SolveStats, VarRule, solve
from .upper_bounds import front_rows, front_to_csv

STATS_SCHEMA_VERSION = 1

EXIT_OK, EXIT_ERROR, EXIT_TIME_LIMIT = 0, 1, 2

STATS_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "version", "instance", "config", "complete", "front_size", "counters", "timings"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": "mobb-stats"},
        "version": {"const": STATS_SCHEMA_VERSION},
        "instance": {"type": "string"},
        "config": {
            "type": "object",
            "required": ["ob_mode", "probing", "node_rule", "var_rule", "cuts_enabled",
                         "enum_threshold", "enum_leaf_budget", "time_limit"],
        },
        "complete": {"type": "boolean"},
        "front_size": {"type": "integer", "minimum": 0},
        "counters": {
            "type": "object",
            "additionalProperties": {"type": ["integer", "boolean"]},
            "required": ["nodes_explored", "nodes_created", "lps_relaxation", "lps_probing"],
        },
        "timings": {
            "type": "object",
            "additionalProperties": {"type": "number", "minimum": 0},
            "required": ["time_total", "time_lbs", "time_probing", "time_gap_update", "wall_seconds"],
        },
    },
}

# accepted spellings for each flag value; "nvf" is the usual name for a run without probing
_OB = {m.value: m for m in ObMode}
_PROBING = {m.value: m for m in ProbingMode} | {"nvf": ProbingMode.NONE}
_NODE = {m.value: m for m in NodeRule}
_VAR = {m.value: m for m in VarRule}


@dataclass
class RunReport:
    instance: str
    config: dict
    front: list[tuple[tuple[int, ...], tuple[int, ...]]]
    stats: SolveStats
    complete: bool
    wall_seconds: float

    def to_dict(self, *, timings: bool = False) -> dict:
        """Plain-data form.  Timings are left out unless asked for, so that
        two runs of the same solve produce the same bytes."""
        out = {
            "instance": self.instance,
            "config": self.config,
            "complete": self.complete,
            "front": [{"objectives": list(z), "x": list(x)} for z, x in self.front],
            "counters": self.stats.counters(),
        }
        if timings:
            out["timings"] = self.timings()
        return out

    def timings(self) -> dict:
        t = {k: v for k, v in self.stats.as_dict().items() if k.startswith("time_")}
        t["wall_seconds"] = self.wall_seconds
        return t

    def to_bytes(self, *, timings: bool = False) -> bytes:
        return json.dumps(self.to_dict(timings=timings), sort_keys=True, indent=1).encode()

    def stats_document(self) -> dict:
        return {
            "schema": "mobb-stats",
            "version": STATS_SCHEMA_VERSION,
            "instance": self.instance,
            "config": self.config,
            "complete": self.complete,
            "front_size": len(self.front),
            "counters": self.stats.counters(),
            "timings": self.timings(),
        }


def config_echo(cfg: SolveConfig) -> dict:
    echo = cfg.as_dict()
    echo["enum_leaf_budget"] = 1 << cfg.enum_threshold
    return echo


def run(inst: MoilpInstance, cfg: SolveConfig) -> RunReport:
    t0 = time.perf_counter()
    U, stats = solve(inst, cfg)
    wall = time.perf_counter() - t0
    return RunReport(inst.name or "", config_echo(cfg), front_rows(U, inst.maximize), stats,
                     stats.complete, wall)


# --------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad input; this CLI reserves 2 for the
    time limit, so usage errors are turned into exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _choice(table: dict):
    def parse(text: str):
        try:
            return table[text.lower()]
        except KeyError:
            raise argparse.ArgumentTypeError(
                f"invalid choice {text!r} (choose from {', '.join(sorted(table))})") from None
    return parse


def _choice_list(table: dict):
    one = _choice(table)

    def parse(text: str):
        return [one(t) for t in text.split(",") if t]
    return parse


def _seed_range(text: str) -> list[int]:
    """``7``, ``1..10`` or ``1,4,9``."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed range {text!r}") from None


def _size(text: str):
    try:
        if "x" in text:
            l, r = (int(t) for t in text.lower().split("x"))
            return (l, r)
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size {text!r}, use N or LxR") from None


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        v = -1
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        v = -1.0
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mobb", description="Exact multi-objective branch and bound for 0-1 programs.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve one instance file")
    s.add_argument("instance", type=Path)
    s.add_argument("--ob", type=_choice(_OB), default=ObMode.FOB, help="objective branching: nob, cb or fob")
    s.add_argument("--probing", type=_choice(_PROBING), default=ProbingMode.VF, help="none, vf or vfd")
    s.add_argument("--node", type=_choice(_NODE), default=NodeRule.BBWSN, help="df, bf, bbws, bbwsn or bbgap")
    s.add_argument("--var", type=_choice(_VAR), default=VarRule.MOF, help="mof or ps")
    s.add_argument("--cuts", action="store_true", help="generate cover cuts")
    s.add_argument("--enum", type=_nonneg_int, default=14, metavar="N",
                   help="enumerate leaves with at most N free variables (default 14)")
    s.add_argument("--time-limit", type=_positive_float, metavar="S")
    s.add_argument("--out", type=Path, help="front CSV (stdout when omitted)")
    s.add_argument("--stats", type=Path, help="write stats JSON here")
    s.add_argument("--log-every", type=_nonneg_int, default=0, metavar="N",
                   help="heartbeat on stderr every N explored nodes")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("generate", help="write random instances in the generic format")
    g.add_argument("kind", choices=KINDS)
    g.add_argument("p", type=int)
    g.add_argument("size", type=_size, help="n for kp, LxR (facilities x customers) otherwise")
    g.add_argument("--seeds", type=_seed_range, default=[1], help="e.g. 1..10")
    g.add_argument("--out-dir", type=Path, default=Path("."))
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("bench", help="run a configuration grid over an instance directory")
    b.add_argument("directory", type=Path)
    b.add_argument("--ob", type=_choice_list(_OB), default=[ObMode.FOB])
    b.add_argument("--probing", type=_choice_list(_PROBING), default=[ProbingMode.VF])
    b.add_argument("--node", type=_choice_list(_NODE), default=[NodeRule.BBWSN])
    b.add_argument("--var", type=_choice_list(_VAR), default=[VarRule.MOF])
    b.add_argument("--cuts", choices=["off", "on", "both"], default="off")
    b.add_argument("--enum", type=_nonneg_int, default=14, metavar="N")
    b.add_argument("--time-limit", type=_positive_float, metavar="S")
    b.add_argument("--pattern", default="*.txt", help="instance file glob (default *.txt)")
    b.add_argument("--out", type=Path, help="CSV destination (stdout when omitted)")
    b.set_defaults(func=cmd_bench)
    return ap


def _fail(msg: str) -> int:
    print(f"mobb: error: {msg}", file=sys.stderr)
    return EXIT_ERROR


def _write(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


# --------------------------------------------------------------------------
# commands


def cmd_solve(args) -> int:
    try:
        inst = read_generic(args.instance)
    except (OSError, InstanceFormatError) as exc:
        return _fail(str(exc))
    try:
        cfg = SolveConfig(args.ob, ProbingConfig(args.probing), args.node, args.var,
                          args.cuts, args.enum, args.time_limit, args.log_every)
    except ValueError as exc:
        return _fail(str(exc))
    if args.log_every:
        logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    t0 = time.perf_counter()
    U, stats = solve(inst, cfg)
    wall = time.perf_counter() - t0
    report = RunReport(inst.name or args.instance.stem, config_echo(cfg), front_rows(U, inst.maximize),
                       stats, stats.complete, wall)
    try:
        _write(args.out, front_to_csv(U, inst.maximize))
        if args.stats is not None:
            args.stats.write_text(json.dumps(report.stats_document(), sort_keys=True, indent=2) + "\n")
    except OSError as exc:
        return _fail(str(exc))
    return EXIT_OK if stats.complete else EXIT_TIME_LIMIT


def cmd_generate(args) -> int:
    try:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        for seed in args.seeds:
            inst = generate_random(args.kind, args.p, args.size, seed)
            (args.out_dir / f"{inst.name}.txt").write_text(write_generic(inst))
    except ValueError as exc:
        return _fail(str(exc))
    except OSError as exc:
        return _fail(f"cannot write to {args.out_dir}: {exc}")
    return EXIT_OK


BENCH_COLUMNS = [
    "instance", "ob", "probing", "node", "var", "cuts", "enum", "complete", "front_size",
    "nodes_explored", "nodes_created", "lps_relaxation", "lps_probing", "lps_total",
    "time_total", "time_lbs", "time_probing", "pct_lb_set", "pct_probing",
    "fathomed_infeasible", "fathomed_optimality", "fathomed_dominance",
    "variables_fixed", "cuts_generated",
]


def bench_row(name: str, cfg: SolveConfig, stats: SolveStats, front_size: int) -> dict:
    total = stats.time_total

    def share(t: float) -> float:
        return round(100.0 * t / total, 2) if total > 0 else 0.0

    return {
        "instance": name, "ob": cfg.ob_mode.value, "probing": cfg.probing.mode.value,
        "node": cfg.node_rule.value, "var": cfg.var_rule.value, "cuts": int(cfg.cuts_enabled),
        "enum": cfg.enum_threshold, "complete": int(stats.complete), "front_size": front_size,
        "nodes_explored": stats.nodes_explored, "nodes_created": stats.nodes_created,
        "lps_relaxation": stats.lps_relaxation, "lps_probing": stats.lps_probing,
        "lps_total": stats.lps_relaxation + stats.lps_probing,
        "time_total": f"{total:.4f}", "time_lbs": f"{stats.time_lbs:.4f}",
        "time_probing": f"{stats.time_probing:.4f}",
        "pct_lb_set": share(stats.time_lbs), "pct_probing": share(stats.time_probing),
        "fathomed_infeasible": stats.fathomed_infeasible, "fathomed_optimality": stats.fathomed_optimality,
        "fathomed_dominance": stats.fathomed_dominance, "variables_fixed": stats.variables_fixed,
        "cuts_generated": stats.cuts_generated,
    }


def cmd_bench(args) -> int:
    files = sorted(args.directory.glob(args.pattern)) if args.directory.is_dir() else []
    if not files:
        return _fail(f"no instance files matching {args.pattern!r} in {args.directory}")
    try:
        instances = [read_generic(f) for f in files]
    except (OSError, InstanceFormatError) as exc:
        return _fail(str(exc))
    cut_opts = {"off": [False], "on": [True], "both": [False, True]}[args.cuts]
    grid = list(itertools.product(args.ob, args.probing, args.node, args.var, cut_opts))
    try:
        sink = open(args.out, "w", newline="") if args.out else sys.stdout
    except OSError as exc:
        return _fail(str(exc))
    try:
        w = csv.DictWriter(sink, fieldnames=BENCH_COLUMNS, lineterminator="\n")
        w.writeheader()
        for f, inst in zip(files, instances):
            for ob, pm, nr, vr, cu in grid:
                cfg = SolveConfig(ob, ProbingConfig(pm), nr, vr, cu, args.enum, args.time_limit)
                U, stats = solve(inst, cfg)
                w.writerow(bench_row(inst.name or f.stem, cfg, stats, len(U)))
                sink.flush()
    finally:
        if sink is not sys.stdout:
            sink.close()
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
