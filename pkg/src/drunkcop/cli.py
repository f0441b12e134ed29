"""Command-line entry point: ``drunkcop {gen,simulate,exact,optimal,verify,bench}``.

GRAPH arguments take either a file (``.json`` or edge list) or an inline
family spec such as ``path:100`` or ``lollipop:n=64,c=1``. Structured output
is a JSON document ``{"manifest": ..., "report": ...}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from . import generators as gen
from . import lemmas
from .analysis import exact_expected_capture, optimal_capture_values
from .engine import GameConfig, default_workers, monte_carlo
from .graph import Graph, GraphError, read_graph, write_graph
from .policies import POLICY_NAMES, make_policy

log = logging.getLogger("drunkcop")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_FAULT = 0, 1, 2, 3
OPTIMAL_MAX_N = 400
SUITES = ("vc", "keylemma", "four-lemma", "three-step", "diam-delta", "regular-bound", "tree-bound")
BENCH_COLUMNS = ["family", "n", "policy", "trials", "mean", "stderr", "min", "max"]


class UsageError(Exception):
    pass


def load_graph(spec: str) -> Graph:
    p = Path(spec)
    if p.exists():
        return read_graph(p)
    try:
        name, params = gen.parse_family_spec(spec)
    except ValueError as exc:
        raise UsageError(f"{spec!r} is neither a graph file nor a family spec ({exc})") from None
    return gen.make(name, **params)


def _starts(g: Graph, cop: int | None, drunk: int | None) -> tuple[int, int]:
    cop = g.landmarks.get("cop", 0) if cop is None else cop
    if drunk is None:
        drunk = g.landmarks.get("drunk")
        if drunk is None:
            row = g.distance_rows[cop]
            drunk = max(range(g.n), key=lambda v: (row[v], -v))
    return cop, drunk


def _kv(items: list[str]) -> dict:
    out = {}
    for item in items:
        key, eq, val = item.partition("=")
        if not eq:
            raise UsageError(f"expected key=value, got {item!r}")
        out[key] = gen._number(val)
    return out


def _document(args, params: dict, report, started: float) -> dict:
    manifest = {
        "subcommand": args.command,
        "params": params,
        "seed": params.get("seed"),
        "version": __version__,
        "duration_s": round(time.perf_counter() - started, 6),
    }
    return {"manifest": manifest, "report": report}


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=False, default=lemmas._jsonable) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --- subcommands ---------------------------------------------------------------

def cmd_gen(args) -> int:
    name, params = gen.parse_family_spec(args.family)
    params.update(_kv(args.params))
    g = gen.make(name, **params)
    write_graph(g, args.output)
    print(f"{g.name}: {g.n} vertices, {g.num_edges} edges -> {args.output}")
    return EXIT_OK


def cmd_simulate(args, started) -> int:
    g = load_graph(args.graph)
    cop, drunk = _starts(g, args.cop, args.drunk)
    cfg = GameConfig(cop, drunk, cop_may_idle=args.idle, move_cap=args.move_cap)
    cfg.validate(g)
    record = args.trajectory is not None
    rep = monte_carlo(g, args.policy, cfg, args.trials, master_seed=args.seed, workers=args.workers,
                      record=record, keep_outcomes=record)
    params = {"graph": args.graph, "policy": args.policy, "cop": cop, "drunk": drunk, "trials": args.trials,
              "seed": args.seed, "idle": args.idle, "move_cap": args.move_cap}
    _emit(_document(args, params, rep.to_dict(), started), args.out)
    if args.trials_csv:
        Path(args.trials_csv).write_text(rep.trials_csv())
    if record:
        Path(args.trajectory).write_text(rep.outcomes[0].dump_trajectory())
    return EXIT_OK if not rep.truncated else EXIT_FAIL


def cmd_exact(args) -> int:
    g = load_graph(args.graph)
    policy = make_policy(args.policy, g, cop_start=g.landmarks.get("cop", 0) if args.cop is None else args.cop,
                         cop_may_idle=args.idle)
    if not policy.memoryless:
        raise UsageError(f"policy {args.policy!r} is not memoryless; use simulate instead")
    table = exact_expected_capture(g, policy, tolerance=args.tol, method=args.method)
    return _print_table(table, g, args)


def cmd_optimal(args) -> int:
    g = load_graph(args.graph)
    if g.n > OPTIMAL_MAX_N:
        raise UsageError(f"optimal is limited to n <= {OPTIMAL_MAX_N} (got {g.n})")
    table = optimal_capture_values(g, tolerance=args.tol, cop_may_idle=args.idle)
    return _print_table(table, g, args)


def _print_table(table, g: Graph, args) -> int:
    if args.cop is not None or args.drunk is not None:
        cop, drunk = _starts(g, args.cop, args.drunk)
        if not (0 <= cop < g.n and 0 <= drunk < g.n):
            raise UsageError(f"start out of range 0..{g.n - 1}")
        print(repr(table[cop, drunk]))
    else:
        text = table.to_csv()
        if args.out:
            Path(args.out).write_text(text)
            c, d = table.argmax()
            print(f"max {table.max()!r} at cop={c} drunk={d}; table -> {args.out}")
        else:
            sys.stdout.write(text)
    return EXIT_OK


def run_suite(suite: str, args) -> list:
    workers = args.workers or default_workers()
    if suite in ("vc", "keylemma"):
        vc, key = lemmas.vc_keylemma_suite(n_exhaustive=args.max_n or 6, t_exhaustive=args.t_max or 16,
                                           random_count=args.count or 50, random_n_max=12,
                                           t_random=min(args.t_max or 10, 10), seed=args.seed)
        return [vc if suite == "vc" else key]
    if suite == "four-lemma":
        return [lemmas.four_lemma_check(n_max=_guard_n(args.max_n or 7), workers=workers)]
    if suite == "diam-delta":
        return [lemmas.diam_delta_check(n_max=_guard_n(args.max_n or 7), graphs=lemmas.family_instances(),
                                        workers=workers)]
    if suite == "three-step":
        return [lemmas.three_step_check()]
    if suite == "tree-bound":
        return [lemmas.tree_bound_check(count=args.count or 100, n_max=args.max_n or 12, seed=args.seed)]
    if suite == "regular-bound":
        graphs = [gen.cycle(6), gen.petersen(), gen.projective_incidence(2)]
        graphs += [gen.random_regular(10, 3, seed=args.seed + i) for i in range(args.count or 5)]
        return [lemmas.regular_greedy_bound_check(h) for h in graphs]
    raise UsageError(f"unknown suite {suite!r}")


def _guard_n(n: int) -> int:
    if n > gen.MAX_ENUMERATION_N:
        raise UsageError(f"exhaustive enumeration is limited to n <= {gen.MAX_ENUMERATION_N}")
    return n


def cmd_verify(args, started) -> int:
    reports = run_suite(args.suite, args)
    for r in reports:
        print(r.line())
    params = {"suite": args.suite, "max_n": args.max_n, "t_max": args.t_max, "count": args.count, "seed": args.seed}
    if args.out:
        _emit(_document(args, params, [r.to_dict() for r in reports], started), args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    policies = [p for p in args.policies.split(",") if p]
    if not sizes or not policies:
        raise UsageError("bench needs at least one size and one policy")
    extra = _kv(args.param)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    failures = 0
    for n in sizes:
        for pol in policies:
            try:
                g = gen.make(args.family, n=n, **extra)
                cop, drunk = _starts(g, None, None)
                rep = monte_carlo(g, pol, GameConfig(cop, drunk, move_cap=args.move_cap), args.trials,
                                  master_seed=args.seed, workers=args.workers)
            except Exception as exc:  # one bad cell must not sink the table
                failures += 1
                print(f"bench cell {args.family} n={n} policy={pol} failed: {exc}", file=sys.stderr)
                continue
            w.writerow([args.family, n, pol, rep.trials, rep.mean, rep.stderr, rep.min, rep.max])
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_FAIL if failures else EXIT_OK


# --- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="drunkcop", description="Cop versus drunk robber on graphs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a family member to a graph file")
    p.add_argument("family", help="family name or inline spec, e.g. path or path:100")
    p.add_argument("params", nargs="*", help="key=value generator parameters")
    p.add_argument("-o", "--output", required=True, help="output path; .json selects JSON, otherwise edge list")

    p = sub.add_parser("simulate", help="Monte Carlo capture times")
    p.add_argument("graph")
    p.add_argument("policy", help=f"one of {', '.join(POLICY_NAMES)}")
    p.add_argument("--cop", type=int)
    p.add_argument("--drunk", type=int)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--idle", action="store_true", help="allow the cop to stay put")
    p.add_argument("--move-cap", type=int, default=10**7)
    p.add_argument("--out", help="write the JSON document here instead of stdout")
    p.add_argument("--trials-csv", help="per-trial capture times as CSV")
    p.add_argument("--trajectory", help="dump the first trial's trajectory")

    for name, helptext in (("exact", "expected capture time of a memoryless policy"),
                           ("optimal", "minimum expected capture time over all cop strategies")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("graph")
        if name == "exact":
            p.add_argument("policy")
            p.add_argument("--method", choices=("sweep", "direct"), default="sweep")
        p.add_argument("--cop", type=int)
        p.add_argument("--drunk", type=int)
        p.add_argument("--idle", action="store_true")
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--out", help="write the value table CSV here")

    p = sub.add_parser("verify", help="run a lemma suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--max-n", type=int)
    p.add_argument("--t-max", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")

    p = sub.add_parser("bench", help="scaling table as CSV")
    p.add_argument("family")
    p.add_argument("--sizes", required=True, help="comma-separated n values")
    p.add_argument("--policies", required=True, help="comma-separated policy names")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int)
    p.add_argument("--move-cap", type=int, default=10**7)
    p.add_argument("--param", action="append", default=[], help="extra key=value passed to the generator")
    p.add_argument("--out")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    started = time.perf_counter()
    try:
        if args.command == "gen":
            return cmd_gen(args)
        if args.command == "simulate":
            return cmd_simulate(args, started)
        if args.command == "exact":
            return cmd_exact(args)
        if args.command == "optimal":
            return cmd_optimal(args)
        if args.command == "verify":
            return cmd_verify(args, started)
        return cmd_bench(args)
    except (UsageError, GraphError, ValueError, OSError) as exc:
        print(f"drunkcop {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        log.exception("internal fault")
        print(f"drunkcop {args.command}: internal fault: {exc}", file=sys.stderr)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
