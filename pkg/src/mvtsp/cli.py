"""Command-line interface: solve, verify, kernelize, gen, bench.

Exit codes: 0 ok, 1 parse error, 2 invalid instance or engine mismatch,
3 infeasible, 4 budget or retries exhausted, 5 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time

from .algebraic import RetriesExhausted, solve_algebraic
from .approx import solve_approx
from .core import (INF, FdcsInstance, InstanceError, MvtspInstance, NoSolution,
                   check_solution, cost_of, instance_to_json, reconstruct_tour, tour_edges,
                   validate)
from .dp import ExpspaceStats, solve_expspace
from .flow import Infeasible
from .kernel import kernelize
from .oracle import BudgetExceeded, brute_force
from .polyspace import PolyspaceStats, solve_polyspace

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_BUDGET, EXIT_VERIFY = range(6)

AUTO_EXPSPACE_MAX_N = 8
ENGINES = ("auto", "algebraic", "expspace", "polyspace", "approx", "brute")


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_PARSE, f"cannot parse {path}: {exc}") from None


def load_instance(path):
    raw = _load_json(path)
    try:
        return validate(raw)
    except InstanceError as exc:
        raise CliError(EXIT_INVALID, f"{exc.reason}: {exc}") from None


def _dump(doc) -> str:
    return json.dumps(doc, separators=(",", ":"))


def _pick_engine(inst, alg):
    rooted = isinstance(inst, MvtspInstance) or inst.root is not None
    connected = isinstance(inst, MvtspInstance) or inst.root is None
    if alg == "auto":
        return "expspace" if rooted and inst.n <= AUTO_EXPSPACE_MAX_N else "algebraic"
    if alg in ("expspace", "polyspace") and not rooted:
        raise CliError(EXIT_INVALID, f"{alg} needs an MVTSP or outbranching instance")
    if alg in ("algebraic", "approx") and not connected:
        raise CliError(EXIT_INVALID, f"{alg} handles MVTSP or connected-family instances")
    return alg


def run_engine(inst, engine, args, stats=None):
    kernel = not args.no_kernel
    if engine == "brute":
        return brute_force(inst, args.budget)
    if engine == "expspace":
        return solve_expspace(inst, kernel=kernel, stats=stats)
    if engine == "polyspace":
        return solve_polyspace(inst, K=args.layers, kernel=kernel, stats=stats)
    if engine == "approx":
        return solve_approx(inst, args.eps, seed=args.seed, confidence=args.confidence,
                            kernel=kernel)
    return solve_algebraic(inst, seed=args.seed, confidence=args.confidence,
                           amplify=args.trials, kernel=kernel, stats=stats)


def solve_doc(inst, args):
    engine = _pick_engine(inst, args.alg)
    stats = {"expspace": ExpspaceStats(), "polyspace": PolyspaceStats()}.get(engine, {})
    start = time.perf_counter()
    doc = {"engine": engine, "seed": args.seed}
    try:
        cost, m = run_engine(inst, engine, args, stats)
    except (BudgetExceeded, RetriesExhausted) as exc:
        raise CliError(EXIT_BUDGET, str(exc)) from None
    except NoSolution:
        doc = {"cost": "infeasible", "multiplicity": None, **doc}
        doc["wall_ms"] = round((time.perf_counter() - start) * 1000, 3)
        return doc, stats, EXIT_INFEASIBLE
    doc = {"cost": cost, "multiplicity": m, **doc}
    if args.tour and isinstance(inst, MvtspInstance):
        doc["tour"] = reconstruct_tour(inst, m)
    doc["wall_ms"] = round((time.perf_counter() - start) * 1000, 3)
    return doc, stats, EXIT_OK


def cmd_solve(args):
    inst = load_instance(args.instance)
    doc, stats, code = solve_doc(inst, args)
    print(_dump(doc))
    if args.count_states:
        if isinstance(stats, ExpspaceStats):
            info = {"memo_states": stats.memo_states, "sequences": stats.sequences,
                    "flows": stats.flows, "skipped": stats.skipped}
        elif isinstance(stats, PolyspaceStats):
            info = vars(stats)
        else:
            info = dict(stats)
        print(_dump(info), file=sys.stderr)
    return code


def verify_doc(inst, sol):
    """``(ok, reason)`` for a solution document against its instance."""
    if not isinstance(sol, dict):
        return False, "malformed-solution"
    m = sol.get("multiplicity")
    if sol.get("cost") == "infeasible" or m is None:
        return False, "no-solution"
    reason = check_solution(inst, m)
    if reason is not None:
        return False, reason
    claimed = sol.get("cost")
    if claimed != cost_of(m, inst.d):
        return False, "cost-mismatch"
    tour = sol.get("tour")
    if tour is not None:
        if not isinstance(inst, MvtspInstance):
            return False, "tour-mismatch"
        try:
            if tour_edges(tour, inst.n) != m:
                return False, "tour-mismatch"
        except (TypeError, IndexError):
            return False, "tour-mismatch"
    return True, None


def cmd_verify(args):
    inst = load_instance(args.instance)
    sol = _load_json(args.solution)
    ok, reason = verify_doc(inst, sol)
    report = {"ok": ok, "reason": reason}
    if ok:
        report["cost"] = sol["cost"]
    print(_dump(report))
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_kernelize(args):
    inst = load_instance(args.instance)
    fd = inst
    if isinstance(inst, MvtspInstance):
        fd = FdcsInstance(inst.d, inst.k, inst.k, None, inst.name)
    try:
        kr = kernelize(fd)
    except Infeasible as exc:
        print(_dump({"error": "infeasible", "detail": str(exc)}))
        return EXIT_INFEASIBLE
    print(_dump({"reduced": instance_to_json(kr.reduced), "f": kr.f}))
    return EXIT_OK


def generate(n, k_max, cost_max, density, seed, fdcs=False):
    rng = random.Random(seed)
    costs = []
    for u in range(n):
        row = []
        for v in range(n):
            if u != v and rng.random() < density:
                row.append(rng.randint(0, cost_max))
            else:
                row.append(INF)
        costs.append(row)
    k = [rng.randint(1, k_max) for _ in range(n)]
    raw = {"n": n, "name": f"gen-{n}-{k_max}-{cost_max}-{density}-{seed}",
           "costs": [[None if c == INF else c for c in row] for row in costs]}
    if fdcs:
        raw["in"] = k
        raw["out"] = k
        raw["family"] = "connected"
    else:
        raw["visits"] = k
    return raw


def cmd_gen(args):
    if args.n < 1:
        raise CliError(EXIT_INVALID, "n must be >= 1")
    print(_dump(generate(args.n, args.k_max, args.cost_max, args.density, args.seed, args.fdcs)))
    return EXIT_OK


BENCH_FIELDS = ["engine", "n", "seed", "cost", "wall_ms", "memo_states"]


def bench_rows(engines, ns, seeds, k_max=2, cost_max=9, density=0.8, complete=False,
               eps=0.1, layers=4):
    args = argparse.Namespace(no_kernel=False, budget=10 ** 7, layers=layers, eps=eps,
                              seed=0, confidence=0.99, trials=2)
    for n in ns:
        for seed in seeds:
            if complete:
                rng = random.Random(seed)
                d = [[rng.randint(0, cost_max) for _ in range(n)] for _ in range(n)]
                inst = MvtspInstance(tuple(map(tuple, d)), (n,) * n, f"complete-{n}-{seed}")
            else:
                inst = validate(generate(n, k_max, cost_max, density, seed))
            for engine in engines:
                args.seed = seed
                stats = ExpspaceStats() if engine == "expspace" else None
                if engine == "expspace" and complete:
                    args.no_kernel = True  # count every state of the full instance
                start = time.perf_counter()
                try:
                    cost, _ = run_engine(inst, engine, args, stats)
                except (NoSolution, BudgetExceeded) as exc:
                    cost = "infeasible" if isinstance(exc, NoSolution) else "budget"
                args.no_kernel = False
                wall = round((time.perf_counter() - start) * 1000, 3)
                yield {"engine": engine, "n": n, "seed": seed, "cost": cost, "wall_ms": wall,
                       "memo_states": stats.memo_states if stats else ""}


def cmd_bench(args):
    engines = [e for e in args.engines.split(",") if e]
    for e in engines:
        if e not in ENGINES or e == "auto":
            raise CliError(EXIT_PARSE, f"unknown engine {e!r}")
    ns = range(args.n_min, args.n_max + 1)
    seeds = range(args.seed, args.seed + args.seeds)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    rows = []
    for row in bench_rows(engines, ns, seeds, args.k_max, args.cost_max, args.density,
                          args.complete, args.eps, args.layers):
        writer.writerow(row)
        rows.append(row)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    if args.figures:
        from .plotting import render_all
        for path in render_all(rows, args.figures):
            print(path, file=sys.stderr)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="mvtsp", description="Many Visits TSP / fixed-degree connected subgraph solvers")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("instance")
    s.add_argument("--alg", choices=ENGINES, default="auto")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--layers", type=int, default=4)
    s.add_argument("--trials", type=int, default=2, help="oracle repetitions per query")
    s.add_argument("--confidence", type=float, default=0.99)
    s.add_argument("--tour", action="store_true")
    s.add_argument("--no-kernel", action="store_true")
    s.add_argument("--threads", type=int, default=1, help="accepted for compatibility; runs single-threaded")
    s.add_argument("--count-states", action="store_true", help="print engine statistics to stderr")
    s.add_argument("--budget", type=int, default=10 ** 7, help="brute-force search budget")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a solution against its instance")
    v.add_argument("instance")
    v.add_argument("solution")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("kernelize", help="reduce demands and print the offset")
    k.add_argument("instance")
    k.set_defaults(func=cmd_kernelize)

    g = sub.add_parser("gen", help="random instance")
    g.add_argument("n", type=int)
    g.add_argument("k_max", type=int)
    g.add_argument("cost_max", type=int)
    g.add_argument("density", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--fdcs", action="store_true", help="emit in/out demands instead of visits")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="engine x instance grid as CSV")
    b.add_argument("--engines", default="brute,expspace,polyspace,algebraic")
    b.add_argument("--n-min", type=int, default=2)
    b.add_argument("--n-max", type=int, default=4)
    b.add_argument("--seeds", type=int, default=3)
    b.add_argument("--seed", type=int, default=0, help="first seed")
    b.add_argument("--k-max", type=int, default=2)
    b.add_argument("--cost-max", type=int, default=9)
    b.add_argument("--density", type=float, default=0.8)
    b.add_argument("--complete", action="store_true", help="all costs finite, k(v) = n")
    b.add_argument("--eps", type=float, default=0.1)
    b.add_argument("--layers", type=int, default=4)
    b.add_argument("--out", help="CSV path (default: stdout)")
    b.add_argument("--figures", help="directory for PNG figures")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
