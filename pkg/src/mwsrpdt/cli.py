"""Command-line front end and benchmark harness.

Exit codes: 0 success, 1 negative verdict (infeasible solution, oracle
budget exhausted), 2 invalid flags or configuration, 3 I/O or file-format
failure, 4 stalled construction.

Example::

    mwsrpdt generate --n 20 --type A --count 10 --out-dir inst
    mwsrpdt bench --dir inst --algos constructive mmas --ants 10 --iters 20 --out bench.csv
    mwsrpdt histogram --bench-csv bench.csv --out hist.csv
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import re
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence

from . import aco
from .constructive import construct_greedy_fast
from .core import Solution, fractional_objective
from .exceptions import BudgetExceeded, InvalidConfig, ParseError, StalledDay
from .instances import GeneratorConfig, generate, read_instance, write_instance
from .mip_export import emit_model
from .oracle import solve_exact
from .validate import check_feasible, read_solution, write_solution

CSV_HEADER = ["type", "n", "id", "tasks", "algo", "ants", "iters", "seed", "ub", "fprime", "seconds"]
ALGOS = ("constructive", "as", "mmas", "acs")
FILE_PATTERN = re.compile(r"^([ABC])_(\d+)_(\d+)\.mwsrpdt$")

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_IO, EXIT_STALLED = 0, 1, 2, 3, 4


class UsageError(Exception):
    """Bad flag values discovered after argparse accepted them."""


@dataclasses.dataclass(frozen=True)
class BenchRow:
    instance_type: str
    n: int
    id: str
    tasks: int
    algorithm: str
    ants: int
    iters: int
    seed: int
    ub: int
    fprime: float
    seconds: float

    def cells(self) -> List[str]:
        return [self.instance_type, str(self.n), self.id, str(self.tasks), self.algorithm,
                str(self.ants), str(self.iters), str(self.seed), str(self.ub),
                repr(self.fprime), f"{self.seconds:.1f}"]


# ---------------------------------------------------------------- parameters

def _coerce(field: dataclasses.Field, raw):
    kind = type(field.default)
    if kind is bool:
        if isinstance(raw, bool):
            return raw
        if str(raw).lower() in ("1", "true", "yes"):
            return True
        if str(raw).lower() in ("0", "false", "no"):
            return False
        raise UsageError(f"{field.name} expects true or false, got {raw!r}")
    try:
        return kind(raw)
    except (TypeError, ValueError):
        raise UsageError(f"{field.name} expects {kind.__name__}, got {raw!r}") from None


def resolve_params(algo: str, config: Optional[Dict] = None, params: Sequence[str] = (),
                   ants: Optional[int] = None, iters: Optional[int] = None,
                   seed: Optional[int] = None) -> aco.AcoParams:
    """Tuned defaults, then the config mapping, then ``k=v`` strings, then dedicated flags."""
    fields = {f.name: f for f in dataclasses.fields(aco.AcoParams)}
    overrides = {}
    layers = [dict(config or {})]
    pairs = {}
    for item in params:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        pairs[key.strip()] = value.strip()
    layers.append(pairs)
    layers.append({k: v for k, v in (("num_ants", ants), ("max_iter", iters), ("seed", seed))
                   if v is not None})
    for layer in layers:
        for key, value in layer.items():
            if key not in fields or key == "variant":
                raise UsageError(f"unknown parameter {key!r}")
            overrides[key] = _coerce(fields[key], value)
    try:
        return aco.default_params(algo.upper(), **overrides)
    except InvalidConfig as exc:
        raise UsageError(str(exc)) from None


def load_config(path: Optional[str]) -> Dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config {path}: expected a JSON object")
    return data


# ---------------------------------------------------------------- running

def run_algorithm(inst, algo: str, params: Optional[aco.AcoParams]):
    """Return ``(solution, fprime, seconds)`` for one algorithm run."""
    t0 = time.monotonic()
    if algo == "constructive":
        sol = construct_greedy_fast(inst)
        fprime = fractional_objective(sol.p, sol.m, inst.D)
    else:
        res = aco.run(inst, params)
        sol, fprime = res.best, res.best_fprime
    return sol, fprime, time.monotonic() - t0


def instance_labels(path: str, inst) -> tuple:
    m = FILE_PATTERN.match(os.path.basename(path))
    if m:
        return m.group(1), int(m.group(2)), m.group(3)
    stem = os.path.splitext(os.path.basename(path))[0]
    return inst.instance_type, inst.n, stem


def make_row(path, inst, algo, params, sol: Solution, fprime, seconds) -> BenchRow:
    kind, n, ident = instance_labels(path, inst)
    if algo == "constructive":
        ants, iters, seed = 0, 0, 0
    else:
        ants, iters, seed = params.num_ants, params.max_iter, params.seed
    return BenchRow(kind, n, ident, inst.num_tasks, algo, ants, iters, seed, sol.p, fprime, seconds)


def _bench_job(job):
    path, algo, params = job
    inst = read_instance(path)
    sol, fprime, seconds = run_algorithm(inst, algo, params)
    return make_row(path, inst, algo, params, sol, fprime, seconds)


def worker_count(jobs: int) -> int:
    cap = os.environ.get("MWSRPDT_THREADS")
    limit = os.cpu_count() or 1
    if cap:
        try:
            limit = max(1, int(cap))
        except ValueError:
            raise UsageError(f"MWSRPDT_THREADS must be a positive integer, got {cap!r}") from None
    return max(1, min(limit, jobs))


# ---------------------------------------------------------------- commands

def cmd_generate(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    for ident in range(args.count):
        inst = generate(GeneratorConfig(args.n, args.type, args.seed + ident))
        path = os.path.join(args.out_dir, f"{args.type}_{args.n}_{ident}.mwsrpdt")
        write_instance(inst, path)
        print(path)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    params = None
    if args.algo != "constructive":
        params = resolve_params(args.algo, load_config(args.config), args.param,
                                args.ants, args.iters, args.seed)
    sol, fprime, seconds = run_algorithm(inst, args.algo, params)
    write_solution(sol, args.out)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerow(make_row(args.instance, inst, args.algo, params, sol, fprime, seconds).cells())
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = read_instance(args.instance)
    sol = read_solution(args.solution)
    rep = check_feasible(inst, sol)
    print(rep)
    if rep.ok:
        print(f"p={sol.p} m={sol.m!r} fprime={fractional_objective(sol.p, sol.m, inst.D)!r}")
        return EXIT_OK
    return EXIT_NEGATIVE


def cmd_oracle(args) -> int:
    inst = read_instance(args.instance)
    try:
        res = solve_exact(inst, max_tasks=args.max_tasks, max_nodes=args.max_nodes,
                          wall_clock=args.wall_clock)
    except InvalidConfig as exc:
        raise UsageError(str(exc)) from None
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    opt = res.optimal
    print(f"p={opt.p} m={opt.m!r} fprime={opt.fprime!r} nodes={res.nodes_explored}")
    if args.out:
        write_solution(res.solution, args.out)
    return EXIT_OK


def cmd_export_mip(args) -> int:
    inst = read_instance(args.instance)
    if args.horizon is not None and args.horizon < 1:
        raise UsageError("--horizon must be >= 1")
    st = emit_model(inst, args.horizon, args.out)
    print(f"H={st.H} binary={st.num_binary} continuous={st.num_continuous} "
          f"general={st.num_general_integer} constraints={st.num_constraints}")
    return EXIT_OK


def cmd_bench(args) -> int:
    config = load_config(args.config)
    paths = sorted(os.path.join(args.dir, f) for f in os.listdir(args.dir) if f.endswith(".mwsrpdt"))
    if not paths:
        raise UsageError(f"no .mwsrpdt files in {args.dir}")
    jobs = []
    for path in paths:
        for algo in args.algos:
            repeats = 1 if algo == "constructive" else args.repeats
            for r in range(repeats):
                params = None
                if algo != "constructive":
                    params = resolve_params(algo, config, args.param, args.ants, args.iters,
                                            args.seed + r)
                jobs.append((path, algo, params))
    workers = worker_count(len(jobs))
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        fh.flush()
        if workers == 1:
            rows = map(_bench_job, jobs)
            for row in rows:
                writer.writerow(row.cells())
                fh.flush()
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for row in pool.map(_bench_job, jobs):
                    writer.writerow(row.cells())
                    fh.flush()
    return EXIT_OK


def histogram(rows: Sequence[Dict[str, str]], algo: str = "mmas",
              baseline: str = "constructive") -> Dict[int, int]:
    """Count instances by (baseline ub - best ub of ``algo``) in days."""
    base: Dict[tuple, int] = {}
    best: Dict[tuple, int] = {}
    for row in rows:
        key = (row["type"], row["n"], row["id"])
        ub = int(row["ub"])
        if row["algo"] == baseline:
            base[key] = min(ub, base.get(key, ub))
        elif row["algo"] == algo:
            best[key] = min(ub, best.get(key, ub))
    missing = sorted(set(base) ^ set(best))
    if missing:
        raise UsageError(f"instances lacking a {baseline} or {algo} row: {missing[:5]}")
    return dict(sorted(Counter(base[k] - best[k] for k in base).items()))


def cmd_histogram(args) -> int:
    with open(args.bench_csv, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ParseError(f"unexpected header {reader.fieldnames}", 1)
        counts = histogram(list(reader), args.algo)
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["difference", "count"])
        for diff, count in counts.items():
            writer.writerow([diff, count])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _non_negative(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _aco_flags(p):
    p.add_argument("--ants", type=_positive, help="ants per iteration (default 100)")
    p.add_argument("--iters", type=_positive, help="iterations (default 100)")
    p.add_argument("--seed", type=_non_negative, default=None, help="ACO seed (default 0)")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="override one ACO parameter, e.g. --param alpha=2")
    p.add_argument("--config", help="JSON object of ACO parameters")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mwsrpdt", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write random instances")
    p.add_argument("--n", type=int, required=True, help="vertices including the depot")
    p.add_argument("--type", choices=("A", "B", "C"), required=True)
    p.add_argument("--seed", type=_non_negative, default=0, help="seed of instance 0")
    p.add_argument("--count", type=_positive, default=1)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run one algorithm on one instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--algo", choices=ALGOS, required=True)
    p.add_argument("--out", required=True, help="solution file to write")
    _aco_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a solution against an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("oracle", help="exhaustive search on a tiny instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--max-nodes", type=_positive, default=2_000_000)
    p.add_argument("--max-tasks", type=_positive, default=7)
    p.add_argument("--wall-clock", type=float, default=None, help="seconds")
    p.add_argument("--out", help="optional solution file")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("export-mip", help="write the MIP model as an LP file")
    p.add_argument("--instance", required=True)
    p.add_argument("--horizon", type=int, default=None,
                   help="number of days H (default: constructive makespan)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_mip)

    p = sub.add_parser("bench", help="run algorithms over a directory of instances")
    p.add_argument("--dir", required=True)
    p.add_argument("--algos", nargs="+", choices=ALGOS, default=["constructive", "mmas"])
    p.add_argument("--repeats", type=_positive, default=1, help="ACO runs per instance, seeds seed..seed+r-1")
    p.add_argument("--out", required=True, help="CSV file")
    _aco_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("histogram", help="constructive minus ACO makespan, counted per instance")
    p.add_argument("--bench-csv", required=True)
    p.add_argument("--algo", choices=ALGOS[1:], default="mmas")
    p.add_argument("--out", help="CSV file (default stdout)")
    p.set_defaults(func=cmd_histogram)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", 0) is None:
        args.seed = 0 if args.command == "bench" else None
    try:
        return args.func(args)
    except (UsageError, InvalidConfig) as exc:
        parser.print_usage(sys.stderr)
        print(f"mwsrpdt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StalledDay as exc:
        print(f"mwsrpdt: stalled: {exc}", file=sys.stderr)
        return EXIT_STALLED
    except (OSError, ParseError) as exc:
        print(f"mwsrpdt: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
