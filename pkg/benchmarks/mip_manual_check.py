"""Solve emitted LP files with HiGHS and compare against the heuristics.

Manual check, not part of the test suite: needs ``pip install highspy``.
For each tiny instance the model is emitted at the constructive horizon H
and at H + 1; both optima must be at most the constructive makespan and the
larger horizon must not be worse.

Usage::

    python3 benchmarks/mip_manual_check.py --out-dir /tmp/lp
"""

import argparse
import os

import highspy

from mwsrpdt.core import Instance, Service
from mwsrpdt.constructive import construct_greedy_fast
from mwsrpdt.instances import GeneratorConfig, generate, truncate
from mwsrpdt.mip_export import emit_model
from mwsrpdt.oracle import solve_exact

CASES = [("A", 3, 2), ("B", 5, 2), ("C", 7, 3), ("A", 11, 2)]
MAX_TASKS = 5


def chain_instance():
    """Two customers, each with a 5 h task that depends on another 5 h task."""
    svc = Service(1, (1, 2), frozenset({(2, 1)}))
    times = {(k, 1, a): 5.0 for k in (1, 2) for a in (1, 2)}
    return Instance(3, 2, 8.0, ((0, 0), (0, 0), (10, 10)), (svc,), {2: 1, 3: 1}, times)


def tiny_instances():
    yield "chain", chain_instance()
    for kind, seed, teams in CASES:
        full = generate(GeneratorConfig(6, kind, seed))
        inst = truncate(full, 1, teams)
        for customers in range(2, full.n):
            bigger = truncate(full, customers, teams)
            if bigger.num_tasks > MAX_TASKS:
                break
            inst = bigger
        yield f"{kind}_{seed}", inst


def solve(path):
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("time_limit", 120.0)
    h.readModel(path)
    h.run()
    status = h.modelStatusToString(h.getModelStatus())
    return status, h.getInfo().objective_function_value


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="lp_check")
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)
    print("instance,tasks,constructive_p,oracle_p,H,mip_status,mip_p,H+1_status,H+1_p")
    for name, inst in tiny_instances():
        greedy = construct_greedy_fast(inst).p
        oracle = solve_exact(inst).optimal.p
        row = [name, str(inst.num_tasks), str(greedy), str(oracle), str(greedy)]
        for H in (greedy, greedy + 1):
            path = os.path.join(args.out_dir, f"{name}_H{H}.lp")
            emit_model(inst, H, path)
            status, obj = solve(path)
            row += [status, f"{obj:g}"]
        print(",".join(row))


if __name__ == "__main__":
    main()
