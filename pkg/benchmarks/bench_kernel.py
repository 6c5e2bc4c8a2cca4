"""Time the compiled and pure-Python construction kernels on the same ants.

Both backends consume identical uniform streams, so the script also checks
that they return identical schedules.

Usage::

    python3 benchmarks/bench_kernel.py --n 20 --type A --ants 200
"""

import argparse
import time

from mwsrpdt import _kernel
from mwsrpdt.aco import PheromoneTable, ant_uniforms, default_params
from mwsrpdt.instances import GeneratorConfig, generate


def time_backend(fp, backend, streams, params, table):
    enc = _kernel.ENCODINGS[params.encoding]
    out = []
    t0 = time.perf_counter()
    for u in streams:
        out.append(_kernel.simulate(fp, _kernel.PROPORTIONAL, u, table.values, table.default, enc,
                                    params.alpha, params.beta, params.q0, params.phi,
                                    params.tau0, False, backend=backend))
    return time.perf_counter() - t0, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--type", choices=("A", "B", "C"), default="A")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--ants", type=int, default=200)
    args = ap.parse_args()

    inst = generate(GeneratorConfig(args.n, args.type, args.seed))
    fp = _kernel.FlatProblem(inst)
    params = default_params("MMAS")
    table = PheromoneTable(params.tau0)
    streams = [ant_uniforms(args.seed, 0, a, 2 * fp.T + 2) for a in range(args.ants)]

    backends = _kernel.available_backends()
    print(f"instance {args.type} n={args.n} tasks={fp.T}, {args.ants} ants")
    results = {}
    for name in backends:
        seconds, out = time_backend(fp, name, streams, params, table)
        results[name] = out
        print(f"{name:>8}: {seconds:8.3f} s  {1e3 * seconds / args.ants:7.3f} ms/ant")
    if len(results) == 2:
        same = results["cython"] == results["python"]
        print("identical schedules:", same)


if __name__ == "__main__":
    main()
