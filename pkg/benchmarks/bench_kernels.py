"""Benchmark the enumeration kernels: active backend vs pure Python.

Times three workloads through the public dispatcher (which uses the
compiled extension when it is importable) and through the pure-Python
fallback directly:

- union_reduction: the telescoping-product reduction, swept over a range
  of indices (one call per index, like the identity sweep does);
- tail_mass: Gray-code enumeration of all occurrence patterns, counting
  weighted mass beyond a threshold;
- atom_table: the same enumeration, materializing the full atom table.

Run:  python3 benchmarks/bench_kernels.py [--sweep 2000] [--events 14,18,20]
"""

import argparse
import time

from halfstep import _kernels
from halfstep._kernels import _pure


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def tail_workload(module, events):
    ks = [k + 2 for k in range(events)]
    cs = [(3 * k + 1) * (1 if k % 2 == 0 else -1) for k in ks]
    base = 7
    thr = sum(abs(c) for c in cs) // 3
    return lambda: module.tail_mass(ks, cs, base, thr)


def atom_workload(module, events):
    ks = [k + 2 for k in range(events)]
    cs = [(2 * k - 5) for k in ks]
    return lambda: module.atom_table(ks, cs, 3)


def sweep_workload(module, limit):
    def run():
        for n in range(1, limit + 1):
            module.union_reduction(n)

    return run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sweep", type=int, default=2000,
                    help="upper index for the union_reduction sweep")
    ap.add_argument("--events", default="14,18,20",
                    help="comma-separated event counts for the enumerations")
    ap.add_argument("--repeat", type=int, default=3,
                    help="repetitions per measurement (best-of)")
    args = ap.parse_args()
    events = [int(x) for x in args.events.split(",") if x.strip()]

    rows = []
    label = f"n=1..{args.sweep}"
    rows.append((
        "union_reduction sweep", label,
        best_of(sweep_workload(_kernels, args.sweep), args.repeat),
        best_of(sweep_workload(_pure, args.sweep), args.repeat),
    ))
    for t in events:
        rows.append((
            "tail_mass", f"2^{t} patterns",
            best_of(tail_workload(_kernels, t), args.repeat),
            best_of(tail_workload(_pure, t), args.repeat),
        ))
    for t in events:
        rows.append((
            "atom_table", f"2^{t} patterns",
            best_of(atom_workload(_kernels, t), args.repeat),
            best_of(atom_workload(_pure, t), args.repeat),
        ))

    col = f"{_kernels.BACKEND} (active)"
    print(f"{'kernel':<24}{'size':<16}{col:<24}{'pure-python':<16}speedup")
    for name, size, active, pure in rows:
        speedup = pure / active if active > 0 else float("inf")
        print(f"{name:<24}{size:<16}{active:<24.6f}{pure:<16.6f}{speedup:>6.1f}x")


if __name__ == "__main__":
    main()
