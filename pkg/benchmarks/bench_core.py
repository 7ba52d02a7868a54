"""Time the compiled and pure-Python cores on the O(N^2) sweep.

    python benchmarks/bench_core.py --sizes 256 1024 4096 --repeat 3 --out bench.csv
"""

import argparse
import csv
import sys
import time

import numpy as np

from powervolterra import _core
from powervolterra._core import KIND_CODES


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(sizes, repeat, m):
    backends = _core.backends()
    rows = []
    for N in sizes:
        h = 1.0 / N
        y1 = h ** (1.0 / m)
        results = {}
        for name, mod in backends.items():
            for kind in ("const", "expconv"):
                secs, y = best_of(
                    lambda: mod.midpoint_solve_builtin(KIND_CODES[kind], (1.0,) if kind == "const" else (),
                                                       m, h, N, y1),
                    repeat,
                )
                results[(name, kind)] = y
                rows.append({"backend": name, "kernel": kind, "N": N, "seconds": secs})
        if "cython" in backends:
            for kind in ("const", "expconv"):
                a, b = results[("cython", kind)], results[("python", kind)]
                diff = float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))
                for r in rows[-4:]:
                    if r["kernel"] == kind:
                        r["max_rel_diff"] = diff
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[256, 1024, 4096])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--m", type=float, default=2.0)
    p.add_argument("--out", help="write CSV here instead of stdout")
    args = p.parse_args(argv)
    if any(N < 2 or N % 2 for N in args.sizes):
        p.error("sizes must be even integers >= 2")

    rows = run(args.sizes, args.repeat, args.m)
    fieldnames = ["backend", "kernel", "N", "seconds", "max_rel_diff"]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=fieldnames, restval="")
        w.writeheader()
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()

    by = {(r["backend"], r["kernel"], r["N"]): r["seconds"] for r in rows}
    if "cython" in _core.backends():
        for N in args.sizes:
            for kind in ("const", "expconv"):
                speedup = by[("python", kind, N)] / by[("cython", kind, N)]
                print(f"# N={N} {kind}: cython {speedup:.1f}x faster", file=sys.stderr)
    else:
        print("# compiled core not built; only the Python fallback was timed", file=sys.stderr)


if __name__ == "__main__":
    main()
