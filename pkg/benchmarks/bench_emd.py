"""Compare the compiled and pure-Python transportation solvers on the EMD.

Usage: python3 benchmarks/bench_emd.py [--sizes 8,16,24] [--repeats 3]

Each case solves the earth mover's distance between two random softmax-style
distributions at the given grid resolution, which exercises the dense
(every-bin-nonzero) worst case of the solver.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from persal import SaliencyGrid, emd
from persal.transport import HAVE_EXTENSION


def bench_case(size: int, repeats: int, backend: str) -> float:
    import persal.transport as transport
    from persal.transport import get_backend

    saved = transport.solve_transport
    transport.solve_transport = get_backend(backend)  # metrics.emd looks this up per call
    try:
        rng = np.random.default_rng(0)
        best = float("inf")
        for _ in range(repeats):
            p = SaliencyGrid(rng.dirichlet(np.ones(size * size)).reshape(size, size))
            q = SaliencyGrid(rng.dirichlet(np.ones(size * size)).reshape(size, size))
            t0 = time.perf_counter()
            emd(p, q, resolution=size)
            best = min(best, time.perf_counter() - t0)
        return best
    finally:
        transport.solve_transport = saved


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="8,16,24")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = ["python"] + (["c"] if HAVE_EXTENSION else [])
    if not HAVE_EXTENSION:
        print("note: compiled extension not available; timing pure Python only")

    print(f"{'grid':>6} " + " ".join(f"{b + ' (s)':>12}" for b in backends) +
          ("      speedup" if len(backends) == 2 else ""))
    for size in sizes:
        times = {b: bench_case(size, args.repeats, b) for b in backends}
        row = f"{size}x{size:<3} " + " ".join(f"{times[b]:>12.4f}" for b in backends)
        if len(backends) == 2:
            row += f"      {times['python'] / times['c']:>6.1f}x"
        print(row)


if __name__ == "__main__":
    main()
