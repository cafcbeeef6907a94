"""Compiled vs numpy kernels on the workloads the sweeps actually run.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Prints one line per (workload, backend) with the best wall time and the
speedup of the compiled core over the numpy path.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gfl import _kernels
from gfl.chmorph import phi_seq
from gfl.fields import default_field
from gfl.gamma import mul_plan
from gfl.linalg import MatrixFq, rank, rank_generic


def _best(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads(quick: bool):
    rng = np.random.default_rng(7)
    n = 256 if quick else 768
    F2, F3, F4 = default_field(2), default_field(3), default_field(4)
    A2 = MatrixFq(F2, rng.integers(0, 2, (n, n), dtype=np.uint8))
    A3 = MatrixFq(F3, rng.integers(0, 3, (n, n), dtype=np.uint8))
    A4 = MatrixFq(F4, rng.integers(0, 4, (n // 2, 4 * n), dtype=np.uint8))
    yield f"rank GF(2) packed {n}x{n}", lambda: rank(A2)
    yield f"rank GF(2) table {n}x{n}", lambda: rank_generic(A2)
    yield f"rank GF(3) {n}x{n}", lambda: rank(A3)
    yield f"rank GF(4) {n // 2}x{4 * n}", lambda: rank(A4)
    seq, d = ((5, 2), 3) if quick else ((6, 3), 4)
    mul_plan.cache_clear()
    phi_seq(F2, seq, d)  # build the product tables outside the timed region
    yield f"phi GF(2) s={seq} d={d}", lambda: phi_seq(F2, seq, d)
    phi_seq(F3, (4, 2), 3)
    yield "phi GF(3) s=(4,2) d=3", lambda: phi_seq(F3, (4, 2), 3)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args(argv)
    print(f"backends available: {', '.join(_kernels.AVAILABLE)}")
    for name, fn in workloads(args.quick):
        res = {}
        for be in _kernels.AVAILABLE:
            with _kernels.using(be):
                res[be] = _best(fn, args.repeat)
        line = "  ".join(f"{be}={t * 1e3:9.2f} ms" for be, t in res.items())
        if "cython" in res:
            line += f"  speedup x{res['python'] / res['cython']:.1f}"
        print(f"{name:<32} {line}")


if __name__ == "__main__":
    main()
