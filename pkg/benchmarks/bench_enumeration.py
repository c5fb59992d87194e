"""Time maximal-isotropic enumeration with the numba and numpy backends.

    python3 benchmarks/bench_enumeration.py [--repeat N]

The first numba call compiles (or loads the on-disk cache); it is timed
separately and excluded from the per-case figures.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from isoindex import RingSpec
from isoindex.exactalg import field_tables
from isoindex.kernels import HAVE_NUMBA, enumerate_maximal
from isoindex.manifolds import compile_expr, parse_expr
from isoindex.skewmap import _compressed_array

CASES = [
    ("Sg(2) x S(1)", "GF(3)"),
    ("T(3) # Sg(1) x S(1)", "GF(3)"),
    ("Sg(3)", "GF(3)"),
    ("T(3) x S(1)", "GF(5)"),
    ("Sg(2) x S(2) # T(2) x S(2)", "GF(2)"),
    ("RP3 # RP3 # S(1) x S(2) # T(3)", "GF(2)"),
    ("S(1) x S(2) # S(1) x S(2) # S(1) x S(2)", "GF(3)"),
]


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    if HAVE_NUMBA:
        R = RingSpec.prime_field(2)
        t0 = time.perf_counter()
        enumerate_maximal(np.zeros((0, 1, 1), dtype=np.int64), 1, field_tables(R), 10, "numba")
        print(f"numba warm-up (compile or cache load): {time.perf_counter() - t0:.2f}s")

    print(f"{'case':44s} {'ring':6s} {'n':>2s} {'found':>6s} " + " ".join(f"{b:>10s}" for b in backends)
          + ("    speedup" if len(backends) == 2 else ""))
    for text, ring in CASES:
        R = RingSpec.parse(ring)
        phi = compile_expr(parse_expr(text), R)
        G = _compressed_array(phi)
        T = field_tables(R)
        found = len(enumerate_maximal(G, phi.dim_l, T, 10**8, backends[0]))
        times = [best_of(lambda b=b: enumerate_maximal(G, phi.dim_l, T, 10**8, b), args.repeat) for b in backends]
        row = f"{text:44s} {ring:6s} {phi.dim_l:2d} {found:6d} " + " ".join(f"{t * 1e3:8.1f}ms" for t in times)
        if len(times) == 2:
            row += f" {times[0] / times[1]:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
