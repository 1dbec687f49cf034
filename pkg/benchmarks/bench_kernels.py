"""Compare the numba and numpy flavours of the hot loops.

Two views are reported:

* micro: one Goursat successive-approximation term and one row-trapezoid
  sweep, calling both flavours directly in this process;
* end to end: ``build_kernel`` plus ``apply_T`` in fresh interpreters with
  ``TRANSMUTATION_NO_NUMBA`` set to 0 and to 1.

Usage: python benchmarks/bench_kernels.py [--n 1000 2000] [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from transmutation import _kernels
from transmutation._accel import HAVE_NUMBA
from transmutation.grid import Grid
from transmutation.kernel import diamond_mask

END_TO_END = """
import json, time
from transmutation import _kernels, apply_T, build_kernel, potentials, Grid
g = Grid(1.0, {n})
q = potentials.polynomial(g, [0, 0, 1])
t0 = time.perf_counter(); K = build_kernel(q); t1 = time.perf_counter()
u = g.sample(lambda x: x**3)
apply_T(K, u); t2 = time.perf_counter()
print(json.dumps({{"backend": _kernels.BACKEND, "kernel": t1 - t0, "apply": t2 - t1, "terms": K.iterations}}))
"""


def micro(n, repeat):
    rng = np.random.default_rng(0)
    g = Grid(1.0, n)
    mask = diamond_mask(g)
    qsum = rng.standard_normal((n + 1, n + 1)) + 0j
    prev = np.where(mask, rng.standard_normal((n + 1, n + 1)), 0) + 0j
    mat = rng.standard_normal((n + 1, n + 1)) + 0j
    u = rng.standard_normal(n + 1) + 0j
    i = np.arange(n + 1)
    lo, hi = np.minimum(i, n - i), np.maximum(i, n - i)
    cases = {
        "goursat_term": (_kernels._goursat_term_numpy, _kernels._goursat_term_numba,
                         (qsum, prev, mask, g.h, g.center)),
        "trapezoid_rows": (_kernels._trapezoid_rows_numpy, _kernels._trapezoid_rows_numba,
                           (mat, u, lo, hi, g.h)),
    }
    rows = []
    for name, (f_np, f_nb, args) in cases.items():
        f_nb(*args)  # compile outside the timing
        t_np = min(timeit.repeat(lambda: f_np(*args), number=1, repeat=repeat))
        t_nb = min(timeit.repeat(lambda: f_nb(*args), number=1, repeat=repeat))
        rows.append((name, n, t_np, t_nb))
    return rows


def end_to_end(n):
    out = {}
    for flag in ("1", "0"):
        env = dict(os.environ, TRANSMUTATION_NO_NUMBA=flag)
        code = END_TO_END.format(n=n)
        # first run warms the on-disk numba cache
        subprocess.run([sys.executable, "-c", code], env=env, check=True, capture_output=True)
        proc = subprocess.run([sys.executable, "-c", code], env=env, check=True, capture_output=True, text=True)
        res = json.loads(proc.stdout)
        out[res["backend"]] = res
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[500, 1000, 2000])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        sys.exit("numba is not installed; install the 'fast' extra to compare backends")

    print(f"{'loop':<16}{'n':>6}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>9}")
    for n in args.n:
        for name, nn, t_np, t_nb in micro(n, args.repeat):
            print(f"{name:<16}{nn:>6}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>8.1f}x")

    print()
    print(f"{'stage':<16}{'n':>6}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>9}")
    for n in args.n:
        res = end_to_end(n)
        for stage in ("kernel", "apply"):
            t_np, t_nb = res["numpy"][stage], res["numba"][stage]
            print(f"{stage:<16}{n:>6}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
