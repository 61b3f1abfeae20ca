"""Time the numba and pure-numpy limb kernels on the same inputs.

Usage: python benchmarks/bench_kernels.py [--n 200 1000 2000] [--repeat 5]

Both backends do integer-only work on the same limb arrays, so outputs are
compared for exact equality before any timing is reported.
"""
import argparse
import time

import numpy as np

from maxent_triangle import fixedpoint as fx
from maxent_triangle.construction import construct
from maxent_triangle.kernels import get_backend
from maxent_triangle.precision import PrecisionContext
from maxent_triangle.triangle import num_orbits, orbit_offsets


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return out, min(times)


def kernel_jobs(backend, c):
    n, table = c.solution.n, c.table
    offsets = orbit_offsets(n)
    k = fx.n_limbs(table.frac_bits)
    full, half = c.coeffs.limb_tables
    beta = np.array(c.beta.vector.limbs)
    pi = np.array(c.pi.vector.limbs)

    def beta_interior():
        out = np.zeros((num_orbits(n), k), np.int64)
        backend.beta_interior(n, table.limbs, offsets, out)
        return out

    def apply_moves():
        out = beta.copy()
        backend.apply_moves(n, 2, (n - 2) // 2, full, half, offsets, out)
        backend.normalize(out)
        return out

    def row_sums():
        out = np.zeros((n + 1, k), np.int64)
        backend.row_sums(n, offsets, pi, out)
        return out

    return {"beta_interior": beta_interior, "apply_moves": apply_moves, "row_sums": row_sums,
            "argmin": lambda: backend.argmin(pi)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[200, 1000, 2000])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--prec", type=int, default=128)
    args = ap.parse_args()

    numpy_be, numba_be = get_backend("numpy"), get_backend("numba")
    print(f"{'n':>5} {'kernel':<14} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for n in args.n:
        c = construct(n, PrecisionContext(args.prec))
        slow, fast = kernel_jobs(numpy_be, c), kernel_jobs(numba_be, c)
        for name in slow:
            fast[name]()  # compile outside the timed region
            a, t_np = best_of(slow[name], args.repeat)
            b, t_nb = best_of(fast[name], args.repeat)
            if not np.array_equal(np.asarray(a), np.asarray(b)):
                raise SystemExit(f"backends disagree on {name} at n={n}")
            print(f"{n:5d} {name:<14} {t_np * 1e3:10.2f} {t_nb * 1e3:10.2f} {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
