#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Runs each kernel pair on a representative workload and prints a table of
per-call times and speedups, plus an end-to-end BFS comparison. Numba
compilation happens in an untimed warmup call.

Usage: python benchmarks/bench_backends.py [--repeats 5]
"""

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from expander_forge import backend
from expander_forge.modp import FpVector, ep_table
from expander_forge.perm import orbit_matrix
from expander_forge.rng import master_rng


def timeit(fn, repeats):
    fn()  # warmup (numba compiles here)
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def workloads():
    rng = master_rng(0)

    m = rng.standard_normal((200, 200))
    m = (m + m.T) / 2
    yield "jacobi_eigh (dim 200)", (
        lambda: backend.jacobi_eigh_numpy(m),
        lambda: backend.jacobi_eigh_numba(m),
    )

    p = 2003
    ep = np.asarray(ep_table(p))
    counts = np.bincount(rng.integers(0, p, 512), minlength=p).astype(np.float64)
    yield f"support_one_moduli (p={p})", (
        lambda: backend.support_one_moduli_numpy(counts, p, ep),
        lambda: backend.support_one_moduli_numba(counts, p, ep),
    )

    p2 = 13
    ep2 = np.asarray(ep_table(p2))
    rows = orbit_matrix(FpVector([0, 1, 2, 3, 4, 5], p2))
    wmat = rng.integers(0, p2, (4096, 6))
    yield "orbit_char_means (720 x 4096)", (
        lambda: backend.orbit_char_means_numpy(rows, wmat, p2, ep2),
        lambda: backend.orbit_char_means_numba(rows, wmat, p2, ep2),
    )

    n, p3 = 5, 7
    perms = np.array([rng.permutation(n) for _ in range(20006)])
    invs = np.empty_like(perms)
    for i, row in enumerate(perms):
        invs[i][row] = np.arange(n)
    fvec = rng.integers(0, p3, (20000, n))
    gvec = rng.integers(0, p3, (6, n))
    args = (fvec, perms[:20000], invs[:20000], gvec, perms[20000:], invs[20000:], p3)
    yield "expand_products (20000 x 6)", (
        lambda: backend.expand_products_numpy(*args),
        lambda: backend.expand_products_numba(*args),
    )


def bench_bfs(repeats):
    """End-to-end BFS on a 75000-element group under each backend."""
    from expander_forge import semidirect

    gen = semidirect.build_Y(5, 5)
    saved = backend.expand_products
    times = {}
    for name in ("numpy", "numba"):
        impl = getattr(backend, f"expand_products_{name}", None)
        if impl is None:
            continue
        backend.expand_products = impl
        try:
            times[name] = timeit(lambda: semidirect.bfs_diameter(gen), repeats)
        finally:
            backend.expand_products = saved
    return times


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if not backend.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return 1

    print(f"{'kernel':<34} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, (numpy_fn, numba_fn) in workloads():
        t_np = timeit(numpy_fn, args.repeats)
        t_nb = timeit(numba_fn, args.repeats)
        print(f"{name:<34} {t_np * 1e3:>8.2f}ms {t_nb * 1e3:>8.2f}ms {t_np / t_nb:>7.1f}x")

    times = bench_bfs(args.repeats)
    if "numba" in times:
        print(f"{'bfs_diameter (n=5, p=5, |G|=75000)':<34} "
              f"{times['numpy'] * 1e3:>8.2f}ms {times['numba'] * 1e3:>8.2f}ms "
              f"{times['numpy'] / times['numba']:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
