"""Compare the numba and numpy enumeration kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Both paths must return identical results; the script checks that before timing.
JIT compilation is excluded by a warm-up call.
"""
import argparse
import time

import numpy as np

from disclab import _kernels, reduce_zero, setsplit


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_min_unsplit(n, repeat):
    inst = setsplit.generate_random(n, (3 * n) // 4, 3, seed=n)
    masks = _kernels.set_masks(inst.sets, n)
    rows = {}
    for flag in (True, False):
        _kernels.min_unsplit(masks, min(n, 10), use_numba=flag)  # warm-up
        rows[flag] = best_of(lambda: _kernels.min_unsplit(masks, n, use_numba=flag), repeat)
    return rows


def bench_kernel_signings(n, repeat):
    inst, _ = setsplit.generate_satisfiable(n, (3 * n) // 4, 3, seed=n, cover=True)
    fam = reduce_zero.build(inst)
    P = fam.vectors
    x0 = np.zeros(fam.N)
    rows = {}
    for flag in (True, False):
        _kernels.kernel_signings(P[:, :8], x0[:8], 1e-9, use_numba=flag)
        rows[flag] = best_of(lambda: _kernels.kernel_signings(P, x0, 1e-9, use_numba=flag), repeat)
    return fam.N, rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':<16}{'size':>6}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for n in (16, 20, 22, 24):
        rows = bench_min_unsplit(n, args.repeat)
        assert rows[True][1] == rows[False][1]
        tn, tp = rows[True][0], rows[False][0]
        print(f"{'min_unsplit':<16}{n:>6}{tn:>12.4f}{tp:>12.4f}{tp / tn:>10.1f}")
    for n in (8, 12, 16, 20):
        N, rows = bench_kernel_signings(n, args.repeat)
        if N > 22:
            continue
        assert np.array_equal(rows[True][1], rows[False][1])
        tn, tp = rows[True][0], rows[False][0]
        print(f"{'kernel_signings':<16}{N:>6}{tn:>12.4f}{tp:>12.4f}{tp / tn:>10.1f}")


if __name__ == "__main__":
    main()
