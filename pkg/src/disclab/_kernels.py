"""Enumeration kernels.

Every kernel has a numba implementation and a pure-numpy implementation with
identical results. The numba path is used when numba imports and the
environment does not set ``DISCLAB_NUMBA=0``. ``DISCLAB_THREADS`` caps the
number of numba worker threads.

Index convention shared by all enumerations: integer ``k`` in ``[0, 2**n)``
encodes the sign vector whose coordinate ``i`` is ``-1`` iff bit ``n-1-i`` of
``k`` is set. Increasing ``k`` is therefore lexicographic order with
``+1 < -1`` per coordinate.
"""
import os

import numpy as np

try:
    import numba
    from numba import njit, prange
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("DISCLAB_NUMBA", "1").lower() not in ("0", "false", "no", "off")

_CHUNK = 1 << 16

if HAVE_NUMBA and "NUMBA_THREADING_LAYER" not in os.environ:
    # skip the TBB probe, which warns on older TBB installs
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


def _configure_threads():
    threads = os.environ.get("DISCLAB_THREADS")
    if not (HAVE_NUMBA and threads):
        return
    try:
        numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))
    except ValueError:
        pass


_configure_threads()


def decode_signs(indices, n):
    """Rows of +-1 (int8) for the given enumeration indices."""
    indices = np.asarray(indices, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    bits = (indices[:, None] >> shifts) & 1
    return (1 - 2 * bits).astype(np.int8)


def encode_signs(values):
    values = np.asarray(values)
    n = values.shape[-1]
    weights = np.int64(1) << np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((values < 0).astype(np.int64) * weights).sum(axis=-1)


def set_masks(sets, n):
    """Bit mask per 0-indexed 4-tuple, in the enumeration convention."""
    masks = np.zeros(len(sets), dtype=np.int64)
    for j, s in enumerate(sets):
        for i in s:
            masks[j] |= np.int64(1) << np.int64(n - 1 - i)
    return masks


# --------------------------------------------------------------------------
# minimum number of unsplit sets over all assignments


def _min_unsplit_numpy(masks, n):
    total = 1 << n
    best_count = len(masks) + 1
    best_index = -1
    for start in range(0, total, _CHUNK):
        ks = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        counts = np.zeros(len(ks), dtype=np.int64)
        for mask in masks:
            counts += np.bitwise_count(ks & mask) != 2
        j = int(np.argmin(counts))
        if counts[j] < best_count:
            best_count, best_index = int(counts[j]), start + j
            if best_count == 0:
                break
    return best_count, best_index


if HAVE_NUMBA:

    @njit(cache=True)
    def _popcount_small(x):
        c = 0
        while x:
            x &= x - 1
            c += 1
        return c

    @njit(parallel=True, cache=True)
    def _min_unsplit_chunks(masks, n, nchunks):
        total = np.int64(1) << n
        size = (total + nchunks - 1) // nchunks
        best_counts = np.full(nchunks, masks.shape[0] + 1, dtype=np.int64)
        best_idx = np.full(nchunks, -1, dtype=np.int64)
        for c in prange(nchunks):
            lo = c * size
            hi = min(lo + size, total)
            bc = masks.shape[0] + 1
            bi = np.int64(-1)
            for k in range(lo, hi):
                cnt = 0
                for j in range(masks.shape[0]):
                    if _popcount_small(k & masks[j]) != 2:
                        cnt += 1
                        if cnt >= bc:
                            break
                if cnt < bc:
                    bc = cnt
                    bi = k
                    if bc == 0:
                        break
            best_counts[c] = bc
            best_idx[c] = bi
        return best_counts, best_idx

    @njit(parallel=True, cache=True)
    def _kernel_flags(P, x0, n, tol, lo, hi):
        d = P.shape[0]
        out = np.zeros(hi - lo, dtype=np.bool_)
        for t in prange(hi - lo):
            k = lo + t
            ok = True
            for r in range(d):
                acc = 0.0
                for i in range(n):
                    s = 1.0 - 2.0 * ((k >> (n - 1 - i)) & 1)
                    acc += P[r, i] * (s - x0[i])
                if abs(acc) > tol:
                    ok = False
                    break
            out[t] = ok
        return out


def _min_unsplit_numba(masks, n):
    nchunks = max(1, min(1 << n, 64))
    counts, idx = _min_unsplit_chunks(masks, n, nchunks)
    # chunks are in index order, so the first minimal chunk holds the smallest index
    j = int(np.argmin(counts))
    return int(counts[j]), int(idx[j])


def min_unsplit(masks, n, use_numba=None):
    """Return ``(count, index)``: fewest unsplit sets, smallest index attaining it."""
    masks = np.ascontiguousarray(masks, dtype=np.int64)
    if len(masks) == 0:
        return 0, 0
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        return _min_unsplit_numba(masks, n)
    return _min_unsplit_numpy(masks, n)


# --------------------------------------------------------------------------
# signings whose signed sum V (x - x0) vanishes


def _kernel_numpy(P, x0, tol):
    n = P.shape[1]
    total = 1 << n
    found = []
    for start in range(0, total, _CHUNK):
        ks = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        W = (decode_signs(ks, n) - x0) @ P.T
        hit = np.all(np.abs(W) <= tol, axis=1)
        found.append(ks[hit])
    return np.concatenate(found) if found else np.zeros(0, dtype=np.int64)


def _kernel_numba(P, x0, tol):
    n = P.shape[1]
    total = 1 << n
    found = []
    for start in range(0, total, _CHUNK):
        hi = min(start + _CHUNK, total)
        flags = _kernel_flags(P, x0, n, tol, start, hi)
        found.append(np.flatnonzero(flags).astype(np.int64) + start)
    return np.concatenate(found)


def kernel_signings(P, x0, tol, use_numba=None):
    """Enumeration indices of signings x with max|P (x - x0)| <= tol, ascending."""
    P = np.ascontiguousarray(P, dtype=np.float64)
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        return _kernel_numba(P, x0, float(tol))
    return _kernel_numpy(P, x0, float(tol))
