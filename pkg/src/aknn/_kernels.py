"""Distance kernels with a numba path and a pure-numpy fallback.

Both paths accumulate per-coordinate terms in natural index order and apply
the same float operations, so they return bit-identical results. Set
``AKNN_DISABLE_NUMBA=1`` to force the numpy path; it is also used when
numba is not importable.

Metric codes: 0 Euclidean, 1 Manhattan, 2 Minkowski (order ``q``).
"""
import math
import os

import numpy as np

EUCLIDEAN, MANHATTAN, MINKOWSKI = 0, 1, 2

# np.power's SIMD loop is not bit-compatible with libm pow; numba calls libm.
def _scalar_pow(x, q):
    try:
        return math.pow(x, q)
    except OverflowError:
        return math.inf


_libm_pow = np.frompyfunc(_scalar_pow, 2, 1)


def _pow(x, q):
    return _libm_pow(x, q).astype(np.float64)


def _numpy_term(diff, kind, q):
    if kind == EUCLIDEAN:
        return diff * diff
    if kind == MANHATTAN:
        return np.abs(diff)
    return _pow(np.abs(diff), q)


def _numpy_finish(acc, kind, q):
    if kind == EUCLIDEAN:
        return np.sqrt(acc)
    if kind == MANHATTAN:
        return acc
    return _pow(acc, 1.0 / q)


def cdist_numpy(a, b, kind, q):
    """Distances between every row of ``a`` (m, d) and every row of ``b`` (n, d)."""
    m, d = a.shape
    n = b.shape[0]
    acc = np.zeros((m, n))
    # overflow yields inf, which callers turn into an error
    with np.errstate(over="ignore"):
        for j in range(d):
            diff = a[:, j, None] - b[None, :, j]
            acc = acc + _numpy_term(diff, kind, q)
        return _numpy_finish(acc, kind, q)


def paired_numpy(a, b, kind, q):
    """Distance between row ``i`` of ``a`` and row ``i`` of ``b`` for every ``i``."""
    acc = np.zeros(a.shape[0])
    with np.errstate(over="ignore"):
        for j in range(a.shape[1]):
            acc = acc + _numpy_term(a[:, j] - b[:, j], kind, q)
        return _numpy_finish(acc, kind, q)


def max_pairwise_numpy(x, kind, q):
    """Largest distance over all unordered row pairs of ``x``; 0 for a single row."""
    if x.shape[0] < 2:
        return 0.0
    return float(cdist_numpy(x, x, kind, q).max())


try:
    if os.environ.get("AKNN_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes"):
        raise ImportError("numba disabled by AKNN_DISABLE_NUMBA")
    import numba
except ImportError:
    numba = None


if numba is not None:

    @numba.njit(cache=True)
    def _pair(a, i, b, j, kind, q):
        acc = 0.0
        for t in range(a.shape[1]):
            diff = a[i, t] - b[j, t]
            if kind == EUCLIDEAN:
                acc = acc + diff * diff
            elif kind == MANHATTAN:
                acc = acc + abs(diff)
            else:
                acc = acc + abs(diff) ** q
        if kind == EUCLIDEAN:
            return np.sqrt(acc)
        if kind == MANHATTAN:
            return acc
        return acc ** (1.0 / q)

    @numba.njit(cache=True)
    def cdist_numba(a, b, kind, q):
        m = a.shape[0]
        n = b.shape[0]
        out = np.empty((m, n))
        for i in range(m):
            for j in range(n):
                out[i, j] = _pair(a, i, b, j, kind, q)
        return out

    @numba.njit(cache=True)
    def paired_numba(a, b, kind, q):
        out = np.empty(a.shape[0])
        for i in range(a.shape[0]):
            out[i] = _pair(a, i, b, i, kind, q)
        return out

    @numba.njit(cache=True)
    def max_pairwise_numba(x, kind, q):
        best = 0.0
        n = x.shape[0]
        for i in range(n):
            for j in range(i + 1, n):
                dist = _pair(x, i, x, j, kind, q)
                if not np.isfinite(dist):
                    return dist
                if dist > best:
                    best = dist
        return best

    BACKEND = "numba"
    cdist = cdist_numba
    paired = paired_numba
    max_pairwise = max_pairwise_numba
else:
    cdist_numba = paired_numba = max_pairwise_numba = None
    BACKEND = "numpy"
    cdist = cdist_numpy
    paired = paired_numpy
    max_pairwise = max_pairwise_numpy
