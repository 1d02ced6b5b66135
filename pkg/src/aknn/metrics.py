"""Euclidean, Manhattan and Minkowski distances over feature vectors."""
from __future__ import annotations

import numpy as np

from . import _kernels
from .core import DimensionMismatch, DistanceMetric, NonFiniteDistance, as_vector


def _checked(values):
    if not np.all(np.isfinite(values)):
        raise NonFiniteDistance(
            "distance overflowed float64; rescale the features or lower the Minkowski order"
        )
    return values


def distance(m: DistanceMetric, a, b) -> float:
    """Distance between two feature vectors under metric ``m``.

    >>> distance(DistanceMetric.euclidean(), [0, 0], [3, 4])
    5.0
    """
    a = as_vector(a)
    b = as_vector(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"vectors have lengths {a.shape[0]} and {b.shape[0]}")
    out = _kernels.cdist(a[None, :], b[None, :], int(m.kind), m.q)
    return float(_checked(out)[0, 0])


def cdist(m: DistanceMetric, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance matrix between the rows of ``a`` (m, d) and ``b`` (n, d)."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise DimensionMismatch(f"incompatible shapes {a.shape} and {b.shape}")
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((a.shape[0], b.shape[0]))
    return _checked(_kernels.cdist(a, b, int(m.kind), m.q))


def paired(m: DistanceMetric, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise distances ``d(a[i], b[i])`` for two equally shaped matrices."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim != 2 or a.shape != b.shape:
        raise DimensionMismatch(f"incompatible shapes {a.shape} and {b.shape}")
    return _checked(_kernels.paired(a, b, int(m.kind), m.q))


def max_pairwise(m: DistanceMetric, x: np.ndarray) -> float:
    """Largest distance between any two rows of ``x`` (0 for fewer than two rows)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape[0] < 2:
        return 0.0
    return float(_checked(_kernels.max_pairwise(x, int(m.kind), m.q)))
