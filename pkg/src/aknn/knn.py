"""Classic k-nearest-neighbour classification by exhaustive scan."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import (
    Dataset,
    DimensionMismatch,
    HyperParams,
    KTooLarge,
    UnlabeledInstance,
    as_vector,
    validate_dataset,
)
from .metrics import cdist


class Neighbor(NamedTuple):
    index: int
    distance: float
    label: str


@dataclass(frozen=True, eq=False)
class KnnModel:
    """A fitted kNN model. Being a lazy learner, it is just the stored training set."""

    training: Dataset
    params: HyperParams

    @property
    def k(self) -> int:
        return self.params.k

    @property
    def dim(self) -> int:
        return self.training.dim


def fit(training: Dataset, params: HyperParams) -> KnnModel:
    validate_dataset(training)
    for i, lab in enumerate(training.labels):
        if lab is None:
            raise UnlabeledInstance(f"training instance {i} has no label")
    if params.k > len(training):
        raise KTooLarge(f"k={params.k} exceeds the {len(training)} training instances")
    return KnnModel(training, params)


def _as_queries(model: KnnModel, queries) -> np.ndarray:
    if isinstance(queries, Dataset):
        queries = queries.features
    x = np.asarray(queries, dtype=np.float64)
    if x.ndim == 1:
        x = as_vector(x)[None, :]
    if x.ndim != 2 or (x.shape[0] and x.shape[1] != model.dim):
        raise DimensionMismatch(
            f"queries have shape {x.shape}, model expects {model.dim} features"
        )
    return x.reshape(x.shape[0], model.dim)


def kneighbors(model: KnnModel, queries) -> tuple[np.ndarray, np.ndarray]:
    """Indices and distances of the k nearest training rows for every query.

    Returns two ``(m, k)`` arrays sorted ascending by distance. Equal
    distances are ordered by training index.
    """
    x = _as_queries(model, queries)
    dists = cdist(model.params.metric, x, model.training.features)
    order = np.argsort(dists, axis=1, kind="stable")[:, : model.k]
    return order, np.take_along_axis(dists, order, axis=1)


def neighbors(model: KnnModel, query) -> list[Neighbor]:
    """The k nearest training instances of one query, nearest first."""
    idx, dist = kneighbors(model, as_vector(query))
    labels = model.training.labels
    return [Neighbor(int(i), float(d), labels[i]) for i, d in zip(idx[0], dist[0])]


def majority_vote(labels: Sequence[str]) -> str:
    """Most frequent label; ties go to the tied label that appears first.

    ``labels`` must be ordered nearest first, so the tie-break picks the label
    of the closest neighbor among the tied classes.
    """
    counts = Counter(labels)
    top = max(counts.values())
    for lab in labels:
        if counts[lab] == top:
            return lab
    raise ValueError("no labels to vote on")


def knn_classify(model: KnnModel, query) -> str:
    return majority_vote([n.label for n in neighbors(model, query)])


def predict(model: KnnModel, queries) -> list[str]:
    """Vectorised :func:`knn_classify` over many queries."""
    idx, _ = kneighbors(model, queries)
    labels = model.training.labels
    return [majority_vote([labels[i] for i in row]) for row in idx]
