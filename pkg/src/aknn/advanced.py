"""Advanced kNN: kNN with rejection of queries that fall outside every class.

Each class gets a Training Class Area (TCA), the largest distance between two
of its training instances. A query whose nearest-neighbour distance exceeds
``gc * TCA`` of its expected class is reported as unknown rather than forced
into a known label.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from . import knn
from .core import (
    ClassRegion,
    Dataset,
    EmptyClass,
    HyperParams,
    MinDistMode,
    Prediction,
    ZeroAreaWarning,
    as_vector,
    check_gc,
    DistanceMetric,
)
from .metrics import max_pairwise


@dataclass(frozen=True, eq=False)
class AknnModel:
    base: knn.KnnModel
    regions: Mapping[str, ClassRegion]
    gc: float
    mode: MinDistMode = MinDistMode.GLOBAL_MIN

    @property
    def k(self) -> int:
        return self.base.k

    @property
    def metric(self) -> DistanceMetric:
        return self.base.params.metric

    @property
    def training(self) -> Dataset:
        return self.base.training

    @property
    def max_area(self) -> float:
        return max(r.area for r in self.regions.values())


def tca(class_instances: Sequence, metric: DistanceMetric) -> float:
    """Training Class Area: the largest pairwise distance within one class."""
    x = np.asarray(class_instances, dtype=np.float64)
    if x.size == 0 or x.shape[0] == 0:
        raise EmptyClass("cannot compute the area of a class with no instances")
    if x.ndim == 1:
        x = x[None, :]
    return max_pairwise(metric, x)


def _regions(training: Dataset, metric: DistanceMetric, gc: float) -> dict[str, ClassRegion]:
    labels = np.asarray(training.labels, dtype=object)
    regions = {}
    for lab in training.label_alphabet():
        members = training.features[labels == lab]
        t = tca(members, metric)
        regions[lab] = ClassRegion(lab, t, gc * t, int(members.shape[0]))
    return regions


def fit_aknn(
    training: Dataset,
    params: HyperParams,
    mode: MinDistMode | str = MinDistMode.GLOBAL_MIN,
) -> AknnModel:
    """Fit kNN and compute one rejection region per training class.

    A class whose TCA is zero (one instance, or only identical instances)
    gets a zero area, so it accepts nothing but exact matches; a
    :class:`ZeroAreaWarning` names such classes.
    """
    base = knn.fit(training, params)
    gc = check_gc(params.gc)
    regions = _regions(training, params.metric, gc)
    degenerate = sorted(lab for lab, r in regions.items() if r.tca == 0.0)
    if degenerate:
        warnings.warn(
            f"classes with zero training class area (only exact matches will be "
            f"accepted): {', '.join(degenerate)}",
            ZeroAreaWarning,
            stacklevel=2,
        )
    return AknnModel(base, MappingProxyType(regions), gc, MinDistMode(mode))


def set_gap_constant(model: AknnModel, gc: float) -> AknnModel:
    """Return a copy of ``model`` whose areas are ``gc * tca``; TCAs are reused."""
    gc = check_gc(gc)
    regions = {lab: replace(r, area=gc * r.tca) for lab, r in model.regions.items()}
    params = replace(model.base.params, gc=gc)
    base = knn.KnnModel(model.base.training, params)
    return AknnModel(base, MappingProxyType(regions), gc, model.mode)


def _predict_row(model: AknnModel, idx: np.ndarray, dist: np.ndarray) -> Prediction:
    labels = model.training.labels
    row_labels = [labels[i] for i in idx]
    expected = knn.majority_vote(row_labels)
    if model.mode is MinDistMode.GLOBAL_MIN:
        min_dist = float(dist[0])
    else:
        min_dist = float(min(d for d, lab in zip(dist, row_labels) if lab == expected))
    return Prediction(
        expected_class=expected,
        min_dist=min_dist,
        area_of_expected=model.regions[expected].area,
        neighbor_indices=tuple(int(i) for i in idx),
    )


def aknn_classify(model: AknnModel, query) -> Prediction:
    idx, dist = knn.kneighbors(model.base, as_vector(query))
    return _predict_row(model, idx[0], dist[0])


def classify_many(model: AknnModel, queries) -> list[Prediction]:
    """Vectorised :func:`aknn_classify` over the rows of ``queries``."""
    return classify_from_neighbors(model, *knn.kneighbors(model.base, queries))


def classify_from_neighbors(model: AknnModel, idx: np.ndarray, dist: np.ndarray) -> list[Prediction]:
    """Predictions from precomputed :func:`knn.kneighbors` output.

    Neighbors do not depend on the gap constant, so a gc sweep can reuse them.
    """
    return [_predict_row(model, i, d) for i, d in zip(idx, dist)]
