"""Domain types shared across the package.

Feature matrices are float64 numpy arrays; labels are plain ``str`` tokens
compared by exact equality.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

#: Reserved label marking injected unknown instances in CSV files and truth vectors.
UNKNOWN = "unknown"


class AknnError(ValueError):
    """Base class for every error raised by this package."""


class DimensionMismatch(AknnError):
    pass


class NonFiniteFeature(AknnError):
    pass


class EmptyDataset(AknnError):
    pass


class UnlabeledInstance(AknnError):
    pass


class KTooLarge(AknnError):
    pass


class EmptyClass(AknnError):
    pass


class NonPositiveGc(AknnError):
    pass


class InvalidMetric(AknnError):
    pass


class NonFiniteDistance(AknnError):
    """A metric overflowed float64 (huge features or huge Minkowski order)."""


class ZeroAreaWarning(UserWarning):
    """A class has a zero training class area, so it only accepts exact matches."""


def as_vector(values) -> np.ndarray:
    """Coerce ``values`` into a finite, non-empty 1-D float64 array."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch(f"feature vector must be 1-D, got shape {v.shape}")
    if v.size == 0:
        raise DimensionMismatch("feature vector must have at least one element")
    if not np.all(np.isfinite(v)):
        raise NonFiniteFeature("feature vector contains NaN or infinity")
    return v


@dataclass(frozen=True)
class Instance:
    features: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "features", as_vector(self.features))


@dataclass(frozen=True, eq=False)
class Dataset:
    """An ordered collection of instances sharing one dimensionality.

    ``features`` has shape ``(n, dim)``; ``labels[i]`` is the label of row
    ``i`` or ``None`` for unlabeled queries. Construction only coerces
    shapes; call :func:`validate_dataset` to check the full set of invariants.
    """

    features: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        x = np.array(self.features, dtype=np.float64)
        if x.ndim == 1 and x.size == 0:
            x = x.reshape(0, 0)
        if x.ndim != 2:
            raise DimensionMismatch(f"features must be 2-D, got shape {x.shape}")
        x.setflags(write=False)
        labels = tuple(self.labels) if len(self.labels) else (None,) * x.shape[0]
        if len(labels) != x.shape[0]:
            raise DimensionMismatch(
                f"{x.shape[0]} feature rows but {len(labels)} labels"
            )
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_instances(cls, instances: Iterable[Instance], dim: Optional[int] = None) -> "Dataset":
        instances = list(instances)
        if dim is None:
            if not instances:
                raise EmptyDataset("cannot infer dim from an empty instance list")
            dim = instances[0].features.shape[0]
        for i, inst in enumerate(instances):
            if inst.features.shape[0] != dim:
                raise DimensionMismatch(
                    f"instance {i} has {inst.features.shape[0]} features, expected {dim}"
                )
        x = np.empty((len(instances), dim))
        for i, inst in enumerate(instances):
            x[i] = inst.features
        return cls(x, tuple(inst.label for inst in instances))

    def __len__(self) -> int:
        return self.features.shape[0]

    def __iter__(self):
        for row, label in zip(self.features, self.labels):
            yield Instance(row, label)

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def is_labeled(self) -> bool:
        return all(lab is not None for lab in self.labels)

    def label_alphabet(self) -> list[str]:
        """Distinct labels in order of first appearance."""
        return list(dict.fromkeys(lab for lab in self.labels if lab is not None))

    def subset(self, indices: Sequence[int]) -> "Dataset":
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(self.features[idx].reshape(len(idx), self.dim),
                       tuple(self.labels[i] for i in idx))

    def concat(self, other: "Dataset") -> "Dataset":
        if len(other) and len(self) and other.dim != self.dim:
            raise DimensionMismatch(f"cannot concatenate dim {self.dim} with dim {other.dim}")
        if not len(self):
            return other
        if not len(other):
            return self
        return Dataset(np.vstack([self.features, other.features]), self.labels + other.labels)


def validate_dataset(d: Dataset) -> None:
    """Raise if ``d`` breaks a dataset invariant; return ``None`` otherwise."""
    if len(d) == 0:
        raise EmptyDataset("dataset has no instances")
    if d.features.ndim != 2 or d.dim < 1:
        raise DimensionMismatch(f"feature matrix has invalid shape {d.features.shape}")
    if len(d.labels) != len(d):
        raise DimensionMismatch(f"{len(d)} rows but {len(d.labels)} labels")
    bad = ~np.isfinite(d.features)
    if bad.any():
        row, col = map(int, np.argwhere(bad)[0])
        raise NonFiniteFeature(f"non-finite feature at row {row}, column {col}")
    for i, lab in enumerate(d.labels):
        if lab is not None and (not isinstance(lab, str) or lab == ""):
            raise AknnError(f"label of row {i} must be a non-empty string, got {lab!r}")


class MetricKind(enum.IntEnum):
    EUCLIDEAN = 0
    MANHATTAN = 1
    MINKOWSKI = 2


@dataclass(frozen=True)
class DistanceMetric:
    kind: MetricKind = MetricKind.EUCLIDEAN
    q: float = 2.0

    def __post_init__(self):
        kind = self.kind
        if isinstance(kind, str):
            try:
                kind = MetricKind[kind.upper()]
            except KeyError:
                raise InvalidMetric(f"unknown metric {self.kind!r}") from None
        object.__setattr__(self, "kind", MetricKind(kind))
        q = float(self.q)
        if self.kind is MetricKind.MINKOWSKI and not (np.isfinite(q) and q >= 1.0):
            raise InvalidMetric(f"Minkowski order must be a finite real >= 1, got {q}")
        object.__setattr__(self, "q", q)

    @classmethod
    def euclidean(cls) -> "DistanceMetric":
        return cls(MetricKind.EUCLIDEAN)

    @classmethod
    def manhattan(cls) -> "DistanceMetric":
        return cls(MetricKind.MANHATTAN)

    @classmethod
    def minkowski(cls, q: float) -> "DistanceMetric":
        return cls(MetricKind.MINKOWSKI, q)

    @property
    def name(self) -> str:
        return self.kind.name.lower()

    def __str__(self) -> str:
        if self.kind is MetricKind.MINKOWSKI:
            return f"minkowski(q={self.q:g})"
        return self.name


@dataclass(frozen=True)
class ClassRegion:
    label: str
    tca: float
    area: float
    support: int


class MinDistMode(str, enum.Enum):
    """Which neighbor distance is compared against the expected class area."""

    #: nearest of the k selected neighbors, whatever its label
    GLOBAL_MIN = "global-min"
    #: nearest selected neighbor that carries the expected label
    EXPECTED_CLASS_MIN = "expected-class-min"


@dataclass(frozen=True)
class Prediction:
    """Outcome of classifying one query with rejection.

    The query is rejected as unknown exactly when ``min_dist`` exceeds
    ``area_of_expected``; ``known`` is derived, never stored, so the two can
    not disagree.
    """

    expected_class: str
    min_dist: float
    area_of_expected: float
    neighbor_indices: tuple = field(default=())

    @property
    def known(self) -> bool:
        return self.min_dist <= self.area_of_expected

    @property
    def is_unknown(self) -> bool:
        return not self.known

    @property
    def label(self) -> Optional[str]:
        """The predicted label, or ``None`` for an unknown outcome."""
        return self.expected_class if self.known else None

    @property
    def outcome(self) -> str:
        """Predicted label, or the reserved :data:`UNKNOWN` token."""
        return self.expected_class if self.known else UNKNOWN


@dataclass(frozen=True)
class HyperParams:
    k: int = 1
    metric: DistanceMetric = field(default_factory=DistanceMetric)
    gc: float = 1.5

    def __post_init__(self):
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise AknnError(f"k must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        check_gc(self.gc)


def check_gc(gc: float) -> float:
    gc = float(gc)
    if not (np.isfinite(gc) and gc > 0):
        raise NonPositiveGc(f"gap constant must be a finite real > 0, got {gc}")
    return gc
