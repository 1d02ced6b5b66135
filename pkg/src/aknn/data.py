"""CSV I/O, seeded splitting, and generation of far-away unknown instances."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .advanced import AknnModel, classify_many
from .core import UNKNOWN, AknnError, Dataset, validate_dataset
from .metrics import cdist

LabelColumn = Union[int, str, None]


class ParseError(AknnError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class InconsistentColumns(AknnError):
    pass


class EmptyFile(AknnError):
    pass


class GenerationFailed(AknnError):
    pass


def load_csv(path, has_header: bool = True, label_column: LabelColumn = -1) -> Dataset:
    """Read a comma-separated dataset.

    Every column except ``label_column`` must parse as a float. The label
    column is given by position (negative counts from the end) or, when the
    file has a header, by name; ``None`` means the file carries no labels.
    Row numbers in error messages are 1-based physical lines.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [(n, r) for n, r in enumerate(csv.reader(fh), start=1)
                if r and any(cell.strip() for cell in r)]
    if not rows:
        raise EmptyFile(f"{path}: file is empty")

    header = None
    if has_header:
        header = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
    width = len(header) if header is not None else len(rows[0][1])

    if label_column is None:
        label_idx = None
    elif isinstance(label_column, str):
        if header is None:
            raise AknnError(f"{path}: label column {label_column!r} given by name but file has no header")
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise AknnError(f"{path}: no column named {label_column!r} in header {header}") from None
    else:
        label_idx = label_column if label_column >= 0 else width + label_column
        if not 0 <= label_idx < width:
            raise AknnError(f"{path}: label column {label_column} out of range for {width} columns")

    dim = width - (label_idx is not None)
    if dim < 1:
        raise InconsistentColumns(f"{path}: no feature columns")
    features = np.empty((len(rows), dim))
    labels = []
    for i, (line, row) in enumerate(rows):
        if len(row) != width:
            raise InconsistentColumns(f"{path}: line {line} has {len(row)} columns, expected {width}")
        col = 0
        label = None
        for j, cell in enumerate(row):
            cell = cell.strip()
            if j == label_idx:
                if not cell:
                    raise ParseError(f"{path}: empty label at line {line}, column {j + 1}", line, j + 1)
                label = cell
                continue
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: line {line}, column {j + 1}: cannot parse {cell!r} as a number",
                    line, j + 1,
                ) from None
            if not math.isfinite(value):
                raise ParseError(f"{path}: line {line}, column {j + 1}: non-finite value {cell!r}", line, j + 1)
            features[i, col] = value
            col += 1
        labels.append(label)
    return Dataset(features, tuple(labels))


def save_csv(d: Dataset, path, header: Optional[list[str]] = None) -> None:
    """Write ``d`` in the dialect :func:`load_csv` reads, label last.

    Floats are written with ``repr`` so a reload is bit-exact. Unlabeled
    datasets are written without a label column.
    """
    labeled = any(lab is not None for lab in d.labels)
    if header is None:
        header = [f"x{j}" for j in range(d.dim)] + (["label"] if labeled else [])
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row, lab in zip(d.features.tolist(), d.labels):
            w.writerow([repr(v) for v in row] + ([lab if lab is not None else ""] if labeled else []))


def _first_row(path) -> Optional[list[str]]:
    with Path(path).open(newline="") as fh:
        for row in csv.reader(fh):
            if row and any(c.strip() for c in row):
                return [c.strip() for c in row]
    return None


def csv_width(path) -> Optional[int]:
    """Number of columns in the first non-blank row, or None for an empty file."""
    row = _first_row(path)
    return None if row is None else len(row)


def csv_header(path, label_column: LabelColumn = -1) -> Optional[list[str]]:
    """Header of ``path`` reordered label-last, matching what :func:`save_csv` writes."""
    row = _first_row(path)
    if row is None:
        return None
    if label_column is None:
        return row
    idx = row.index(label_column) if isinstance(label_column, str) else label_column % len(row)
    return row[:idx] + row[idx + 1:] + [row[idx]]


def partition_unknown(d: Dataset) -> tuple[Dataset, Dataset]:
    """Split rows carrying the reserved ``"unknown"`` label from the rest."""
    mask = np.array([lab == UNKNOWN for lab in d.labels], dtype=bool)
    return d.subset(np.flatnonzero(~mask)), d.subset(np.flatnonzero(mask))


def load_iris() -> Dataset:
    """The 150-row iris plants data bundled with the package."""
    with resources.as_file(resources.files("aknn") / "datasets" / "iris.csv") as p:
        return load_csv(p)


def load_employees() -> tuple[Dataset, Dataset]:
    """Four labeled salary/scale training rows and four unlabeled queries."""
    root = resources.files("aknn") / "datasets"
    with resources.as_file(root / "employees.csv") as p:
        train = load_csv(p)
    with resources.as_file(root / "employees_query.csv") as p:
        queries = load_csv(p, label_column=None)
    return train, queries


def alpha_beta_standin(seed: int = 0, n: int = 199) -> Dataset:
    """Synthetic 2-feature binary dataset with two well-separated blobs labeled "0"/"1".

    Stands in for a dataset of the same shape whose source is not available.
    """
    rng = np.random.default_rng(seed)
    n0 = (n + 1) // 2
    a = rng.normal(loc=(0.0, 0.0), scale=1.0, size=(n0, 2))
    b = rng.normal(loc=(8.0, 8.0), scale=1.0, size=(n - n0, 2))
    return Dataset(np.vstack([a, b]), ("0",) * n0 + ("1",) * (n - n0))


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.7
    seed: int = 0
    stratified: bool = False

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise AknnError(f"train_fraction must lie strictly between 0 and 1, got {self.train_fraction}")
        if not 0 <= int(self.seed) < 2**64:
            raise AknnError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


def _train_size(n: int, fraction: float) -> int:
    return min(max(math.floor(fraction * n + 0.5), 1), n - 1)


def split(d: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Seeded random train/test partition; both parts keep the original row order.

    The train part has ``round(train_fraction * n)`` rows (halves rounded up),
    clamped so neither part is empty. Stratified mode apportions the train
    rows across classes by largest remainder.
    """
    validate_dataset(d)
    if not d.is_labeled:
        raise AknnError("split requires a fully labeled dataset")
    n = len(d)
    if n < 2:
        raise AknnError("need at least two instances to split")
    rng = np.random.default_rng(int(spec.seed))
    n_train = _train_size(n, spec.train_fraction)
    if not spec.stratified:
        train_idx = rng.permutation(n)[:n_train]
    else:
        labels = np.asarray(d.labels, dtype=object)
        classes = d.label_alphabet()
        members = [np.flatnonzero(labels == c) for c in classes]
        exact = [spec.train_fraction * len(m) for m in members]
        quota = [math.floor(e) for e in exact]
        by_remainder = sorted(range(len(classes)), key=lambda c: -(exact[c] - quota[c]))
        for c in by_remainder[: n_train - sum(quota)]:
            quota[c] += 1
        train_idx = np.concatenate(
            [rng.permutation(m)[:q] for m, q in zip(members, quota)]
        )
    mask = np.zeros(n, dtype=bool)
    mask[train_idx] = True
    return d.subset(np.flatnonzero(mask)), d.subset(np.flatnonzero(~mask))


@dataclass(frozen=True)
class UnknownGenSpec:
    count: int = 20
    seed: int = 0
    near_factor: float = 2.0
    far_factor: float = 5.0

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 0:
            raise AknnError(f"count must be a non-negative integer, got {self.count}")
        if not self.near_factor > 1.0:
            raise AknnError(f"near_factor must exceed 1, got {self.near_factor}")
        if not self.far_factor >= self.near_factor:
            raise AknnError(
                f"far_factor ({self.far_factor}) must be at least near_factor ({self.near_factor})"
            )


#: rejection-sampling attempts allowed per requested point
MAX_ATTEMPTS_PER_POINT = 1000


def generate_unknowns(train: Dataset, model: AknnModel, spec: UnknownGenSpec) -> Dataset:
    """Sample ``spec.count`` points that lie far outside every class of ``model``.

    With ``A`` the largest class area of ``model``, candidates are drawn in
    the shell of radii ``[near_factor * A, far_factor * A]`` around the
    training centroid (uniform direction, uniform radius). A candidate is kept
    when its distance to every training instance exceeds ``near_factor * A``,
    its distance to the centroid is at most ``far_factor * A`` (both under the
    model's metric) and ``model`` classifies it as unknown. The result is labeled with the
    reserved ``"unknown"`` token.
    """
    d = train.dim
    if spec.count == 0:
        return Dataset(np.empty((0, d)), ())
    bound = model.max_area
    if not bound > 0.0:
        raise GenerationFailed("every class has zero area; cannot place points outside them")
    metric = model.metric
    centroid = train.features.mean(axis=0)
    rng = np.random.default_rng(int(spec.seed))
    accepted: list[np.ndarray] = []
    attempts = 0
    budget = MAX_ATTEMPTS_PER_POINT * spec.count
    batch = max(64, 4 * spec.count)
    while len(accepted) < spec.count and attempts < budget:
        size = min(batch, budget - attempts)
        attempts += size
        direction = rng.standard_normal((size, d))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        radius = rng.uniform(spec.near_factor, spec.far_factor, size) * bound
        cand = centroid + direction * radius[:, None]
        ok = cdist(metric, cand, train.features).min(axis=1) > spec.near_factor * bound
        # the shell is Euclidean; other metrics must still respect the outer bound
        ok &= cdist(metric, cand, centroid[None, :])[:, 0] <= spec.far_factor * bound
        cand = cand[ok]
        if len(cand):
            rejected = np.array([p.is_unknown for p in classify_many(model, cand)])
            cand = cand[rejected]
        accepted.extend(cand[: spec.count - len(accepted)])
    if len(accepted) < spec.count:
        raise GenerationFailed(
            f"placed only {len(accepted)} of {spec.count} unknown points after {attempts} "
            f"attempts; raise far_factor (now {spec.far_factor}) to widen the sampling shell"
        )
    return Dataset(np.array(accepted), (UNKNOWN,) * spec.count)


@dataclass(frozen=True)
class MinMaxScaler:
    """Per-feature min-max scaling fitted on one dataset and applied to others."""

    low: np.ndarray
    span: np.ndarray

    @classmethod
    def fit(cls, d: Dataset) -> "MinMaxScaler":
        low = d.features.min(axis=0)
        span = d.features.max(axis=0) - low
        return cls(low, np.where(span > 0, span, 1.0))

    def transform(self, d: Dataset) -> Dataset:
        if not len(d):
            return d
        return Dataset((d.features - self.low) / self.span, d.labels)
