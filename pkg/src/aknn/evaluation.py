"""Experiment harness: kNN vs A-kNN over a grid of k and gap constants."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from . import knn
from .advanced import classify_from_neighbors, fit_aknn, set_gap_constant
from .core import (
    UNKNOWN,
    AknnError,
    Dataset,
    DistanceMetric,
    HyperParams,
    MinDistMode,
    Prediction,
)
from .data import SplitSpec, UnknownGenSpec, generate_unknowns, split

DEFAULT_GC_VALUES = (1.0, 1.5, 2.0, 5.0, 10.0, 100.0, 1000.0)
DEFAULT_K_VALUES = (1, 7)
#: gap constant of the model used to place injected unknowns
GENERATION_GC = 1.5


class LengthMismatch(AknnError):
    pass


def _outcome(p) -> str:
    return p.outcome if isinstance(p, Prediction) else p


def _check_lengths(predictions, truth):
    if len(predictions) != len(truth):
        raise LengthMismatch(f"{len(predictions)} predictions but {len(truth)} truth labels")


def accuracy(predictions: Sequence, truth: Sequence[str]) -> float:
    """Fraction of positions where the prediction matches the truth.

    ``predictions`` holds :class:`Prediction` objects or plain labels. An
    unknown outcome matches only the reserved ``"unknown"`` truth token.
    """
    _check_lengths(predictions, truth)
    if not truth:
        raise LengthMismatch("accuracy of an empty prediction set is undefined")
    hits = sum(_outcome(p) == t for p, t in zip(predictions, truth))
    return hits / len(truth)


def count_misclassified_unknowns(predictions: Sequence, truth: Sequence[str]) -> tuple[int, dict[str, int]]:
    """Unknown-truth positions that received a known label, bucketed by that label."""
    _check_lengths(predictions, truth)
    by_label: dict[str, int] = {}
    for p, t in zip(predictions, truth):
        if t != UNKNOWN:
            continue
        out = _outcome(p)
        if out != UNKNOWN:
            by_label[out] = by_label.get(out, 0) + 1
    return sum(by_label.values()), by_label


@dataclass(frozen=True)
class RunConfig:
    k_values: tuple = DEFAULT_K_VALUES
    gc_values: tuple = DEFAULT_GC_VALUES
    metric: DistanceMetric = field(default_factory=DistanceMetric)
    split: SplitSpec = field(default_factory=SplitSpec)
    unknowns: UnknownGenSpec = field(default_factory=UnknownGenSpec)
    include_plain_knn: bool = True
    mode: MinDistMode = MinDistMode.GLOBAL_MIN

    def __post_init__(self):
        if not self.k_values or not self.gc_values:
            raise AknnError("k_values and gc_values must be non-empty")
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        object.__setattr__(self, "gc_values", tuple(float(g) for g in self.gc_values))


@dataclass(frozen=True)
class ReportRow:
    algorithm: str
    k: int
    gc: Optional[float]
    accuracy_without_unknowns: float
    accuracy_with_unknowns: float
    misclassified_unknown_total: int
    misclassified_unknown_by_label: dict


@dataclass
class RunReport:
    rows: list
    labels: list
    unknown_count: int
    known_count: int
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "labels": self.labels,
            "known_count": self.known_count,
            "unknown_count": self.unknown_count,
            "rows": [asdict(r) for r in self.rows],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["algorithm", "k", "gc", "accuracy_without_unknowns", "accuracy_with_unknowns",
                    "misclassified_unknown_total"] + [f"misclassified_as_{lab}" for lab in self.labels])
        for r in self.rows:
            w.writerow([r.algorithm, r.k, "" if r.gc is None else repr(r.gc),
                        repr(r.accuracy_without_unknowns), repr(r.accuracy_with_unknowns),
                        r.misclassified_unknown_total]
                       + [r.misclassified_unknown_by_label.get(lab, 0) for lab in self.labels])
        return buf.getvalue()

    def to_table(self) -> str:
        """Aligned text table: one row per (algorithm, k, gc)."""
        head = ["K", "", "gc", "Acc w/o unknown", "Acc with unknown",
                f"Misclassified (of {self.unknown_count})"] + [f"as {lab}" for lab in self.labels]
        body = []
        for r in self.rows:
            body.append([
                str(r.k), r.algorithm, "-" if r.gc is None else f"{r.gc:g}",
                format_accuracy(r.accuracy_without_unknowns), format_accuracy(r.accuracy_with_unknowns),
                str(r.misclassified_unknown_total),
            ] + [str(r.misclassified_unknown_by_label.get(lab, 0)) for lab in self.labels])
        widths = [max(len(c) for c in col) for col in zip(head, *body)]
        lines = ["  ".join(c.rjust(w) for c, w in zip(line, widths)) for line in [head] + body]
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines)


def format_accuracy(a: float) -> str:
    """Two decimals, or three when the value is exact at three (0.925)."""
    if abs(round(a, 3) - a) < 1e-12 and abs(round(a, 2) - a) >= 1e-12:
        return f"{a:.3f}"
    return f"{a:.2f}"


def run_experiment(train: Dataset, test_known: Dataset, test_unknown: Dataset, cfg: RunConfig) -> RunReport:
    """Evaluate plain kNN and A-kNN on known and known+unknown test sets.

    Rows come out grouped by k: the kNN row (if enabled) and then one A-kNN
    row per gap constant in the order given by ``cfg.gc_values``.
    """
    alphabet = train.label_alphabet()
    stray = set(test_known.label_alphabet()) - set(alphabet)
    if stray or not test_known.is_labeled:
        raise AknnError(f"test labels must be a subset of the training labels; extra: {sorted(stray)}")
    combined = test_known.concat(test_unknown)
    truth_known = list(test_known.labels)
    truth_all = truth_known + [UNKNOWN] * len(test_unknown)
    n_known = len(test_known)

    rows = []
    for k in cfg.k_values:
        params = HyperParams(k, cfg.metric, cfg.gc_values[0])
        model = fit_aknn(train, params, cfg.mode)
        idx, dist = knn.kneighbors(model.base, combined)
        if cfg.include_plain_knn:
            preds = [knn.majority_vote([train.labels[i] for i in row]) for row in idx]
            rows.append(_row("kNN", k, None, preds, truth_known, truth_all, n_known))
        for gc in cfg.gc_values:
            model = set_gap_constant(model, gc)
            preds = classify_from_neighbors(model, idx, dist)
            rows.append(_row("A-kNN", k, gc, preds, truth_known, truth_all, n_known))
    return RunReport(rows=rows, labels=alphabet, unknown_count=len(test_unknown),
                     known_count=n_known, config=_describe(cfg))


def _row(algorithm, k, gc, preds, truth_known, truth_all, n_known) -> ReportRow:
    total, by_label = count_misclassified_unknowns(preds, truth_all)
    return ReportRow(
        algorithm=algorithm,
        k=k,
        gc=gc,
        accuracy_without_unknowns=accuracy(preds[:n_known], truth_known) if n_known else float("nan"),
        accuracy_with_unknowns=accuracy(preds, truth_all) if truth_all else float("nan"),
        misclassified_unknown_total=total,
        misclassified_unknown_by_label=by_label,
    )


def _describe(cfg: RunConfig) -> dict:
    return {
        "k_values": list(cfg.k_values),
        "gc_values": list(cfg.gc_values),
        "metric": cfg.metric.name,
        "q": cfg.metric.q,
        "mode": cfg.mode.value,
        "train_fraction": cfg.split.train_fraction,
        "split_seed": int(cfg.split.seed),
        "stratified": cfg.split.stratified,
        "unknown_count": cfg.unknowns.count,
        "unknown_seed": int(cfg.unknowns.seed),
        "near_factor": cfg.unknowns.near_factor,
        "far_factor": cfg.unknowns.far_factor,
        "include_plain_knn": cfg.include_plain_knn,
    }


def prepare(dataset: Dataset, cfg: RunConfig) -> tuple[Dataset, Dataset, Dataset]:
    """Split ``dataset`` and generate unknowns against a k=1 model at the generation gc."""
    train, test = split(dataset, cfg.split)
    gen_model = fit_aknn(train, HyperParams(1, cfg.metric, GENERATION_GC), cfg.mode)
    unknown = generate_unknowns(train, gen_model, cfg.unknowns)
    return train, test, unknown


def run_protocol(dataset: Dataset, cfg: RunConfig) -> RunReport:
    """Split, inject unknowns and run the full grid in one call."""
    return run_experiment(*prepare(dataset, cfg), cfg)
