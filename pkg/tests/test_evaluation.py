import json
import math

import pytest

from aknn import Dataset, HyperParams, Prediction, fit_aknn, set_gap_constant
from aknn.advanced import classify_many
from aknn.core import UNKNOWN
from aknn.data import SplitSpec, UnknownGenSpec, alpha_beta_standin
from aknn.evaluation import (
    DEFAULT_GC_VALUES,
    LengthMismatch,
    RunConfig,
    accuracy,
    count_misclassified_unknowns,
    format_accuracy,
    prepare,
    run_experiment,
    run_protocol,
)


def test_accuracy_examples():
    assert accuracy(["a", "b"], ["a", "b"]) == 1.0
    truth = ["a"] * 45
    preds = ["a"] * 44 + ["b"]
    assert accuracy(preds, truth) == pytest.approx(0.978, abs=5e-4)
    assert format_accuracy(accuracy(preds, truth)) == "0.98"
    # 20 injected unknowns, all given a label by plain kNN
    assert format_accuracy(accuracy(preds + ["a"] * 20, truth + [UNKNOWN] * 20)) == "0.68"


def test_accuracy_with_predictions():
    known = Prediction("a", 1.0, 2.0)
    rejected = Prediction("a", 3.0, 2.0)
    assert accuracy([known, rejected], ["a", UNKNOWN]) == 1.0
    assert accuracy([rejected], ["a"]) == 0.0


def test_length_checks():
    with pytest.raises(LengthMismatch):
        accuracy(["a"], ["a", "b"])
    with pytest.raises(LengthMismatch):
        count_misclassified_unknowns(["a"], [])


def test_count_misclassified_unknowns():
    preds = ["setosa"] * 4 + ["virginica"] * 16 + ["setosa"]
    truth = [UNKNOWN] * 20 + ["setosa"]
    total, by_label = count_misclassified_unknowns(preds, truth)
    assert total == 20 and by_label == {"setosa": 4, "virginica": 16}
    assert count_misclassified_unknowns(["a"], ["a"]) == (0, {})
    rejected = Prediction("a", 5.0, 1.0)
    assert count_misclassified_unknowns([rejected], [UNKNOWN]) == (0, {})


def test_format_accuracy():
    assert [format_accuracy(a) for a in (1.0, 0.925, 0.8, 44 / 45)] == ["1.00", "0.925", "0.80", "0.98"]


@pytest.fixture(scope="module")
def iris_report(iris):
    return run_protocol(iris, RunConfig(split=SplitSpec(0.7, 42), unknowns=UnknownGenSpec(20, 42)))


def test_report_shape(iris_report):
    rows = iris_report.rows
    assert len(rows) == 16
    assert [r.algorithm for r in rows].count("kNN") == 2
    assert [(r.k, r.gc) for r in rows if r.algorithm == "A-kNN"] == \
        [(k, g) for k in (1, 7) for g in DEFAULT_GC_VALUES]


def test_report_invariants(iris_report):
    for r in iris_report.rows:
        assert r.misclassified_unknown_total == sum(r.misclassified_unknown_by_label.values())
        assert 0 <= r.misclassified_unknown_total <= iris_report.unknown_count
        assert 0.0 <= r.accuracy_with_unknowns <= 1.0
        if r.algorithm == "kNN":
            assert r.misclassified_unknown_total == iris_report.unknown_count


def test_report_gc_trends(iris_report):
    for k in (1, 7):
        rows = [r for r in iris_report.rows if r.algorithm == "A-kNN" and r.k == k]
        totals = [r.misclassified_unknown_total for r in rows]
        assert totals == sorted(totals)
        without = [r.accuracy_without_unknowns for r in rows]
        assert without == sorted(without)


def test_rejected_known_sets_shrink_with_gc(iris):
    cfg = RunConfig(split=SplitSpec(0.7, 5))
    train, test, _ = prepare(iris, cfg)
    model = fit_aknn(train, HyperParams(1, gc=0.05))
    previous = None
    for gc in (0.05, 0.1, 0.3, 1.0, 2.0):
        rejected = {i for i, p in enumerate(classify_many(set_gap_constant(model, gc), test)) if p.is_unknown}
        if previous is not None:
            assert rejected <= previous
        previous = rejected


def test_no_unknowns_means_equal_columns(iris):
    cfg = RunConfig(unknowns=UnknownGenSpec(0))
    report = run_protocol(iris, cfg)
    for r in report.rows:
        assert r.accuracy_with_unknowns == r.accuracy_without_unknowns


def test_grid_of_one(iris):
    cfg = RunConfig(k_values=[1], gc_values=[1.5], include_plain_knn=False)
    report = run_protocol(iris, cfg)
    assert len(report.rows) == 1 and report.rows[0].algorithm == "A-kNN"


def test_deterministic(iris):
    cfg = RunConfig(split=SplitSpec(0.7, 9), unknowns=UnknownGenSpec(20, 9))
    assert run_protocol(iris, cfg).to_json() == run_protocol(iris, cfg).to_json()


def test_test_labels_must_be_known(iris):
    train, test, unknown = prepare(iris, RunConfig())
    bad = Dataset(test.features, ("nope",) + test.labels[1:])
    with pytest.raises(Exception, match="nope"):
        run_experiment(train, bad, unknown, RunConfig())


def test_serialisation(iris_report):
    data = json.loads(iris_report.to_json())
    assert set(data["rows"][0]) == {
        "algorithm", "k", "gc", "accuracy_without_unknowns", "accuracy_with_unknowns",
        "misclassified_unknown_total", "misclassified_unknown_by_label",
    }
    assert data["config"]["gc_values"] == list(DEFAULT_GC_VALUES)
    table = iris_report.to_table().splitlines()
    assert len(table) == 2 + 16
    assert "Misclassified (of 20)" in table[0]
    csv_lines = iris_report.to_csv().splitlines()
    assert len(csv_lines) == 17 and csv_lines[0].startswith("algorithm,k,gc")


def test_alpha_beta_standin_runs():
    report = run_protocol(alpha_beta_standin(0), RunConfig(gc_values=[1, 1.5, 2]))
    for r in report.rows:
        if r.algorithm == "A-kNN":
            assert r.misclassified_unknown_total == 0
        assert not math.isnan(r.accuracy_with_unknowns)
