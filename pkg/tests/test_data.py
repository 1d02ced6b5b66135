import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aknn import Dataset, DistanceMetric, HyperParams, fit_aknn, knn
from aknn.advanced import classify_many
from aknn.core import UNKNOWN, AknnError
from aknn.data import (
    EmptyFile,
    GenerationFailed,
    InconsistentColumns,
    MinMaxScaler,
    ParseError,
    SplitSpec,
    UnknownGenSpec,
    alpha_beta_standin,
    csv_header,
    generate_unknowns,
    load_csv,
    partition_unknown,
    save_csv,
    split,
)
from aknn.metrics import cdist


def test_iris_shape(iris):
    assert (len(iris), iris.dim, len(iris.label_alphabet())) == (150, 4, 3)


def _write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_six_feature_binary_csv(tmp_path):
    rng = np.random.default_rng(0)
    rows = "\n".join(",".join(f"{v:.1f}" for v in rng.uniform(0, 100, 6)) + f",{1 + i % 2}"
                     for i in range(345))
    d = load_csv(_write(tmp_path, rows + "\n"), has_header=False)
    assert (len(d), d.dim, len(d.label_alphabet())) == (345, 6, 2)


def test_parse_error_names_cell(tmp_path):
    p = _write(tmp_path, "a,b,label\n1,2,x\n3,oops,y\n")
    with pytest.raises(ParseError) as err:
        load_csv(p)
    assert (err.value.row, err.value.column) == (3, 2)
    assert "oops" in str(err.value)


def test_inconsistent_columns(tmp_path):
    with pytest.raises(InconsistentColumns):
        load_csv(_write(tmp_path, "a,b,label\n1,2,x\n3,y\n"))


def test_empty_file(tmp_path):
    with pytest.raises(EmptyFile):
        load_csv(_write(tmp_path, ""))


def test_header_only_gives_empty_dataset(tmp_path):
    d = load_csv(_write(tmp_path, "a,b,label\n"))
    assert len(d) == 0 and d.dim == 2


def test_label_column_by_name_and_index(tmp_path):
    p = _write(tmp_path, "label,a,b\nx,1,2\ny,3,4\n")
    by_name = load_csv(p, label_column="label")
    by_index = load_csv(p, label_column=0)
    assert by_name.labels == by_index.labels == ("x", "y")
    np.testing.assert_array_equal(by_name.features, [[1, 2], [3, 4]])
    assert csv_header(p, "label") == ["a", "b", "label"]


def test_unknown_label_is_ordinary_unless_partitioned(tmp_path):
    d = load_csv(_write(tmp_path, "a,label\n1,x\n2,unknown\n"))
    assert d.label_alphabet() == ["x", UNKNOWN]
    known, unknown = partition_unknown(d)
    assert known.labels == ("x",) and unknown.labels == (UNKNOWN,)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 20), dim=st.integers(1, 5))
def test_csv_round_trip_is_bit_exact(tmp_path_factory, seed, n, dim):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, dim)) * 10.0 ** rng.integers(-20, 20, size=(n, dim))
    d = Dataset(x, tuple(f"c{i % 3}" for i in range(n)))
    p = tmp_path_factory.mktemp("rt") / "d.csv"
    save_csv(d, p)
    back = load_csv(p)
    assert back.features.tobytes() == d.features.tobytes()
    assert back.labels == d.labels


def test_unlabeled_round_trip(tmp_path):
    d = Dataset([[1.0, 2.0]], (None,))
    save_csv(d, tmp_path / "u.csv")
    back = load_csv(tmp_path / "u.csv", label_column=None)
    assert back.labels == (None,)


@pytest.mark.parametrize("n,expected", [(150, (105, 45)), (345, (241, 104)), (199, (139, 60))])
def test_split_sizes(n, expected):
    d = Dataset(np.arange(n, dtype=float)[:, None], tuple("ab"[i % 2] for i in range(n)))
    train, test = split(d, SplitSpec(0.7, seed=123))
    assert (len(train), len(test)) == expected


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**64 - 1), n=st.integers(2, 80),
       frac=st.floats(0.05, 0.95), stratified=st.booleans())
def test_split_partitions(seed, n, frac, stratified):
    ids = np.arange(n, dtype=float)[:, None]
    labels = tuple("abc"[i % 3] for i in range(n))
    d = Dataset(ids, labels)
    spec = SplitSpec(frac, seed, stratified)
    train, test = split(d, spec)
    a = sorted(train.features[:, 0].tolist())
    b = sorted(test.features[:, 0].tolist())
    assert not set(a) & set(b)
    assert sorted(a + b) == ids[:, 0].tolist()
    assert len(train) == min(max(int(np.floor(frac * n + 0.5)), 1), n - 1)
    again, _ = split(d, spec)
    assert again.features.tobytes() == train.features.tobytes()
    if stratified:
        for lab in "abc":
            n_c = labels.count(lab)
            assert abs(train.labels.count(lab) - frac * n_c) <= 1 + 1e-9


def test_split_seed_matters(iris):
    a, _ = split(iris, SplitSpec(0.7, 1))
    b, _ = split(iris, SplitSpec(0.7, 2))
    assert a.features.tobytes() != b.features.tobytes()


def test_split_spec_validation():
    with pytest.raises(AknnError):
        SplitSpec(1.5)
    with pytest.raises(AknnError):
        SplitSpec(0.0)


@pytest.fixture
def iris_model(iris):
    train, _ = split(iris, SplitSpec(0.7, seed=42))
    return train, fit_aknn(train, HyperParams(1, DistanceMetric.euclidean(), 1.5))


def test_generated_unknowns_are_far_and_rejected(iris_model):
    train, model = iris_model
    spec = UnknownGenSpec(20, seed=7)
    u = generate_unknowns(train, model, spec)
    assert len(u) == 20 and set(u.labels) == {UNKNOWN}
    bound = model.max_area
    assert cdist(model.metric, u.features, train.features).min() > spec.near_factor * bound
    centroid = train.features.mean(axis=0)
    assert np.linalg.norm(u.features - centroid, axis=1).max() <= spec.far_factor * bound
    assert all(p.is_unknown for p in classify_many(model, u))
    # plain kNN has no way to reject them
    assert all(lab in train.label_alphabet() for lab in knn.predict(model.base, u))


def test_generation_is_seed_deterministic(iris_model):
    train, model = iris_model
    a = generate_unknowns(train, model, UnknownGenSpec(5, seed=1))
    b = generate_unknowns(train, model, UnknownGenSpec(5, seed=1))
    c = generate_unknowns(train, model, UnknownGenSpec(5, seed=2))
    assert a.features.tobytes() == b.features.tobytes()
    assert a.features.tobytes() != c.features.tobytes()


def test_generate_zero(iris_model):
    train, model = iris_model
    assert len(generate_unknowns(train, model, UnknownGenSpec(0))) == 0


def test_generation_fails_when_shell_is_too_tight(iris_model):
    train, model = iris_model
    with pytest.raises(GenerationFailed, match="far_factor"):
        generate_unknowns(train, model, UnknownGenSpec(5, seed=0, near_factor=2.0, far_factor=2.0))


def test_generation_respects_manhattan_outer_bound(iris):
    train, _ = split(iris, SplitSpec(0.7, seed=0))
    m = DistanceMetric.manhattan()
    model = fit_aknn(train, HyperParams(1, m, 1.5))
    spec = UnknownGenSpec(10, seed=0, far_factor=6.0)
    u = generate_unknowns(train, model, spec)
    centroid = train.features.mean(axis=0)
    assert cdist(m, u.features, centroid[None, :]).max() <= spec.far_factor * model.max_area


def test_unknown_spec_validation():
    with pytest.raises(AknnError):
        UnknownGenSpec(near_factor=1.0)
    with pytest.raises(AknnError):
        UnknownGenSpec(near_factor=3.0, far_factor=2.0)
    with pytest.raises(AknnError):
        UnknownGenSpec(count=-1)


def test_alpha_beta_standin_shape():
    d = alpha_beta_standin(seed=0)
    assert (len(d), d.dim, d.label_alphabet()) == (199, 2, ["0", "1"])


def test_minmax_scaler():
    train = Dataset([[0.0, 5.0], [10.0, 5.0]], ("a", "b"))
    s = MinMaxScaler.fit(train)
    np.testing.assert_array_equal(s.transform(train).features, [[0.0, 0.0], [1.0, 0.0]])
    np.testing.assert_array_equal(s.transform(Dataset([[20.0, 6.0]], (None,))).features, [[2.0, 1.0]])
