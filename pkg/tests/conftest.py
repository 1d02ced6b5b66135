import numpy as np
import pytest

from aknn import Dataset, DistanceMetric, HyperParams, fit_aknn
from aknn.data import load_employees, load_iris

# Table of salary/scale employees: four training rows and four queries.
EMPLOYEES_TRAIN = [[581, 17], [710, 18], [370, 15], [413, 16]]
EMPLOYEES_LABELS = ("G", "G", "N", "N")
E5, E6, E7, E8 = (329, 16), (626, 18), (129, 4), (968, 21)


@pytest.fixture
def employees():
    return Dataset(EMPLOYEES_TRAIN, EMPLOYEES_LABELS)


@pytest.fixture
def employees_model(employees):
    return fit_aknn(employees, HyperParams(1, DistanceMetric.euclidean(), 1.5))


@pytest.fixture(scope="session")
def iris():
    return load_iris()


def random_labeled(rng, n, dim, n_classes):
    x = rng.normal(size=(n, dim)) * rng.uniform(0.5, 5.0)
    labels = [str(c) for c in rng.integers(0, n_classes, size=n)]
    # every class present at least once
    for c in range(min(n_classes, n)):
        labels[c] = str(c)
    return Dataset(x, tuple(labels))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
