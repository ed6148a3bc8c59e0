import numpy as np
import pytest

from treexplain import Dataset
from treexplain.bundled import load_bundled


@pytest.fixture(scope="session")
def iris():
    return load_bundled("iris")


@pytest.fixture(scope="session")
def wine():
    return load_bundled("wine")


@pytest.fixture
def toy_two_class():
    """4 points on one feature, perfectly separable at 1.5."""
    return Dataset(
        features=np.array([[0.0], [1.0], [2.0], [3.0]]),
        labels=np.array([0, 0, 1, 1]),
        feature_names=("x0",),
        class_names=("a", "b"),
        name="toy",
    )


@pytest.fixture
def toy_balanced_10():
    """10 samples, 2 features, balanced two-class, separable."""
    rng = np.random.default_rng(3)
    x = rng.normal(size=(10, 2))
    y = np.array([0, 1] * 5)
    x[:, 0] = y * 4.0 + rng.uniform(-1.0, 1.0, size=10)
    return Dataset(
        features=x,
        labels=y,
        feature_names=("x0", "x1"),
        class_names=("n", "p"),
        name="toy10",
    )
