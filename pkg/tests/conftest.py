from __future__ import annotations

import numpy as np
import pytest

from duplication.evaluation.synthetic import generate_synthetic


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_fixture():
    return generate_synthetic(n_seeds=6, variants=3, n_controls=10, seed=11)


@pytest.fixture(scope="session")
def full_fixture():
    """100 seeds x 10 variants per class plus 1,000 control pairs."""
    return generate_synthetic()
