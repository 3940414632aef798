import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qhm import euclidean_cloud, fixture


@pytest.fixture
def five_point_boundary():
    """Quasihypermetric but non-strict 5-point space with infinite constant."""
    return fixture("nw-thm2.9").space


@pytest.fixture
def five_point_nonqhm():
    """Non-quasihypermetric 5-point space."""
    return fixture("nw-thm2.9a").space


def random_cloud(rng, n_min=3, n_max=8, dim_max=3):
    """Seeded euclidean cloud; always strictly quasihypermetric."""
    n = int(rng.integers(n_min, n_max + 1))
    dim = int(rng.integers(2, dim_max + 1))
    return euclidean_cloud(rng.uniform(0.0, 1.0, (n, dim)))
