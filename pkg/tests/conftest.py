import numpy as np
import pytest

import ipvb


@pytest.fixture
def tiny_matrix():
    # H = [[1,1,0],[0,1,1]]: the worked 2x3 instance
    return ipvb.SensingMatrix(2, 3, [[0, 1], [1, 2]])


@pytest.fixture
def tiny_y():
    return np.array([2.0, 2.0])


def qc_base(seed=7, m_b=12, n_b=24, z=32, col_weight=3):
    """Random lift base with one aligned block pair forcing length-4 cycles."""
    rng = np.random.default_rng(seed)
    base = np.full((m_b, n_b), -1, dtype=np.int64)
    for j in range(n_b):
        rows = rng.choice(m_b, size=col_weight, replace=False)
        for r in rows:
            base[r, j] = int(rng.integers(z))
    # rows 0 and 1 share columns 0 and 1 with equal shift differences,
    # so the expansion contains z cycles of length 4
    base[0, 0] = 3
    base[1, 0] = 5
    base[0, 1] = 10
    base[1, 1] = 12
    return base


@pytest.fixture(scope="session")
def matrix_a():
    """504-variable regular matrix, variable degree 3, no length-4 cycles."""
    m = ipvb.generate_regular(504, 252, 3, seed=1, avoid_4cycles=True)
    assert ipvb.count_4cycles(m) == 0
    return m


@pytest.fixture(scope="session")
def matrix_b():
    """768-variable lifted matrix that does contain length-4 cycles."""
    m = ipvb.expand_qc(qc_base(), 32)
    assert m.shape == (384, 768)
    assert ipvb.count_4cycles(m) > 0
    return m
