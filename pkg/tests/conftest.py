import pathlib

import numpy as np
import pytest

DATA = pathlib.Path(__file__).parent / "data"


def box_points(box, n, seed=0):
    """Deterministic uniform samples inside a per-coordinate box."""
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    pts = lo + (hi - lo) * rng.random((n, len(box)))
    return [tuple(float(x) for x in row) for row in pts]


@pytest.fixture
def data_dir():
    return DATA
