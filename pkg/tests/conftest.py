import numpy as np
import pytest

from oscillab import GridSpec, build_aux_cutoffs, build_frame


@pytest.fixture(scope="session")
def frame():
    return build_frame()


@pytest.fixture(scope="session")
def aux(frame):
    return build_aux_cutoffs(frame)


@pytest.fixture(scope="session")
def grid_small():
    # resolves bands up to ~200 with margin 2
    return GridSpec(dim=1, period=32.0, points=4096)


@pytest.fixture(scope="session")
def grid_med():
    # resolves bands up to 2^13 with margin ~3 (dyadic scales j <= 12)
    return GridSpec(dim=1, period=32.0, points=2**18)


@pytest.fixture(scope="session")
def grid_2d():
    return GridSpec(dim=2, period=16.0, points=256)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
