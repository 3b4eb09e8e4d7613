import pytest
from hypothesis import settings

from saddlenf.cfrac import Surd
from saddlenf.lattice import resonance_frame, theorem2_frame

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")

GOLDEN = Surd(1, 1, 5, 2)


@pytest.fixture
def frame321():
    return resonance_frame(3, 2, 1)


@pytest.fixture
def golden0():
    return theorem2_frame(GOLDEN, 0)


@pytest.fixture
def golden1():
    return theorem2_frame(GOLDEN, 1)
