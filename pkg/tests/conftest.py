import random

import pytest

from app.config import RELAY_TAPS_POLAR
from app.ffield import FieldSpec, elements
from app.gint import GaussInt
from app.sigcode import SignalCode


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture(scope="session")
def f9():
    return FieldSpec(GaussInt(3, 0))


@pytest.fixture(scope="session")
def relay_code():
    return SignalCode.from_polar(RELAY_TAPS_POLAR, 100, 3)


@pytest.fixture
def make_code():
    def make(k: int, p: int = 3) -> SignalCode:
        return SignalCode.from_polar(RELAY_TAPS_POLAR, k, p)

    return make


@pytest.fixture
def random_gint(rng):
    def draw(bound: int = 10) -> GaussInt:
        return GaussInt(rng.randint(-bound, bound), rng.randint(-bound, bound))

    return draw


@pytest.fixture
def random_message(rng):
    def draw(spec: FieldSpec, k: int):
        alphabet = elements(spec)
        return tuple(rng.choice(alphabet) for _ in range(k))

    return draw
