import math
import random
import sys

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from heegnerlab.halfplane import ModularMatrix, Point

settings.register_profile("lab", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")


def random_matrix(rng: random.Random, bound: int = 50) -> ModularMatrix:
    """A random element of PSL(2, Z) with entries of size up to about ``bound``."""
    while True:
        c = rng.randint(0, bound)
        d = rng.randint(-bound, bound)
        if math.gcd(c, d) != 1:
            continue
        if c == 0:
            return ModularMatrix(1, rng.randint(-bound, bound), 0, 1)
        # a d = 1 mod c, a in [0, c)
        a = pow(d, -1, c) if c > 1 else 0
        b = (a * d - 1) // c
        k = rng.randint(-2, 2)
        return ModularMatrix(a + k * c, b + k * d, c, d)


@st.composite
def matrices(draw, bound=50):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_matrix(random.Random(seed), bound)


points = st.builds(Point, st.floats(-3, 3), st.floats(0.05, 5))


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
