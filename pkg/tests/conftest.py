import sys

import numpy as np
import pytest
from hypothesis import settings

from lorext.rearrange import Weight
from lorext.space import Space

settings.register_profile("lorext", max_examples=60, deadline=None)
settings.register_profile("stress", max_examples=600, deadline=None)
settings.load_profile("lorext")


def random_space(rng, n, quasi=False):
    """Random points in the plane; squared distances give a genuine quasi-metric."""
    pts = rng.uniform(0, 1, size=(n, 2))
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    if quasi:
        d = d**2
    d = 0.5 * (d + d.T)
    mass = rng.lognormal(0, 0.5, size=n)
    return Space(dist=d, mass=mass)


def random_weight(rng, space, spread=1.0):
    return Weight(space, rng.lognormal(0, spread, size=space.n))


@pytest.fixture
def two_point():
    return Space(dist=np.array([[0.0, 1.0], [1.0, 0.0]]), mass=np.ones(2), points=("a", "b"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
