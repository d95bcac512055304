import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lorext.errors import AsymmetricDistance, LorextError, ZeroOffDiagonal
from lorext.space import (Space, constants_from, doubling_constant, enumerate_balls, interval_grid,
                          structural_constants, validate_quasi_metric)

from conftest import random_space


def kappa_oracle(d):
    n = len(d)
    best = 1.0
    for x, y, z in itertools.product(range(n), repeat=3):
        if len({x, y, z}) == 3:
            best = max(best, d[x][y] / (d[x][z] + d[z][y]))
    return best


def balls_oracle(space):
    d = space.dist
    out = set()
    for c in range(space.n):
        for r in np.unique(np.concatenate([d[c], np.nextafter(d[c], np.inf)])):
            if r > 0:
                out.add(frozenset(np.flatnonzero(d[c] < r).tolist()))
    return out


def test_kappa_examples():
    assert validate_quasi_metric(np.abs(np.subtract.outer([0.0, 1, 2], [0.0, 1, 2]))) == 1.0
    assert validate_quasi_metric(np.zeros((1, 1))) == 1.0
    d = np.array([[0, 1, 3], [1, 0, 1], [3, 1, 0]], dtype=float)
    assert validate_quasi_metric(d) == 1.5


def test_distance_errors():
    with pytest.raises(ZeroOffDiagonal):
        Space(dist=np.array([[0.0, 0.0], [0.0, 0.0]]), mass=np.ones(2))
    with pytest.raises(AsymmetricDistance):
        Space(dist=np.array([[0.0, 1.0], [2.0, 0.0]]), mass=np.ones(2))
    with pytest.raises(LorextError):
        Space(dist=np.array([[0.0, 1.0], [1.0, 0.0]]), mass=np.array([1.0, 0.0]))


@given(st.integers(2, 7), st.integers(0, 10**6), st.booleans())
def test_kappa_matches_triple_scan(n, seed, quasi):
    sp = random_space(np.random.default_rng(seed), n, quasi)
    assert sp.kappa == pytest.approx(kappa_oracle(sp.dist), rel=1e-12)
    # idempotent
    again = Space(dist=sp.dist, mass=sp.mass, kappa=sp.kappa)
    assert again.kappa == sp.kappa


def test_ball_examples(two_point):
    assert len(enumerate_balls(interval_grid(1))) == 1
    members = {frozenset(b.members) for b in enumerate_balls(two_point)}
    assert members == {frozenset({0}), frozenset({1}), frozenset({0, 1})}
    g = interval_grid(4)
    assert {frozenset(b.members) for b in enumerate_balls(g)} == balls_oracle(g)


@given(st.integers(1, 12), st.integers(0, 10**6))
def test_balls_match_bruteforce(n, seed):
    sp = random_space(np.random.default_rng(seed), n)
    balls = enumerate_balls(sp)
    got = {frozenset(b.members) for b in balls}
    assert got == balls_oracle(sp)
    assert len(got) == len(balls)
    for b in balls:
        assert b.center in b.members and b.measure > 0


def doubling_oracle(space, count=40001):
    top = 2 * space.dist.max() + 1
    radii = np.linspace(top / count, top, count)
    best = 1.0
    for c in range(space.n):
        d = space.dist[c]
        inner = (d[None, :] < radii[:, None]) @ space.mass
        outer = (d[None, :] < 2 * radii[:, None]) @ space.mass
        best = max(best, float(np.max(outer / inner)))
    return best


def test_doubling_examples(two_point):
    assert doubling_constant(interval_grid(1)) == 1.0
    assert doubling_constant(two_point) == 2.0
    g = interval_grid(8)
    assert doubling_constant(g) == pytest.approx(doubling_oracle(g), rel=1e-12)


@given(st.integers(1, 6), st.integers(0, 10**6))
def test_doubling_at_least_one(n, seed):
    sp = random_space(np.random.default_rng(seed), n)
    assert doubling_constant(sp) >= 1.0


def test_interval_grid():
    assert interval_grid(1).coords.tolist() == [0.5]
    g = interval_grid(4)
    assert g.coords.tolist() == [0.125, 0.375, 0.625, 0.875]
    assert g.mass.tolist() == [0.25] * 4
    assert validate_quasi_metric(interval_grid(2).dist) == 1.0
    for n in (2, 3, 7, 64):
        g = interval_grid(n)
        assert g.kappa == 1.0
        # the scan sees k/n rounded, so 3/7 can exceed 1/7 + 2/7 by one ulp
        assert validate_quasi_metric(g.dist) == pytest.approx(1.0, abs=4e-16)
        assert g.total_mass == pytest.approx(1.0, abs=1e-15)


def test_structural_constants():
    c = constants_from(1.0, 1.0)
    assert (c.theta_bar, c.tau, c.c_bar) == (5.0, 960.0, 307520.0)
    # second route: straight from the closed form
    assert c.c_bar == 32 * 1 * (2 * 5) * (1 + 6 * (32 * 5))
    assert structural_constants(interval_grid(8), "interval").c_bar == 2.0
    with pytest.raises(LorextError):
        constants_from(1.0, 0.0)
    big = constants_from(50.0, 400.0)
    assert math.isinf(big.c_bar) and big.overflow


def test_json_roundtrip(two_point):
    sp = Space.from_json(two_point.to_json())
    assert np.array_equal(sp.dist, two_point.dist) and sp.points == ("a", "b")
    assert Space.from_json({"interval_grid": 5}).grid_n == 5
    with pytest.raises(LorextError):
        Space.from_json({"interval_grid": 5, "extra": 1})
