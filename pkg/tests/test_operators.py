import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lorext import operators as ops
from lorext.errors import AlphaOutOfRange, BudgetZero, NotAGrid
from lorext.lorentz import lorentz_norm_rearr
from lorext.rearrange import Weight
from lorext.space import Space, interval_grid

from conftest import random_space, random_weight


def frac_kernel_oracle(space, alpha):
    n = space.n
    K = np.empty((n, n))
    for x in range(n):
        for y in range(n):
            if x == y:
                K[x, y] = space.mass[x] ** (alpha - 1)
            else:
                K[x, y] = space.mass[space.dist[x] < space.dist[x, y]].sum() ** (alpha - 1)
    return K


def frac_maximal_oracle(f, space, alpha):
    out = np.zeros(space.n)
    for c in range(space.n):
        for r in np.unique(np.concatenate([space.dist[c], np.nextafter(space.dist[c], np.inf)])):
            B = space.dist[c] < r
            if B.any():
                v = space.mass[B].sum() ** (alpha - 1) * np.sum(np.abs(f[B]) * space.mass[B])
                out[B] = np.maximum(out[B], v)
    return out


@given(st.integers(1, 12), st.integers(0, 10**6))
def test_maximal_fast_path_matches_bruteforce(n, seed):
    rng = np.random.default_rng(seed)
    sp = random_space(rng, n, quasi=bool(seed % 2))
    f = rng.normal(size=n)
    fast = ops.maximal(f, sp)
    assert np.allclose(fast, ops.maximal_bruteforce(f, sp), rtol=1e-12, atol=0)
    assert np.all(fast >= np.abs(f) * (1 - 1e-12))
    g = rng.normal(size=n)
    assert np.all(ops.maximal(f + g, sp) <= (fast + ops.maximal(g, sp)) * (1 + 1e-12))
    assert np.allclose(ops.maximal(3 * f, sp), 3 * fast, rtol=1e-14, atol=0)
    cols = ops.maximal(np.stack([f, g], axis=1), sp)
    assert np.allclose(cols[:, 1], ops.maximal(g, sp), rtol=1e-14, atol=0)


@given(st.integers(1, 9), st.integers(0, 10**6), st.sampled_from([0.25, 0.5, 0.75]))
def test_fractional_against_oracles(n, seed, alpha):
    rng = np.random.default_rng(seed)
    sp = random_space(rng, n)
    f = rng.normal(size=n)
    assert np.allclose(ops.fractional_kernel(sp, alpha), frac_kernel_oracle(sp, alpha), rtol=1e-12, atol=0)
    assert np.allclose(ops.fractional_maximal(f, sp, alpha), frac_maximal_oracle(f, sp, alpha), rtol=1e-12, atol=0)
    a, b = np.abs(f), np.abs(f) + rng.uniform(size=n)
    Ia, Ib = ops.fractional_integral(a, sp, alpha), ops.fractional_integral(b, sp, alpha)
    assert np.all(Ia <= Ib)
    g = rng.normal(size=n)
    assert np.allclose(ops.fractional_integral(2 * f - g, sp, alpha),
                       2 * ops.fractional_integral(f, sp, alpha) - ops.fractional_integral(g, sp, alpha),
                       rtol=1e-10, atol=1e-10)


def test_point_examples():
    sp = Space(dist=np.zeros((1, 1)), mass=np.array([0.3]))
    assert ops.maximal([2.0], sp)[0] == 2.0
    assert ops.fractional_maximal([2.0], sp, 0.5)[0] == pytest.approx(2 * 0.3**0.5, rel=1e-15)
    assert ops.fractional_integral([2.0], sp, 0.5)[0] == pytest.approx(2 * 0.3**0.5, rel=1e-15)
    assert ops.fractional_integral([0.0], sp, 0.5)[0] == 0.0
    g = interval_grid(8)
    assert np.allclose(ops.maximal(np.full(8, 2.5), g), 2.5, rtol=1e-15, atol=0)
    with pytest.raises(AlphaOutOfRange):
        ops.fractional_integral([1.0], sp, 0.0)


def test_two_point_examples(two_point):
    assert ops.maximal([1.0, 2.0], two_point).tolist() == [1.5, 2.0]
    assert ops.bmo_norm([0.0, 1.0], two_point) == 0.5
    assert ops.bmo_norm([4.0, 4.0], two_point) == 0.0


def test_hilbert_closed_form():
    errs = {}
    for n in (256, 512, 1024):
        g = interval_grid(n)
        x = g.coords
        inside = (x >= 0.1) & (x <= 0.9)
        errs[n] = np.max(np.abs(ops.hilbert(np.ones(n), g) - np.log(x / (1 - x)))[inside])
    assert errs[512] <= 2e-2
    assert errs[1024] < errs[512] < errs[256]
    g = interval_grid(16)
    assert np.all(ops.hilbert(np.zeros(16), g) == 0)
    sym = np.cos(2 * np.pi * g.coords)
    h = ops.hilbert(sym, g)
    assert abs(h[7] + h[8]) <= 1e-13
    with pytest.raises(NotAGrid):
        ops.hilbert(np.ones(2), Space(dist=np.array([[0.0, 1.0], [1.0, 0.0]]), mass=np.ones(2)))


def test_commutators(rng):
    g = interval_grid(32)
    f, b = rng.normal(size=32), rng.normal(size=32)
    assert np.allclose(ops.commutator_cz(f, b, 0, g), ops.hilbert(f, g), rtol=0, atol=1e-13)
    assert np.allclose(ops.commutator_frac(f, b, 0, g, 0.5), ops.fractional_integral(f, g, 0.5),
                       rtol=1e-13, atol=1e-13)
    c = np.full(32, 1.7)
    assert np.all(ops.commutator_cz(f, c, 2, g) == 0)
    assert np.all(ops.commutator_frac(f, c, 1, g, 0.5) == 0)
    # [b, H] f = b Hf - H(bf) for m = 1
    direct = b * ops.hilbert(f, g) - ops.hilbert(b * f, g)
    assert np.allclose(ops.commutator_cz(f, b, 1, g), direct, rtol=0, atol=1e-12)
    assert ops.bmo_norm(-2.5 * b, g) == pytest.approx(2.5 * ops.bmo_norm(b, g), rel=1e-14)


def test_operator_norm(rng):
    g = interval_grid(16)
    w = Weight(g, g.coords**0.3)
    nrm = lambda f: lorentz_norm_rearr(f, w, 2.0, 2.0)
    ident = ops.named_operator("identity", g)
    est = ops.operator_norm(ident, nrm, nrm, g, budget=32, same_norm=True)
    assert est.lower == pytest.approx(1.0, rel=1e-12) and est.upper == 1.0
    for name in ("maximal", "hilbert", "frac_integral", "commutator_cz"):
        T = ops.named_operator(name, g, b=g.coords)
        est = ops.operator_norm(T, nrm, nrm, g, budget=48, seed=3)
        assert est.lower <= est.upper
        assert nrm(T(est.witness)) / nrm(est.witness) == pytest.approx(est.lower, rel=1e-12)
    assert ops.operator_norm(T, nrm, nrm, g, budget=48, seed=3).lower == est.lower
    with pytest.raises(BudgetZero):
        ops.operator_norm(T, nrm, nrm, g, budget=0)
