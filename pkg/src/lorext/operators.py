"""Maximal, fractional and singular operators on finite spaces, plus operator-norm search."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import AlphaOutOfRange, BudgetZero, LorextError, NotAGrid
from .rearrange import as_values
from .space import Space

__all__ = [
    "maximal",
    "maximal_bruteforce",
    "iterated_maximal",
    "fractional_maximal",
    "fractional_kernel",
    "fractional_integral",
    "hilbert",
    "bmo_norm",
    "commutator_cz",
    "commutator_frac",
    "Operator",
    "OperatorNormEstimate",
    "operator_norm",
    "named_operator",
]


def _check_alpha(alpha: float):
    if not (0 < alpha < 1):
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}")


def _prefix_integrals(a: np.ndarray, space: Space) -> tuple[np.ndarray, np.ndarray]:
    pre = space.prefix
    cum = pre.cumulate(a * (space.mass if a.ndim == 1 else space.mass[:, None]))
    cm = pre.cum_mass if a.ndim == 1 else pre.cum_mass[..., None]
    return cum, cm


def maximal(f, space: Space) -> np.ndarray:
    """Mf(x) = max over balls B containing x of the mu-average of |f| on B.

    ``f`` may be (n,) or (n, m); columns are handled independently.
    """
    a = np.abs(np.asarray(as_values(f) if np.ndim(f) <= 1 else f, dtype=float))
    cum, cm = _prefix_integrals(a, space)
    return space.prefix.containing_max(cum / cm)


def maximal_bruteforce(f, space: Space) -> np.ndarray:
    """Same as :func:`maximal`, by scanning the deduplicated ball list."""
    a = np.abs(as_values(f))
    fam = space.balls
    avgs = fam.averages(a, space.mass)
    return np.where(fam.members, avgs[:, None], -np.inf).max(axis=0)


def iterated_maximal(f, space: Space, m: int) -> np.ndarray:
    """M applied m times; m = 0 gives |f|."""
    if m < 0:
        raise LorextError(f"iteration count must be nonnegative, got {m}")
    out = np.abs(as_values(f))
    for _ in range(m):
        out = maximal(out, space)
    return out


def fractional_maximal(f, space: Space, alpha: float) -> np.ndarray:
    """M_alpha f(x) = max over balls B containing x of mu(B)^(alpha-1) times the integral of |f| over B."""
    _check_alpha(alpha)
    a = np.abs(np.asarray(as_values(f) if np.ndim(f) <= 1 else f, dtype=float))
    cum, cm = _prefix_integrals(a, space)
    return space.prefix.containing_max(cm ** (alpha - 1) * cum)


@lru_cache(maxsize=32)
def _strict_ball_measures(space: Space) -> np.ndarray:
    """mu(B(x, d(x, y))) for every pair, the ball being open so y is excluded."""
    pre = space.prefix
    n = space.n
    out = np.empty((n, n))
    padded = np.concatenate([np.zeros((n, 1)), pre.cum_mass], axis=1)
    for x in range(n):
        left = np.searchsorted(pre.sorted_d[x], space.dist[x], side="left")
        out[x] = padded[x, left]
    return out


@lru_cache(maxsize=32)
def fractional_kernel(space: Space, alpha: float, printed_diagonal: bool = False) -> np.ndarray:
    """K_alpha(x, y) = mu(B(x, d(x, y)))^(alpha-1) off the diagonal.

    The diagonal is mu({x})^(alpha-1); ``printed_diagonal`` uses mu({x})
    instead.
    """
    _check_alpha(alpha)
    meas = _strict_ball_measures(space)
    K = np.empty_like(meas)
    off = ~np.eye(space.n, dtype=bool)
    K[off] = meas[off] ** (alpha - 1)
    diag = space.mass if printed_diagonal else space.mass ** (alpha - 1)
    K[np.diag_indices(space.n)] = diag
    K.setflags(write=False)
    return K


def fractional_integral(f, space: Space, alpha: float, printed_diagonal: bool = False) -> np.ndarray:
    """I_alpha f(x) = sum over y of K_alpha(x, y) f(y) mu({y})."""
    K = fractional_kernel(space, alpha, printed_diagonal)
    return K @ (as_values(f) * space.mass)


@lru_cache(maxsize=8)
def _hilbert_kernel(n: int) -> np.ndarray:
    # (x_i - x_j) = (i - j)/n on the midpoint grid, times the cell width 1/n
    i = np.arange(n)
    diff = (i[:, None] - i[None, :]).astype(float)
    with np.errstate(divide="ignore"):
        K = np.where(diff == 0, 0.0, 1.0 / np.where(diff == 0, 1.0, diff))
    K.setflags(write=False)
    return K


def _require_grid(space: Space) -> int:
    if not space.is_interval_grid:
        raise NotAGrid("the Hilbert transform is defined on interval grids only")
    return int(space.grid_n)


def hilbert(f, space: Space) -> np.ndarray:
    """Midpoint-rule principal value of the integral of f(t)/(x - t) over (0, 1).

    The singular cell is omitted, which is the symmetric principal value on
    the uniform grid.
    """
    n = _require_grid(space)
    return _hilbert_kernel(n) @ as_values(f)


def bmo_norm(b, space: Space) -> float:
    """max over balls of the mean oscillation of b around its ball average."""
    v = as_values(b)
    fam = space.balls
    avg = fam.averages(v, space.mass)
    osc = (fam.members * np.abs(v[None, :] - avg[:, None])) @ space.mass / fam.measures
    return float(osc.max())


def _power_diff(b: np.ndarray, m: int, absolute: bool) -> np.ndarray:
    d = b[:, None] - b[None, :]
    if absolute:
        d = np.abs(d)
    return d**m


def commutator_cz(f, b, m: int, space: Space) -> np.ndarray:
    """Sum over y of [b(x) - b(y)]^m k(x, y) f(y) with the Hilbert kernel."""
    n = _require_grid(space)
    B = _power_diff(as_values(b), m, False)
    return (B * _hilbert_kernel(n)) @ as_values(f)


def commutator_frac(f, b, m: int, space: Space, alpha: float, signed: bool = False,
                    printed_diagonal: bool = False) -> np.ndarray:
    """Fractional commutator; ``signed`` uses [b(x)-b(y)]^m, otherwise |b(x)-b(y)|^m."""
    K = fractional_kernel(space, alpha, printed_diagonal)
    B = _power_diff(as_values(b), m, not signed)
    return (B * K) @ (as_values(f) * space.mass)


@dataclass
class Operator:
    """An operator together with S = sup over f of max|Tf| / max|f|.

    ``sup_bound`` makes the crude upper bound in :func:`operator_norm`
    rigorous for any pair of lattice norms.
    """

    name: str
    apply: Callable[[np.ndarray], np.ndarray]
    sup_bound: float
    identity: bool = False

    def __call__(self, f):
        return self.apply(np.asarray(f, dtype=float))


def named_operator(name: str, space: Space, alpha: float = 0.5, m: int = 1, b=None) -> Operator:
    """Build one of the operators addressable by name."""
    if name == "identity":
        return Operator("identity", lambda f: f, 1.0, identity=True)
    if name == "maximal":
        return Operator(name, lambda f: maximal(f, space), 1.0)
    if name == "maximal^m":
        return Operator(name, lambda f: iterated_maximal(f, space, m), 1.0)
    if name == "frac_maximal":
        _check_alpha(alpha)
        # mu(B)^(alpha - 1) * mu(B) max|f| <= mu(X)^alpha max|f|
        return Operator(name, lambda f: fractional_maximal(f, space, alpha), space.total_mass**alpha)
    if name == "frac_integral":
        K = fractional_kernel(space, alpha)
        return Operator(name, lambda f: fractional_integral(f, space, alpha), float((K @ space.mass).max()))
    bv = np.zeros(space.n) if b is None else as_values(b)
    if name == "hilbert":
        n = _require_grid(space)
        return Operator(name, lambda f: hilbert(f, space), float(np.abs(_hilbert_kernel(n)).sum(axis=1).max()))
    if name == "commutator_cz":
        n = _require_grid(space)
        S = float((np.abs(_power_diff(bv, m, True)) * np.abs(_hilbert_kernel(n))).sum(axis=1).max())
        return Operator(name, lambda f: commutator_cz(f, bv, m, space), S)
    if name == "commutator_frac":
        K = fractional_kernel(space, alpha)
        S = float(((_power_diff(bv, m, True) * K) @ space.mass).max())
        return Operator(name, lambda f: commutator_frac(f, bv, m, space, alpha), S)
    raise LorextError(f"unknown operator {name!r}")


@dataclass
class OperatorNormEstimate:
    lower: float
    upper: float
    witness: np.ndarray
    evaluations: int = 0

    def to_json(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "witness": self.witness.tolist(),
                "evaluations": self.evaluations}


def _unit(n: int, i: int) -> np.ndarray:
    e = np.zeros(n)
    e[i] = 1.0
    return e


def operator_norm(T: Operator, source: Callable, target: Callable, space: Space,
                  budget: int = 256, seed: int = 0, extra: Sequence[np.ndarray] = (),
                  refine_sweeps: int = 1, same_norm: bool = False) -> OperatorNormEstimate:
    """Lower and upper bounds for sup ||Tf||_target / ||f||_source.

    The lower bound is the best ratio over ball indicators (subsampled to the
    budget), the caller's ``extra`` profiles, seeded Rademacher and lognormal
    samples, then a multiplicative coordinate ascent from the best candidate.
    The upper bound is S ||chi_X||_target / min_x ||chi_{x}||_source, valid
    for lattice norms because |Tf| <= S max|f| and max|f| chi_{x} <= |f|.
    """
    if budget <= 0:
        raise BudgetZero("operator_norm needs a positive search budget")
    n = space.n
    rng = np.random.default_rng(seed)
    fam = space.balls
    pick = np.arange(len(fam))
    n_random = max(2, budget // 4)
    n_balls = max(1, budget - n_random - len(extra))
    if pick.size > n_balls:
        pick = np.sort(rng.choice(pick, size=n_balls, replace=False))
    cands = [fam.members[k].astype(float) for k in pick]
    cands.extend(np.asarray(e, dtype=float) for e in extra)
    half = n_random // 2
    cands.extend(rng.choice([-1.0, 1.0], size=(half, n)))
    cands.extend(rng.lognormal(0.0, 1.0, size=(n_random - half, n)))

    evals = 0

    def ratio(f):
        nonlocal evals
        evals += 1
        d = source(f)
        return target(T(f)) / d if d > 0 else -math.inf

    best, best_f = -math.inf, cands[0]
    for f in cands:
        r = ratio(f)
        if r > best:
            best, best_f = r, f
    for _ in range(refine_sweeps):
        improved = False
        for i in range(n):
            for factor in (2.0, 0.5):
                g = best_f.copy()
                g[i] = g[i] * factor if g[i] != 0 else float(np.max(np.abs(best_f)))
                r = ratio(g)
                if r > best:
                    best, best_f, improved = r, g, True
        if not improved:
            break

    if T.identity and same_norm:
        upper = 1.0
    else:
        floor = min(source(_unit(n, i)) for i in range(n))
        upper = T.sup_bound * target(np.ones(n)) / floor
    # the crude bound is rigorous; tiny rounding in the lower bound is clipped
    lower = min(best, upper) if best <= upper * (1 + 1e-12) else best
    return OperatorNormEstimate(float(lower), float(upper), best_f, evals)
