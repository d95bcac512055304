"""Weighted Lorentz norms, grand Lorentz norms and their companions.

All classical norms are closed-form sums over the breakpoints of the
weighted rearrangement.  Grand norms take a supremum over a finite grid of
epsilon values; the grid is part of the input (``eps_grid``) and defaults to
:func:`default_eps_grid`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ExponentOutOfRange, InvalidExponent, InvalidPhi, SplitMismatch
from .rearrange import StepFunction, Weight, as_values, rearrange_values

__all__ = [
    "LorentzParams",
    "DualNorm",
    "conjugate",
    "default_eps_grid",
    "lebesgue_norm",
    "lorentz_norm_dist",
    "lorentz_norm_rearr",
    "lorentz_norm",
    "banach_norm",
    "iwaniec_sbordone_norm",
    "grand_lorentz_norm",
    "double_grand_norm",
    "phi_grand_norm",
    "lambda_grand_norm",
    "dual_pairing",
    "kothe_dual_norm",
    "convexify_norm",
    "convexification_identity",
    "holder_lorentz",
]

EPS_LOW = 1e-6
EPS_POINTS = 64


def conjugate(p: float) -> float:
    """Hoelder conjugate p' = p/(p-1), with 1' = inf and inf' = 1."""
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


def default_eps_grid(p: float, points: int = EPS_POINTS, low: float = EPS_LOW) -> np.ndarray:
    """Geometric grid from (p-1)(1-low) down to ``low``, strictly inside (0, p-1)."""
    top = (p - 1) * (1 - low)
    if not top > low:
        raise InvalidExponent(f"p={p} leaves no room for an epsilon grid in (0, p-1)")
    return np.geomspace(top, low, points)


def _check_grid(grid, upper: float) -> np.ndarray:
    g = np.asarray(grid, dtype=float).reshape(-1)
    if g.size == 0:
        raise InvalidExponent("epsilon grid is empty")
    if np.any(g <= 0) or np.any(g >= upper):
        raise InvalidExponent(f"epsilon grid must lie strictly inside (0, {upper})")
    return g


def _check_ps(p, s):
    p_arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(p_arr)) or np.any(p_arr < 1):
        raise InvalidExponent(f"p must lie in [1, inf), got {p}")
    if not (s >= 1):
        raise InvalidExponent(f"s must lie in [1, inf], got {s}")


def lebesgue_norm(f, w: Weight, p: float) -> float:
    """(integral of |f|^p w dmu)^(1/p)."""
    if not p > 0:
        raise InvalidExponent(f"p must be positive, got {p}")
    a = np.abs(as_values(f))
    return float(np.sum(a**p * w.nu) ** (1 / p))


def _rearr_sum(edges, levels, p, s):
    """Closed form of the rearrangement-side norm; p may be an array."""
    p = np.asarray(p, dtype=float)
    if levels.size == 0:
        return np.zeros(p.shape)
    e = edges[:, None] if p.ndim else edges
    lev = levels[:, None] if p.ndim else levels
    if math.isinf(s):
        return np.max(lev * e[1:] ** (1 / p), axis=0)
    ep = e ** (s / p)
    total = np.sum(lev**s * (ep[1:] - ep[:-1]), axis=0)
    return total ** (1 / s)


def _dist_sum(edges, levels, p, s):
    """Closed form of the distribution-side norm.

    The distribution function equals edges[j] on [levels[j+1], levels[j]),
    so s * integral of lambda^(s/p) tau^(s-1) is a sum of jumps in tau^s.
    """
    p = np.asarray(p, dtype=float)
    if levels.size == 0:
        return np.zeros(p.shape)
    lam = edges[1:][:, None] if p.ndim else edges[1:]
    v = levels[:, None] if p.ndim else levels
    if math.isinf(s):
        return np.max(v * lam ** (1 / p), axis=0)
    v_next = np.concatenate([v[1:], np.zeros_like(v[:1])])
    total = np.sum(lam ** (s / p) * (v**s - v_next**s), axis=0)
    return total ** (1 / s)


def lorentz_norm_dist(f, w: Weight, p: float, s: float) -> float:
    """Lorentz norm from the distribution function tau -> w{|f| > tau}."""
    _check_ps(p, s)
    edges, levels, _ = rearrange_values(as_values(f), w.nu)
    return float(_dist_sum(edges, levels, p, s))


def lorentz_norm_rearr(f, w: Weight, p: float, s: float) -> float:
    """((s/p) integral of (t^(1/p) f*_w(t))^s dt/t)^(1/s), or sup t^(1/p) f*_w(t)."""
    _check_ps(p, s)
    edges, levels, _ = rearrange_values(as_values(f), w.nu)
    return float(_rearr_sum(edges, levels, p, s))


lorentz_norm = lorentz_norm_rearr


def _gl_nodes(k: int = 24):
    x, wts = np.polynomial.legendre.leggauss(k)
    return x, wts


_GL_X, _GL_W = _gl_nodes()


def _avg_piece_integral(a, b, lev, c, p, s):
    """Integral over [a, b] of t^(s/p - 1) (lev + c/t)^s dt, for 0 < a < b."""
    if float(s).is_integer():
        k = np.arange(int(s) + 1)
        binom = np.array([math.comb(int(s), int(i)) for i in k], dtype=float)
        expo = s / p - k
        # (b^e - a^e)/e written to survive e = 0, where it becomes log(b/a)
        r = math.log(b / a)
        safe = np.where(expo == 0, 1.0, expo)
        ratio = np.where(expo == 0, r, np.expm1(expo * r) / safe)
        terms = binom * lev ** (s - k) * c**k * a**expo * ratio
        return float(np.sum(terms))
    # composite Gauss-Legendre in u = log t; the integrand is smooth there
    lo, hi = math.log(a), math.log(b)
    chunks = max(1, math.ceil((hi - lo) / 0.5))
    cuts = np.linspace(lo, hi, chunks + 1)
    mid = 0.5 * (cuts[:-1] + cuts[1:])[:, None]
    half = 0.5 * np.diff(cuts)[:, None]
    u = mid + half * _GL_X[None, :]
    g = np.exp(u * s / p) * (lev + c * np.exp(-u)) ** s
    return float(np.sum(half * _GL_W[None, :] * g))


def _banach_from(edges, levels, p, s) -> float:
    if levels.size == 0:
        return 0.0
    widths = np.diff(edges)
    F = np.concatenate([[0.0], np.cumsum(levels * widths)])
    if math.isinf(s):
        # t^(1/p) f**(t) decreases then increases on each piece, so the sup is at an edge
        return float(np.max(edges[1:] ** (1 / p - 1) * F[1:]))
    total = levels[0] ** s * edges[1] ** (s / p) * p / s
    for j in range(1, levels.size):
        c = F[j] - levels[j] * edges[j]
        total += _avg_piece_integral(edges[j], edges[j + 1], levels[j], max(c, 0.0), p, s)
    E, FE = edges[-1], F[-1]
    total += FE**s * E ** (s / p - s) / (s - s / p)
    return float((s / p * total) ** (1 / s))


def banach_norm(f, w: Weight, p: float, s: float) -> float:
    """The norm built on the averaged rearrangement f**_w.

    Same normalisation as :func:`lorentz_norm_rearr` with f* replaced by f**,
    so it dominates the Lorentz quasi-norm and exceeds it by at most p'.
    """
    _check_ps(p, s)
    if not p > 1:
        raise InvalidExponent(f"banach_norm needs p > 1, got {p}")
    edges, levels, _ = rearrange_values(as_values(f), w.nu)
    return _banach_from(edges, levels, p, s)


@dataclass(frozen=True)
class LorentzParams:
    p: float
    s: float = 2.0
    theta: float = 1.0
    eps_grid: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if not (1 < self.p < math.inf):
            raise InvalidExponent(f"p must lie in (1, inf), got {self.p}")
        if not (self.s >= 1):
            raise InvalidExponent(f"s must lie in [1, inf], got {self.s}")
        if not self.theta > 0:
            raise InvalidExponent(f"theta must be positive, got {self.theta}")
        grid = default_eps_grid(self.p) if self.eps_grid is None else self.eps_grid
        object.__setattr__(self, "eps_grid", _check_grid(grid, self.p - 1))

    def to_json(self) -> dict:
        return {"p": self.p, "s": self.s, "theta": self.theta, "eps_grid": self.eps_grid.tolist()}


def _sup(values: np.ndarray, grid: np.ndarray, with_witness: bool):
    k = int(np.argmax(values))
    value = float(values[k])
    return (value, float(grid[k])) if with_witness else value


def iwaniec_sbordone_norm(f, w: Weight, p: float, theta: float, eps_grid=None, with_witness=False):
    """sup over eps of eps^(theta/(p-eps)) ||f||_{L^(p-eps)_w}."""
    params = LorentzParams(p, p, theta, eps_grid)
    g = params.eps_grid
    q = p - g
    a = np.abs(as_values(f))
    inner = np.sum(a[:, None] ** q[None, :] * w.nu[:, None], axis=0) ** (1 / q)
    return _sup(g ** (theta / q) * inner, g, with_witness)


def grand_lorentz_norm(f, w: Weight, params: LorentzParams, with_witness=False):
    """sup over the grid of eps^(theta/(p-eps)) ||f||_{L^(p-eps, s)_w}.

    With ``with_witness`` the maximising epsilon is returned as well.
    """
    g = params.eps_grid
    q = params.p - g
    edges, levels, _ = rearrange_values(as_values(f), w.nu)
    inner = _rearr_sum(edges, levels, q, params.s)
    return _sup(g ** (params.theta / q) * inner, g, with_witness)


def double_grand_norm(f, w: Weight, p, s, theta, eps_grid=None, s_grid=None, with_witness=False):
    """Grand norm that also lowers the second exponent: sup over (eps1, eps2)."""
    if not (1 < s < math.inf):
        raise InvalidExponent(f"double grand norm needs 1 < s < inf, got {s}")
    params = LorentzParams(p, s, theta, eps_grid)
    g1 = params.eps_grid
    g2 = default_eps_grid(s) if s_grid is None else np.asarray(s_grid, dtype=float)
    if np.any(g2 < 0) or np.any(g2 >= s - 1):
        raise InvalidExponent(f"second grid must lie in [0, {s - 1})")
    edges, levels, _ = rearrange_values(as_values(f), w.nu)
    q = p - g1
    best, arg = -1.0, (None, None)
    for e2 in g2:
        vals = g1 ** (theta / q) * _rearr_sum(edges, levels, q, s - e2)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, arg = float(vals[k]), (float(g1[k]), float(e2))
    return (best, arg) if with_witness else best


def phi_grand_norm(f, w: Weight, p, s, phi: Callable, eps_grid=None, with_witness=False):
    """sup over eps of phi(eps)^(p-eps) ||f||_{L^(p-eps, s)_w}, exponent placed outside."""
    params = LorentzParams(p, s, 1.0, eps_grid)
    g = params.eps_grid
    asc = np.sort(g)
    probe = np.concatenate([[asc[0] * 1e-6], asc])
    vals = np.array([float(phi(x)) for x in probe])
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        raise InvalidPhi("phi must be finite and positive on the grid")
    if np.any(np.diff(vals) <= 0):
        raise InvalidPhi("phi must be strictly increasing on the grid")
    phis = np.array([float(phi(x)) for x in g])
    q = p - g
    edges, levels, _ = rearrange_values(as_values(f), w.nu)
    return _sup(phis**q * _rearr_sum(edges, levels, q, s), g, with_witness)


def lambda_grand_norm(f, w, p: float, theta: float, eps_grid=None, with_witness=False):
    """Grand norm of rearrangement type on (0, 1).

    ``f`` is a :class:`StepFunction` (already decreasing) or samples on a
    uniform grid of (0, 1), rearranged with respect to Lebesgue measure.
    ``w`` holds the values of a piecewise-constant weight on a uniform
    partition of (0, 1).  The epsilon range is (0, p-1) for p > 1 and (0, p)
    for p <= 1.
    """
    if not p > 0:
        raise InvalidExponent(f"p must be positive, got {p}")
    if not theta > 0:
        raise InvalidExponent(f"theta must be positive, got {theta}")
    if not isinstance(f, StepFunction):
        vals = as_values(f)
        edges, levels, _ = rearrange_values(vals, np.full(vals.size, 1.0 / vals.size))
        f = StepFunction(edges, levels, 1.0)
    if f.edges[-1] > 1 + 1e-12:
        raise InvalidExponent("the step function must live on (0, 1)")
    eps0 = p - 1 if p > 1 else p
    if eps_grid is None:
        g = np.geomspace(eps0 * (1 - EPS_LOW), min(EPS_LOW, eps0 / 2), EPS_POINTS)
    else:
        g = _check_grid(eps_grid, eps0)
    wv = np.asarray(w, dtype=float).reshape(-1)
    if np.any(wv <= 0):
        raise InvalidExponent("weight values must be positive")
    m = wv.size
    W_nodes = np.concatenate([[0.0], np.cumsum(wv) / m])

    def W(t):
        return np.interp(t, np.linspace(0.0, 1.0, m + 1), W_nodes)

    wmass = W(np.minimum(f.edges[1:], 1.0)) - W(np.minimum(f.edges[:-1], 1.0))
    q = p - g
    integral = np.sum(f.levels[:, None] ** q[None, :] * wmass[:, None], axis=0)
    return _sup((g**theta * integral) ** (1 / q), g, with_witness)


def dual_pairing(f, h, space) -> float:
    """Integral of f h with respect to mu."""
    return float(np.sum(as_values(f) * as_values(h) * space.mass))


@dataclass
class DualNorm:
    """Result of the Koethe-dual supremum over a finite witness family.

    ``value`` is a lower bound of the true supremum; ``ratio`` compares it
    with the primal norm so that C^-1 ||f|| <= value <= C ||f|| holds with
    C = max(ratio, 1/ratio).
    """

    value: float
    norm: float
    witness: np.ndarray
    candidates: int

    @property
    def ratio(self) -> float:
        return self.value / self.norm if self.norm > 0 else 1.0

    @property
    def constant(self) -> float:
        r = self.ratio
        return max(r, 1 / r) if r > 0 else math.inf


def _dual_witnesses(a: np.ndarray, sign: np.ndarray, w: Weight, p, s, rng, n_random: int):
    """Candidate g (pairing density against w dmu), as rows."""
    nu = w.nu
    pp = conjugate(p)
    cands = []
    cands.append(sign * a ** (p - 1))
    # Lorentz extremal profile: g* = t^(s/p - 1) (f*)^(s-1), evaluated per level
    if not math.isinf(s):
        order = np.argsort(-a, kind="stable")
        t_mid = np.cumsum(nu[order]) - 0.5 * nu[order]
        prof = np.zeros_like(a)
        prof[order] = t_mid ** (s / p - 1) * a[order] ** (s - 1)
        cands.append(sign * prof)
    wp = w.values ** (pp - 1)
    for key in (a, a * wp):
        order = np.argsort(-key, kind="stable")
        for k in range(1, a.size + 1):
            g = np.zeros_like(a)
            g[order[:k]] = 1.0
            cands.append(sign * g)
    base = np.array(cands)
    flips = rng.choice([-1.0, 1.0], size=(n_random, a.size))
    scales = rng.lognormal(0.0, 0.5, size=(n_random, a.size))
    pick = base[rng.integers(0, base.shape[0], size=n_random)]
    return np.vstack([base, pick * np.where(flips > 0, 1.0, scales)])


def kothe_dual_norm(f, w: Weight, p: float, s: float, seed: int = 0, n_random: int = 32) -> DualNorm:
    """sup over witnesses h of |integral f h dmu| / ||h/w||_{L^(p', s')_w}."""
    _check_ps(p, s)
    a = np.abs(as_values(f))
    sign = np.where(as_values(f) < 0, -1.0, 1.0)
    rng = np.random.default_rng(seed)
    pp, ss = conjugate(p), conjugate(s)
    best, best_h = 0.0, np.zeros_like(a)
    cands = _dual_witnesses(a, sign, w, p, s, rng, n_random)
    for g in cands:
        denom = lorentz_norm_rearr(g, w, pp, ss)
        if denom == 0:
            continue
        h = g * w.values
        val = abs(dual_pairing(f, h, w.space)) / denom
        if val > best:
            best, best_h = val, h
    return DualNorm(best, lorentz_norm_rearr(f, w, p, s), best_h, len(cands))


def convexify_norm(f, norm: Callable, q0: float) -> float:
    """||f||_{E^q0} = || |f|^q0 ||_E^(1/q0) for a norm given as a callable."""
    if not q0 > 0:
        raise ExponentOutOfRange(f"q0 must be positive, got {q0}")
    return float(norm(np.abs(as_values(f)) ** q0)) ** (1 / q0)


def convexification_identity(f, w: Weight, p: float, s: float, q0: float) -> tuple[float, float]:
    """Both sides of || |f|^(1/q0) ||_{p,s}^q0 = ||f||_{p/q0, s/q0}."""
    if not (p / q0 > 1 and s / q0 > 1):
        raise ExponentOutOfRange(f"need p/q0 > 1 and s/q0 > 1, got p={p}, s={s}, q0={q0}")
    a = np.abs(as_values(f))
    lhs = lorentz_norm_rearr(a ** (1 / q0), w, p, s) ** q0
    rhs = lorentz_norm_rearr(a, w, p / q0, s / q0)
    return lhs, rhs


def _harmonic_split(x: float, x1: float) -> float:
    inv = 1 / x - 1 / x1
    if inv < -1e-15:
        raise SplitMismatch(f"1/{x} - 1/{x1} is negative")
    return math.inf if abs(inv) <= 1e-15 else 1 / inv


def holder_lorentz(f1, f2, w: Weight, p1, s1, p2=None, s2=None, p=None, s=None):
    """Return (||f1 f2||_{p,s}, ||f1||_{p1,s1} ||f2||_{p2,s2}, ratio).

    Either the second pair or the target pair may be omitted; it is then
    solved from 1/p = 1/p1 + 1/p2 and 1/s = 1/s1 + 1/s2.
    """
    if p is None:
        if p2 is None or s2 is None:
            raise SplitMismatch("give either (p2, s2) or (p, s)")
        p = 1 / (1 / p1 + 1 / p2)
        s = 1 / (1 / s1 + 1 / s2)
    else:
        if p2 is None:
            p2 = _harmonic_split(p, p1)
        if s2 is None:
            s2 = _harmonic_split(s, s1)
        if abs(1 / p - 1 / p1 - 1 / p2) > 1e-12 or abs(1 / s - 1 / s1 - 1 / s2) > 1e-12:
            raise SplitMismatch(f"exponents ({p},{s}) do not split as ({p1},{s1}) + ({p2},{s2})")
    a1, a2 = as_values(f1), as_values(f2)
    lhs = lorentz_norm_rearr(a1 * a2, w, p, s)
    rhs = lorentz_norm_rearr(a1, w, p1, s1) * lorentz_norm_rearr(a2, w, p2, s2)
    return lhs, rhs, (lhs / rhs if rhs > 0 else 0.0)
