"""Verification harness: boundedness ratios, necessity extractions and Reports.

Every scenario is deterministic given its configuration and seed; Reports
serialise to canonical JSON (sorted keys, shortest round-trip floats) and to
a flat CSV with one row per recorded ratio.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.stats import spearmanr

from .errors import ClassViolation, GridTooCoarse, LorextError, ScalingMismatch
from .extrapolation import grand_pairing_inverse, marcinkiewicz_maximal_bound, phi_psi_63
from .lorentz import (LorentzParams, conjugate, default_eps_grid, grand_lorentz_norm,
                      iwaniec_sbordone_norm, lebesgue_norm)
from .operators import (Operator, commutator_cz, commutator_frac, fractional_integral,
                        fractional_kernel, fractional_maximal, hilbert, iterated_maximal, maximal)
from .rearrange import Weight
from .space import Space, interval_grid
from .weights import ap_characteristic, power_weight

__all__ = [
    "Report",
    "GrandNorm",
    "grid_family",
    "spearman",
    "check_boundedness",
    "boundedness_scenario",
    "lemma_mn_check",
    "necessity_maximal",
    "necessity_hilbert",
    "necessity_fractional",
    "pointwise_fractional_constant",
    "equivalence_suite_63",
    "comovement",
    "run_scenario",
    "SCENARIOS",
]


def _clean(obj):
    """Convert numpy scalars and arrays into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


@dataclass
class Report:
    scenario: str
    space: dict
    weight_family: dict
    exponents: dict
    rows: list = field(default_factory=list)  # {"label", "value", "witness"}
    max_ratio: float = 0.0
    witness: object = None
    lower_bounds: dict = field(default_factory=dict)
    slack: float = math.inf
    passed: bool = True
    notes: list = field(default_factory=list)
    seed: int = 0

    def add(self, label: str, value: float, witness=None):
        self.rows.append({"label": label, "value": float(value), "witness": witness})

    def to_dict(self) -> dict:
        return _clean({
            "scenario": self.scenario,
            "space": self.space,
            "weight_family": self.weight_family,
            "exponents": self.exponents,
            "rows": self.rows,
            "max_ratio": self.max_ratio,
            "witness": self.witness,
            "lower_bounds": self.lower_bounds,
            "slack": self.slack,
            "passed": self.passed,
            "notes": self.notes,
            "seed": self.seed,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["scenario", "label", "value", "witness"])
        for r in self.rows:
            wit = r["witness"]
            wit = "" if wit is None else json.dumps(_clean(wit), sort_keys=True)
            wr.writerow([self.scenario, r["label"], format(r["value"], ".17g"), wit])
        return buf.getvalue()


@dataclass
class GrandNorm:
    """f -> grand Lorentz norm, or the grand Lebesgue norm when ``s`` is None."""

    w: Weight
    p: float
    s: Optional[float]
    theta: float
    eps_grid: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.s is not None:
            self.params = LorentzParams(self.p, self.s, self.theta, self.eps_grid)

    def __call__(self, f) -> float:
        if self.s is None:
            return iwaniec_sbordone_norm(f, self.w, self.p, self.theta, self.eps_grid)
        return grand_lorentz_norm(f, self.w, self.params)

    def describe(self) -> dict:
        return {"p": self.p, "s": self.s, "theta": self.theta}


def grid_family(space: Space, w: Weight, p: float) -> list[tuple[str, np.ndarray]]:
    """Test functions defined on (0, 1) so that they mean the same on every grid."""
    x = np.asarray(space.coords, dtype=float)
    fam = []
    for k in range(8):
        fam.append((f"chi[{k}/8,{k + 1}/8)", ((x >= k / 8) & (x < (k + 1) / 8)).astype(float)))
    for j in range(1, 5):
        fam.append((f"chi(0,2^-{j})", (x < 2.0**-j).astype(float)))
        fam.append((f"chi(1-2^-{j},1)", (x > 1 - 2.0**-j).astype(float)))
    for b in (-0.4, -0.2, 0.5, 2.0):
        fam.append((f"x^{b}", x**b))
    fam.append(("w^(1-p')", w.values ** (1 - conjugate(p))))
    fam.append(("one", np.ones_like(x)))
    fam.append(("sin(2 pi x)", np.sin(2 * np.pi * x)))
    return fam


def spearman(x, y) -> float:
    r = spearmanr(x, y).statistic
    return float(r)


def comovement(values) -> dict:
    """Spearman rank correlation of ``values`` with their position, plus strictness."""
    v = [float(a) for a in values]
    strict = all(b > a for a, b in zip(v, v[1:]))
    return {"values": v, "spearman": spearman(np.arange(len(v)), v), "strictly_increasing": strict}


def check_boundedness(T: Callable, source: Callable, target: Callable,
                      family: Sequence[tuple[str, np.ndarray]], slack: float = math.inf,
                      majorant: Optional[Callable] = None) -> tuple[float, str, list]:
    """max over the family of ||T f||_target / ||f||_source.

    With ``majorant`` the denominator is ||majorant(f)||_source instead,
    which is how the commutator estimates are phrased.
    """
    best, arg, rows = -math.inf, None, []
    for label, f in family:
        den = source(majorant(f) if majorant is not None else f)
        if den == 0:
            continue
        r = target(T(f)) / den
        rows.append((label, r))
        if r > best:
            best, arg = r, label
    return best, arg, rows


def _class_guard(w: Weight, p: float, bound: float) -> float:
    a = ap_characteristic(w, p).value
    if not a <= bound:
        raise ClassViolation(f"[w]_A_{p} = {a} exceeds the class bound {bound}")
    return a


def _grid_setup(n: int, a: float):
    g = interval_grid(n)
    return g, power_weight(g, a)


def boundedness_scenario(kind: str, a: float, n: int = 64, p: float = 2.0, s: float = 2.0,
                         theta: float = 1.0, alpha: float = 0.5, m: int = 1,
                         tol: float = 0.05, slack: Optional[float] = None,
                         class_bound: float = 1e6, seed: int = 0) -> Report:
    """Sufficiency ratio on interval_grid(n) and interval_grid(2n) for a power weight x^a.

    kinds: "identity", "maximal" (M on the grand Lorentz space), "hilbert"
    (the singular integral as the extrapolated operator), "commutator_cz"
    (K_b^m f against M^(m+1) f), "commutator_frac" (the absolute fractional
    commutator against M_alpha(M^m f)) and "commutator_frac_direct" (the
    same against f).  The symbol is b(x) = x.
    """
    results = []
    chars = []
    for size in (n, 2 * n):
        g, w = _grid_setup(size, a)
        chars.append(_class_guard(w, p, class_bound))
        G = GrandNorm(w, p, s, theta)
        b = np.asarray(g.coords, dtype=float)
        fam = grid_family(g, w, p)
        maj = None
        if kind == "identity":
            T = lambda f: f
        elif kind == "maximal":
            T = lambda f, g=g: maximal(f, g)
        elif kind == "hilbert":
            T = lambda f, g=g: hilbert(f, g)
        elif kind == "commutator_cz":
            T = lambda f, g=g, b=b: commutator_cz(f, b, m, g)
            maj = lambda f, g=g: iterated_maximal(f, g, m + 1)
        elif kind == "commutator_frac":
            T = lambda f, g=g, b=b: commutator_frac(f, b, m, g, alpha)
            maj = lambda f, g=g: fractional_maximal(iterated_maximal(f, g, m), g, alpha)
        elif kind == "commutator_frac_direct":
            T = lambda f, g=g, b=b: commutator_frac(f, b, m, g, alpha)
        else:
            raise LorextError(f"unknown boundedness scenario {kind!r}")
        results.append(check_boundedness(T, G, G, fam, majorant=maj))

    (r1, w1, rows1), (r2, w2, rows2) = results
    rep = Report(
        scenario=f"boundedness/{kind}",
        space={"interval_grid": [n, 2 * n]},
        weight_family={"power": a, "ap": chars},
        exponents={"p": p, "s": s, "theta": theta, "alpha": alpha, "m": m},
        seed=seed,
    )
    for label, r in rows1:
        rep.add(f"n={n}:{label}", r, label)
    for label, r in rows2:
        rep.add(f"n={2 * n}:{label}", r, label)
    change = abs(r2 - r1) / r1
    rep.max_ratio = max(r1, r2)
    rep.witness = w2 if r2 >= r1 else w1
    rep.lower_bounds = {"ratio_n": r1, "ratio_2n": r2, "relative_change": change, "tolerance": tol}
    if slack is None and kind == "maximal":
        g, w = _grid_setup(n, a)
        bound = marcinkiewicz_maximal_bound(w, p, s).value
        slack = 10 * bound
        rep.notes.append("slack is 10 times the interpolated maximal bound with C = 1")
    rep.slack = math.inf if slack is None else slack
    rep.passed = bool(math.isfinite(rep.max_ratio) and change <= tol and rep.max_ratio <= rep.slack)
    return rep


def lemma_mn_check(space: Space, w: Weight, p: float, s: float, theta: float,
                   seed: int = 0) -> Report:
    """max over balls B and test functions on B of
    ||f||_{grand Lorentz} / (w(B)^(-1/p) ||f||_{L^p_w} ||chi_B||_{grand Lebesgue})."""
    G = GrandNorm(w, p, s, theta)
    IS = GrandNorm(w, p, None, theta)
    rng = np.random.default_rng(seed)
    fam = space.balls
    noise = rng.lognormal(0.0, 1.0, size=space.n)
    sigma = w.values ** (1 - conjugate(p))
    best, arg = -math.inf, None
    rep = Report("lemma-ball", _space_desc(space), {"values": "given"},
                 {"p": p, "s": s, "theta": theta}, seed=seed)
    for k in range(len(fam)):
        chi = fam.members[k].astype(float)
        wB = float(np.sum(chi * w.nu))
        isn = IS(chi)
        for label, f in (("chi_B", chi), ("chi_B w^(1-p')", chi * sigma), ("chi_B noise", chi * noise)):
            r = G(f) / (wB ** (-1 / p) * lebesgue_norm(f, w, p) * isn)
            if r > best:
                best, arg = r, {"ball": k, "members": [int(i) for i in np.flatnonzero(chi)], "f": label}
    rep.max_ratio, rep.witness = best, arg
    rep.add("max", best, arg)
    rep.passed = bool(math.isfinite(best))
    return rep


def _space_desc(space: Space) -> dict:
    if space.is_interval_grid:
        return {"interval_grid": int(space.grid_n)}
    return {"n": space.n}


def necessity_maximal(space: Space, w: Weight, p: float, s: float, theta: float,
                      m_bound: Optional[float] = None) -> Report:
    """Per ball, run the chain with f = chi_B w^(1-p').

    The extracted quantity is avg_B(f) ||chi_B|| / (w(B)^(-1/p) ||f||_{L^p_w} ||chi_B||),
    which the chain bounds by ||M|| times the ball-lemma constant.  It equals
    the A_p product of B raised to 1/p; both routes are recorded.
    """
    IS = GrandNorm(w, p, None, theta)
    sigma = w.values ** (1 - conjugate(p))
    fam = space.balls
    extracted = np.empty(len(fam))
    product = np.empty(len(fam))
    for k in range(len(fam)):
        chi = fam.members[k]
        f = np.where(chi, sigma, 0.0)
        muB = fam.measures[k]
        wB = float(np.sum(w.nu[chi]))
        avg = float(np.sum(f * space.mass)) / muB
        nchi = IS(chi.astype(float))
        extracted[k] = avg * nchi / (wB ** (-1 / p) * lebesgue_norm(f, w, p) * nchi)
        sB = float(np.sum(sigma[chi] * space.mass[chi]))
        product[k] = (wB / muB) * (sB / muB) ** (p - 1)
    k = int(np.argmax(extracted))
    rep = Report("necessity/maximal", _space_desc(space), {"values": "given"},
                 {"p": p, "s": s, "theta": theta})
    rep.max_ratio = float(extracted[k])
    rep.witness = fam.ball(k).to_json()
    dev = float(np.max(np.abs(extracted - product ** (1 / p)) / product ** (1 / p)))
    rep.lower_bounds = {
        "extracted": float(extracted[k]),
        "ap_product_root": float(product.max() ** (1 / p)),
        "ap": ap_characteristic(w, p).value,
        "max_relative_deviation": dev,
    }
    rep.add("extracted", extracted[k], rep.witness)
    if m_bound is not None:
        rep.slack = m_bound
        rep.lower_bounds["m_bound"] = m_bound
    rep.passed = bool(dev <= 1e-12 and rep.max_ratio <= rep.slack * (1 + 1e-12))
    return rep


def _harmonic(k: np.ndarray) -> np.ndarray:
    """H(k) = 1 + 1/2 + ... + 1/k with H(0) = 0, for integer arrays k >= 0."""
    top = int(k.max()) if k.size else 0
    table = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, top + 1))])
    return table[k]


def necessity_hilbert(space: Space, w: Weight, p: float, theta: float,
                      h_bound: Optional[float] = None, half_factor: float = 0.45) -> Report:
    """Adjacent-interval comparison driven by the Hilbert transform.

    For every J of length L cells (2 <= L <= n/4) and its neighbour J' of
    equal length, records ||chi_J|| / ||chi_J'|| in the grand Lebesgue norm
    and the factor ||chi_J H chi_J'|| / ||chi_J||, which the argument
    bounds below by 1/2 (the continuum value is at least log 2).
    """
    if not space.is_interval_grid:
        raise LorextError("necessity_hilbert needs an interval grid")
    n = int(space.grid_n)
    if n // 4 < 2:
        raise GridTooCoarse(f"interval_grid({n}) has no interval of at least 2 cells with length <= 1/4")
    IS = GrandNorm(w, p, None, theta)
    g = IS.eps_grid if IS.eps_grid is not None else default_eps_grid(p)
    qs = p - g
    coef = g ** (theta / qs)
    cw = np.concatenate([[0.0], np.cumsum(w.nu)])
    worst_c, c_arg = -math.inf, None
    worst_half, h_arg = math.inf, None
    for L in range(2, n // 4 + 1):
        starts = np.arange(0, n - L + 1)
        right_ok = starts + 2 * L <= n
        nb = np.where(right_ok, starts + L, starts - L)
        ok = nb >= 0
        starts, nb = starts[ok], nb[ok]
        wJ = cw[starts + L] - cw[starts]
        wJp = cw[nb + L] - cw[nb]
        nJ = np.max(coef[None, :] * wJ[:, None] ** (1 / qs[None, :]), axis=1)
        nJp = np.max(coef[None, :] * wJp[:, None] ** (1 / qs[None, :]), axis=1)
        c = nJ / nJp
        k = int(np.argmax(c))
        if c[k] > worst_c:
            worst_c, c_arg = float(c[k]), {"J": [int(starts[k]), int(starts[k] + L)], "J'": [int(nb[k]), int(nb[k] + L)]}
        # H chi_J' at the cells of J, in closed form through harmonic numbers
        i = starts[:, None] + np.arange(L)[None, :]
        c0, c1 = nb[:, None], nb[:, None] + L - 1
        right = c0 > i
        Hv = np.where(right,
                      -(_harmonic(np.abs(c1 - i)) - _harmonic(np.abs(c0 - i) - 1)),
                      _harmonic(np.abs(i - c0)) - _harmonic(np.abs(i - c1) - 1))
        nu = w.nu[i]
        inner = np.sum(np.abs(Hv)[:, :, None] ** qs[None, None, :] * nu[:, :, None], axis=1) ** (1 / qs)
        nH = np.max(coef[None, :] * inner, axis=1)
        ratio = nH / nJ
        k = int(np.argmin(ratio))
        if ratio[k] < worst_half:
            worst_half, h_arg = float(ratio[k]), {"J": [int(starts[k]), int(starts[k] + L)], "J'": [int(nb[k]), int(nb[k] + L)]}
    ext = necessity_maximal(space, w, p, p, theta)
    rep = Report("necessity/hilbert", _space_desc(space), {"values": "given"}, {"p": p, "theta": theta})
    rep.max_ratio = worst_c
    rep.witness = c_arg
    rep.add("adjacent_constant", worst_c, c_arg)
    rep.add("half_factor", worst_half, h_arg)
    rep.lower_bounds = {"adjacent_constant": worst_c, "half_factor": worst_half,
                        "extracted": ext.lower_bounds["extracted"], "ap": ext.lower_bounds["ap"]}
    if h_bound is not None:
        rep.lower_bounds["h_bound"] = h_bound
    rep.passed = bool(math.isfinite(worst_c) and worst_half >= half_factor)
    return rep


def pointwise_fractional_constant(space: Space, alpha: float) -> dict:
    """Exact C_alpha = sup over f >= 0 of max_x M_alpha f(x) / I_alpha f(x).

    The ratio is linear-fractional in f, so the sup is reached at point
    masses: C_alpha = max over balls B, x and y in B of mu(B)^(alpha-1)/K_alpha(x, y).
    """
    K = fractional_kernel(space, alpha)
    fam = space.balls
    best, arg = -math.inf, None
    for k in range(len(fam)):
        idx = np.flatnonzero(fam.members[k])
        val = fam.measures[k] ** (alpha - 1) / K[np.ix_(idx, idx)].min()
        if val > best:
            best, arg = float(val), fam.ball(k).to_json()
    return {"C_alpha": best, "witness": arg}


def necessity_fractional(space: Space, w: Weight, p: float, s: float, q: float, r: float,
                         alpha: float, theta: float, bound: Optional[float] = None,
                         t_grid=None) -> Report:
    """Closing product mu(B)^(alpha-1) w(B)^(1/q) (integral over B of w^(-p'/q))^(1/p') per ball.

    Its q-th power is the A_(1+q/p') product of B; the report records the
    characteristics A_(1+q/p') and A_(1+p/q') side by side.  For every ball
    it also derives eta_B from the grand Lebesgue witness of chi_B and the
    paired eps_B, and checks psi(t) / t^(theta(1+alpha q)) on a small-t grid.
    """
    if abs(q - p / (1 - alpha * p)) > 1e-12 * q or abs(r - s / (1 - alpha * s)) > 1e-12 * r:
        raise ScalingMismatch(f"need q = p/(1-alpha p) and r = s/(1-alpha s); got q={q}, r={r}")
    pp, qq = conjugate(p), conjugate(q)
    sigma = w.values ** (-pp / q)
    fam = space.balls
    wB = fam.members @ w.nu
    sB = fam.members @ (sigma * space.mass)
    muB = fam.measures
    closing = muB ** (alpha - 1) * wB ** (1 / q) * sB ** (1 / pp)
    prod = (wB / muB) * (sB / muB) ** (q / pp)
    k = int(np.argmax(closing))
    IS = GrandNorm(w, p, None, theta)
    etas, epss = [], []
    for j in range(len(fam)):
        _, eta = iwaniec_sbordone_norm(fam.members[j].astype(float), w, p, theta, with_witness=True)
        etas.append(eta)
        epss.append(grand_pairing_inverse(eta, p, q, alpha))
    epss = np.array(epss)
    t = np.geomspace(1e-6, 1e-2, 41) if t_grid is None else np.asarray(t_grid, dtype=float)
    _, psi = phi_psi_63(t, p, q, theta, alpha)
    psi_ratio = psi / t ** (theta * (1 + alpha * q))
    rep = Report("necessity/fractional", _space_desc(space), {"values": "given"},
                 {"p": p, "s": s, "q": q, "r": r, "alpha": alpha, "theta": theta})
    rep.max_ratio = float(closing[k])
    rep.witness = fam.ball(k).to_json()
    rep.add("closing_product", closing[k], rep.witness)
    rep.lower_bounds = {
        "closing_product": float(closing[k]),
        "closing_min": float(closing.min()),
        "closing_q_vs_product": float(np.max(np.abs(closing**q - prod) / prod)),
        "a_1+q/p'": ap_characteristic(w, 1 + q / pp).value,
        "a_1+p/q'": ap_characteristic(w, 1 + p / qq).value,
        "eps_B_range": [float(epss.min()), float(epss.max())],
        "eps_B_admissible": bool(np.all(epss > 0) and np.all(epss <= q - 1)),
        "psi_ratio_range": [float(psi_ratio.min()), float(psi_ratio.max())],
    }
    if bound is not None:
        rep.slack = bound
    rep.passed = bool(math.isfinite(rep.max_ratio) and rep.max_ratio <= rep.slack)
    return rep


def equivalence_suite_63(a: float, n: int = 64, alpha: float = 0.25, p: float = 2.0, s: float = 2.0,
                         theta: float = 1.0, class_bound: float = 1e3, tol: float = 0.05) -> Report:
    """Chain the three legs for the weight x^a.

    (iii) => (i): grid-stable ratio of ||I_alpha(w^alpha f)|| in the (q, r, q theta/p)
    grand space over ||f|| in the (p, s, theta) one.  (i) => (ii): the exact
    pointwise constant C_alpha.  (ii) => (iii): the closing product.
    """
    q, r = p / (1 - alpha * p), s / (1 - alpha * s)
    ratios = []
    for size in (n, 2 * n):
        g, w = _grid_setup(size, a)
        src = GrandNorm(w, p, s, theta)
        tgt = GrandNorm(w, q, r, q * theta / p)
        T = lambda f, g=g, w=w: fractional_integral(w.values**alpha * f, g, alpha)
        ratios.append(check_boundedness(T, src, tgt, grid_family(g, w, p)))
    g, w = _grid_setup(n, a)
    pw = pointwise_fractional_constant(g, alpha)
    nec = necessity_fractional(g, w, p, s, q, r, alpha, theta)
    char = nec.lower_bounds["a_1+p/q'"]
    (r1, w1, _), (r2, w2, _) = ratios
    change = abs(r2 - r1) / r1
    rep = Report("equivalence/fractional", {"interval_grid": [n, 2 * n]},
                 {"power": a}, {"p": p, "s": s, "q": q, "r": r, "alpha": alpha, "theta": theta})
    rep.add("sufficiency_n", r1, w1)
    rep.add("sufficiency_2n", r2, w2)
    rep.add("C_alpha", pw["C_alpha"], pw["witness"])
    rep.add("closing_product", nec.max_ratio, nec.witness)
    rep.max_ratio = max(r1, r2)
    rep.witness = w2 if r2 >= r1 else w1
    rep.lower_bounds = dict(nec.lower_bounds)
    rep.lower_bounds.update({"relative_change": change, "C_alpha": pw["C_alpha"]})
    outside = char > class_bound
    if outside:
        rep.notes.append(f"weight outside the class: [w]_A_(1+p/q') = {char} exceeds {class_bound}")
    rep.lower_bounds["outside_class"] = outside
    rep.passed = bool(not outside and change <= tol and math.isfinite(pw["C_alpha"]))
    return rep


# ---------------------------------------------------------------------------
# scenario files


def _family_comovement(fn, family) -> tuple[list, dict]:
    vals = [fn(a) for a in family]
    return vals, comovement(vals)


def _scenario_necessity(kind: str, cfg: dict) -> Report:
    n = int(cfg.get("space", {}).get("interval_grid", 64))
    fam = cfg.get("weight_family", {}).get("power", [0.0, 0.3, 0.6, 0.9])
    ex = cfg.get("exponents", {})
    p, s, theta = ex.get("p", 2.0), ex.get("s", 2.0), ex.get("theta", 1.0)
    alpha = ex.get("alpha", 0.25)

    def one(a):
        g, w = _grid_setup(n, a)
        if kind == "maximal":
            return necessity_maximal(g, w, p, s, theta).lower_bounds["extracted"]
        if kind == "hilbert":
            return necessity_hilbert(g, w, p, theta).lower_bounds["extracted"]
        q, r = p / (1 - alpha * p), s / (1 - alpha * s)
        return necessity_fractional(g, w, p, s, q, r, alpha, theta).max_ratio

    vals, co = _family_comovement(one, fam)
    rep = Report(f"necessity/{kind}/comovement", {"interval_grid": n}, {"power": list(fam)},
                 dict(ex), seed=int(cfg.get("seed", 0)))
    for a, v in zip(fam, vals):
        rep.add(f"a={a}", v, {"power": a})
    rep.max_ratio = max(vals)
    rep.lower_bounds = co
    rep.passed = bool(co["strictly_increasing"] and co["spearman"] == 1.0)
    return rep


SCENARIOS = {
    "identity", "maximal", "hilbert", "commutator_cz", "commutator_frac", "commutator_frac_direct",
    "lemma-ball", "necessity-maximal", "necessity-hilbert", "necessity-fractional",
    "fractional-equivalence",
}

_SCENARIO_KEYS = {"theorem", "space", "weight_family", "exponents", "budget", "slack", "seed", "tolerance"}


def run_scenario(cfg: dict) -> list[Report]:
    """Run a scenario description {theorem, space, weight_family, exponents, budget, slack}."""
    unknown = set(cfg) - _SCENARIO_KEYS
    if unknown:
        raise LorextError(f"unknown scenario keys: {sorted(unknown)}")
    kind = cfg.get("theorem")
    if kind not in SCENARIOS:
        raise LorextError(f"unknown scenario {kind!r}; expected one of {sorted(SCENARIOS)}")
    ex = dict(cfg.get("exponents", {}))
    seed = int(cfg.get("seed", 0))
    n = int(cfg.get("space", {}).get("interval_grid", 64))
    powers = cfg.get("weight_family", {}).get("power", [0.0])
    if not isinstance(powers, list):
        powers = [powers]
    if kind.startswith("necessity-"):
        return [_scenario_necessity(kind.split("-", 1)[1], cfg)]
    out = []
    for a in powers:
        if kind == "lemma-ball":
            g, w = _grid_setup(n, a)
            rep = lemma_mn_check(g, w, ex.get("p", 2.0), ex.get("s", 2.0), ex.get("theta", 1.0), seed)
            rep.weight_family = {"power": a}
        elif kind == "fractional-equivalence":
            rep = equivalence_suite_63(a, n, ex.get("alpha", 0.25), ex.get("p", 2.0), ex.get("s", 2.0),
                                       ex.get("theta", 1.0), tol=cfg.get("tolerance", 0.05))
        else:
            rep = boundedness_scenario(kind, a, n, ex.get("p", 2.0), ex.get("s", 2.0), ex.get("theta", 1.0),
                                       ex.get("alpha", 0.5), int(ex.get("m", 1)), cfg.get("tolerance", 0.05),
                                       cfg.get("slack"), seed=seed)
        rep.seed = seed
        out.append(rep)
    return out
