"""Muckenhoupt-type characteristics, evaluated exactly over the deduplicated balls."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidExponent, LorextError
from .lorentz import conjugate, lorentz_norm_rearr
from .rearrange import Weight
from .space import Ball, Space, structural_constants

__all__ = [
    "Characteristic",
    "WeightCharacteristics",
    "power_weight",
    "ap_characteristic",
    "a1_characteristic",
    "ainf_characteristics",
    "apq_characteristic",
    "aps_constant",
    "openness_eps0",
    "characteristics",
]


@dataclass(frozen=True)
class Characteristic:
    kind: str
    value: float
    witness: Optional[Ball]
    p: Optional[float] = None
    q: Optional[float] = None

    def __float__(self) -> float:
        return self.value

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "p": self.p,
            "q": self.q,
            "value": self.value,
            "witness_ball": None if self.witness is None else self.witness.to_json(),
        }


def power_weight(space: Space, a: float) -> Weight:
    """x^a on an interval grid (x = cell midpoints)."""
    if space.coords is None:
        raise LorextError("power weights need a space with coordinates")
    return Weight(space, np.asarray(space.coords, dtype=float).reshape(-1) ** a)


def _ball_max(space: Space, per_ball: np.ndarray, kind: str, p=None, q=None) -> Characteristic:
    k = int(np.argmax(per_ball))
    return Characteristic(kind, float(per_ball[k]), space.balls.ball(k), p, q)


def _avg(space: Space, values) -> np.ndarray:
    return space.balls.averages(np.asarray(values, dtype=float), space.mass)


def ap_characteristic(w: Weight, p: float) -> Characteristic:
    """max over balls of (avg w)(avg w^(1-p'))^(p-1)."""
    if not (1 < p < math.inf):
        raise InvalidExponent(f"A_p needs 1 < p < inf, got {p}")
    sp = w.space
    pp = conjugate(p)
    prod = _avg(sp, w.values) * _avg(sp, w.values ** (1 - pp)) ** (p - 1)
    return _ball_max(sp, prod, "ap", p)


def a1_characteristic(w: Weight) -> Characteristic:
    """max over x of Mw(x)/w(x)."""
    from .operators import maximal

    ratio = maximal(w.values, w.space) / w.values
    k = int(np.argmax(ratio))
    # the witness is the ball realising Mw at the worst point
    sp = w.space
    avgs = _avg(sp, w.values)
    inside = sp.balls.members[:, k]
    b = int(np.flatnonzero(inside)[np.argmax(avgs[inside])])
    return Characteristic("a1", float(ratio[k]), sp.balls.ball(b))


def ainf_characteristics(w: Weight) -> tuple[Characteristic, Characteristic]:
    """Exponential characteristic and the Fujii-Wilson characteristic."""
    from .operators import maximal

    sp = w.space
    expo = _avg(sp, w.values) * np.exp(_avg(sp, -np.log(w.values)))
    fam = sp.balls
    fw = np.empty(len(fam))
    for k in range(len(fam)):
        chi = fam.members[k]
        local = np.where(chi, w.values, 0.0)
        Mloc = maximal(local, sp)
        fw[k] = np.sum(Mloc[chi] * sp.mass[chi]) / np.sum(local * sp.mass)
    return _ball_max(sp, expo, "ainf_exp"), _ball_max(sp, fw, "ainf_fw")


def apq_characteristic(rho: Weight, p: float, q: float) -> Characteristic:
    """max over balls of (avg rho^q)(avg rho^(-p'))^(q/p')."""
    if not (1 < p < math.inf and 1 < q < math.inf):
        raise InvalidExponent(f"A_(p,q) needs 1 < p, q < inf, got p={p}, q={q}")
    sp = rho.space
    pp = conjugate(p)
    prod = _avg(sp, rho.values**q) * _avg(sp, rho.values ** (-pp)) ** (q / pp)
    return _ball_max(sp, prod, "apq", p, q)


def aps_constant(w: Weight, p: float, s: float) -> Characteristic:
    """max over balls of ||chi_B||_{L^(p,s)_w} ||chi_B / w||_{L^(p',s')_w} / mu(B)."""
    if not (1 < p < math.inf):
        raise InvalidExponent(f"A(p,s) needs 1 < p < inf, got {p}")
    sp = w.space
    pp, ss = conjugate(p), conjugate(s)
    fam = sp.balls
    vals = np.empty(len(fam))
    for k in range(len(fam)):
        chi = fam.members[k].astype(float)
        a = lorentz_norm_rearr(chi, w, p, s)
        b = lorentz_norm_rearr(chi / w.values, w, pp, ss)
        vals[k] = a * b / fam.measures[k]
    return _ball_max(sp, vals, "aps", p, s)


def openness_eps0(w: Weight, p: float, mode: str = "formula", ap: Optional[float] = None) -> float:
    """(p-1)/(1 + tau [w]_{A_p}), the radius keeping w inside A_(p-eps0)."""
    tau = structural_constants(w.space, "formula").tau
    if ap is None:
        ap = ap_characteristic(w, p).value
    eps0 = (p - 1) / (1 + tau * ap)
    if not (0 < eps0 < p - 1):
        raise LorextError(f"openness radius {eps0} outside (0, {p - 1})")
    return eps0


@dataclass
class WeightCharacteristics:
    ap: Characteristic
    a1: Characteristic
    ainf_exp: Characteristic
    ainf_fw: Characteristic
    apq: Optional[Characteristic] = None

    def to_json(self) -> dict:
        out = {k: getattr(self, k).to_json() for k in ("ap", "a1", "ainf_exp", "ainf_fw")}
        out["apq"] = None if self.apq is None else self.apq.to_json()
        return out


def characteristics(w: Weight, p: float, q: Optional[float] = None) -> WeightCharacteristics:
    e, fw = ainf_characteristics(w)
    apq = None if q is None else apq_characteristic(w, p, q)
    return WeightCharacteristics(ap_characteristic(w, p), a1_characteristic(w), e, fw, apq)
