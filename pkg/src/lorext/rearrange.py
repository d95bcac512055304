"""Weighted distribution functions and decreasing rearrangements.

Everything here is exact: a function on a finite space has a rearrangement
that is a step function with at most n levels, so integrals against it are
finite sums over its breakpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import LorextError
from .space import Space

__all__ = [
    "Sample",
    "Weight",
    "StepFunction",
    "as_values",
    "weighted_measure",
    "distribution",
    "rearrangement",
    "rearrange_values",
    "double_star",
]


@dataclass(frozen=True, eq=False)
class Sample:
    """A real-valued function given pointwise on a Space."""

    space: Space
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.shape[0] != self.space.n:
            raise LorextError(f"sample has {v.shape[0]} values for {self.space.n} points")
        if not np.all(np.isfinite(v)):
            raise LorextError("sample values must be finite")
        object.__setattr__(self, "values", v)

    def to_json(self) -> list:
        return self.values.tolist()


@dataclass(frozen=True, eq=False)
class Weight:
    """A strictly positive weight; ``nu`` holds the atoms w(x) mu({x}) of w dmu."""

    space: Space
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.shape[0] != self.space.n:
            raise LorextError(f"weight has {v.shape[0]} values for {self.space.n} points")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise LorextError("weight values must be finite and strictly positive")
        object.__setattr__(self, "values", v)

    @classmethod
    def ones(cls, space: Space) -> "Weight":
        return cls(space, np.ones(space.n))

    @property
    def nu(self) -> np.ndarray:
        return self.values * self.space.mass

    @property
    def total(self) -> float:
        return math.fsum(self.nu)

    def power(self, a: float) -> "Weight":
        return Weight(self.space, self.values**a)

    def to_json(self) -> list:
        return self.values.tolist()


def as_values(f) -> np.ndarray:
    if isinstance(f, (Sample, Weight)):
        return f.values
    return np.asarray(f, dtype=float).reshape(-1)


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Nonincreasing right-continuous step function on (0, inf).

    Takes the value ``levels[j]`` on ``[edges[j], edges[j + 1])`` and 0 from
    ``edges[-1]`` on; ``T`` is the end of the underlying measure space.
    Levels are strictly decreasing and positive.
    """

    edges: np.ndarray
    levels: np.ndarray
    T: float

    @property
    def breakpoints(self) -> np.ndarray:
        return self.edges[1:]

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        j = np.searchsorted(self.edges, t, side="right")
        padded = np.concatenate([[0.0], self.levels, [0.0]])
        return padded[j]

    def cumulative(self, t):
        """The raw integral of the step function over (0, t)."""
        t = np.asarray(t, dtype=float)
        F = np.concatenate([[0.0], np.cumsum(self.levels * self.widths)])
        j = np.clip(np.searchsorted(self.edges, t, side="right") - 1, 0, len(self.levels))
        lev = np.concatenate([self.levels, [0.0]])
        return F[j] + lev[j] * (np.minimum(t, self.edges[-1]) - self.edges[j])

    def average(self, t):
        """f**(t) = (1/t) times the integral of f* over (0, t)."""
        t = np.asarray(t, dtype=float)
        return self.cumulative(t) / t

    def integral(self) -> float:
        return float(np.sum(self.levels * self.widths))

    def dot(self, other: "StepFunction") -> float:
        """Integral over (0, inf) of the product of two step functions."""
        cuts = np.union1d(self.edges, other.edges)
        mids = 0.5 * (cuts[:-1] + cuts[1:])
        return float(np.sum(self(mids) * other(mids) * np.diff(cuts)))

    def to_json(self) -> dict:
        return {"breakpoints": self.breakpoints.tolist(), "levels": self.levels.tolist(), "T": self.T}


def weighted_measure(E, w: Weight) -> float:
    """wE: the integral of w over E (indices, a boolean mask, or point ids)."""
    nu = w.nu
    if isinstance(E, np.ndarray) and E.dtype == bool:
        return math.fsum(nu[E])
    idx = list(E)
    if not idx:
        return 0.0
    return math.fsum(nu[np.asarray(idx, dtype=int)])


def rearrange_values(values, nu) -> tuple[np.ndarray, np.ndarray, float]:
    """Edges and levels of the decreasing rearrangement of |values| under atoms nu.

    Equal values are merged into one level; their widths are summed with
    fsum so the result does not depend on how ties are ordered.
    """
    a = np.abs(np.asarray(values, dtype=float))
    nu = np.asarray(nu, dtype=float)
    total = math.fsum(nu)
    keep = a > 0
    a, nu_k = a[keep], nu[keep]
    if a.size == 0:
        return np.zeros(1), np.zeros(0), total
    order = np.argsort(-a, kind="stable")
    a, nu_k = a[order], nu_k[order]
    starts = np.flatnonzero(np.concatenate([[True], a[1:] != a[:-1]]))
    levels = a[starts]
    if starts.size == a.size:
        widths = nu_k
    else:
        bounds = np.append(starts, a.size)
        widths = np.array([math.fsum(nu_k[i:j]) for i, j in zip(bounds[:-1], bounds[1:])])
    edges = np.concatenate([[0.0], np.cumsum(widths)])
    return edges, levels, total


def rearrangement(f, w: Weight) -> StepFunction:
    """The weighted decreasing rearrangement f*_w as a step function."""
    edges, levels, total = rearrange_values(as_values(f), w.nu)
    return StepFunction(edges, levels, total)


def distribution(f, w: Weight, tau):
    """w{x : |f(x)| > tau}, vectorised over tau > 0."""
    a = np.abs(as_values(f))
    nu = w.nu
    tau = np.asarray(tau, dtype=float)
    out = np.array([math.fsum(nu[a > t]) for t in tau.reshape(-1)])
    return out.reshape(tau.shape) if tau.ndim else float(out[0])


def double_star(f, w: Weight, t):
    """Running average (1/t) times the integral of f*_w over (0, t)."""
    return rearrangement(f, w).average(t)
