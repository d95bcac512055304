"""Finite quasi-metric measure spaces, their balls and structural constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import AsymmetricDistance, LorextError, ZeroOffDiagonal

__all__ = [
    "Space",
    "Ball",
    "BallFamily",
    "StructuralConstants",
    "validate_quasi_metric",
    "enumerate_balls",
    "ball_family",
    "doubling_constant",
    "interval_grid",
    "structural_constants",
    "constants_from",
]

_LOG_MAX = math.log(np.finfo(float).max)


def validate_quasi_metric(dist) -> float:
    """Return the smallest kappa with d(x,y) <= kappa (d(x,z) + d(z,y)).

    Raises ZeroOffDiagonal / AsymmetricDistance on malformed matrices.
    """
    d = _check_distance_matrix(dist)
    n = d.shape[0]
    kappa = 1.0
    if n < 2:
        return kappa
    for z in range(n):
        denom = d[:, z][:, None] + d[z, :][None, :]
        # denom vanishes only for x = y = z, where d(x, y) = 0 as well
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(denom > 0, d / np.where(denom > 0, denom, 1.0), 0.0)
        kappa = max(kappa, float(ratio.max()))
    return kappa


def _check_distance_matrix(dist) -> np.ndarray:
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise LorextError(f"distance matrix must be square, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise LorextError("distance matrix has non-finite entries")
    if np.any(d < 0):
        raise LorextError("distance matrix has negative entries")
    if np.any(np.diag(d) != 0):
        raise LorextError("distance matrix must have a zero diagonal")
    if not np.array_equal(d, d.T):
        i, j = np.unravel_index(np.argmax(np.abs(d - d.T)), d.shape)
        raise AsymmetricDistance(f"d[{i},{j}]={d[i, j]!r} but d[{j},{i}]={d[j, i]!r}")
    off = ~np.eye(d.shape[0], dtype=bool)
    if np.any(d[off] == 0):
        i, j = np.argwhere((d == 0) & off)[0]
        raise ZeroOffDiagonal(f"distinct points {i} and {j} are at distance 0")
    return d


@dataclass(frozen=True, eq=False)
class Space:
    """A finite quasi-metric measure space.

    ``dist`` is the full symmetric distance matrix and ``mass`` holds the
    point masses mu({x}).  When ``kappa`` is omitted the minimal quasi-triangle
    constant is computed.  ``coords`` and ``grid_n`` are only set by
    :func:`interval_grid`.
    """

    dist: np.ndarray
    mass: np.ndarray
    kappa: Optional[float] = None
    points: Optional[tuple] = None
    coords: Optional[np.ndarray] = field(default=None, repr=False)
    grid_n: Optional[int] = None

    def __post_init__(self):
        trusted = self.grid_n is not None
        d = np.asarray(self.dist, dtype=float) if trusted else _check_distance_matrix(self.dist)
        m = np.asarray(self.mass, dtype=float).reshape(-1)
        if m.shape[0] != d.shape[0]:
            raise LorextError(f"{m.shape[0]} masses for {d.shape[0]} points")
        if not np.all(np.isfinite(m)) or np.any(m <= 0):
            raise LorextError("point masses must be finite and strictly positive")
        d.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "dist", d)
        object.__setattr__(self, "mass", m)
        if self.points is None:
            object.__setattr__(self, "points", tuple(range(d.shape[0])))
        elif len(self.points) != d.shape[0]:
            raise LorextError("points and distance matrix disagree in length")
        else:
            object.__setattr__(self, "points", tuple(self.points))
        if self.kappa is None:
            object.__setattr__(self, "kappa", validate_quasi_metric(d))
        else:
            kappa = float(self.kappa)
            if kappa < 1:
                raise LorextError(f"kappa must be >= 1, got {kappa}")
            if not trusted:
                minimal = validate_quasi_metric(d)
                if kappa < minimal * (1 - 1e-12):
                    raise LorextError(
                        f"kappa={kappa} violates the quasi-triangle inequality (minimal {minimal})"
                    )
            object.__setattr__(self, "kappa", kappa)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def total_mass(self) -> float:
        return math.fsum(self.mass)

    @property
    def is_interval_grid(self) -> bool:
        return self.grid_n is not None

    @cached_property
    def prefix(self) -> "_Prefix":
        return _Prefix(self.dist, self.mass)

    @cached_property
    def balls(self) -> "BallFamily":
        return ball_family(self)

    def to_json(self) -> dict:
        if self.is_interval_grid:
            return {"interval_grid": self.grid_n}
        return {
            "points": list(self.points),
            "dist": self.dist.reshape(-1).tolist(),
            "mass": self.mass.tolist(),
            "kappa": self.kappa,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Space":
        if "interval_grid" in obj:
            extra = set(obj) - {"interval_grid"}
            if extra:
                raise LorextError(f"unknown space keys: {sorted(extra)}")
            return interval_grid(int(obj["interval_grid"]))
        extra = set(obj) - {"points", "dist", "mass", "kappa"}
        if extra:
            raise LorextError(f"unknown space keys: {sorted(extra)}")
        mass = np.asarray(obj["mass"], dtype=float)
        n = mass.shape[0]
        dist = np.asarray(obj["dist"], dtype=float)
        if dist.ndim == 1:
            if dist.shape[0] != n * n:
                raise LorextError(f"row-major dist needs {n * n} entries, got {dist.shape[0]}")
            dist = dist.reshape(n, n)
        return cls(dist=dist, mass=mass, kappa=obj.get("kappa"), points=obj.get("points"))


class _Prefix:
    """Per-centre distance orderings.

    Every ball B(c, r) is a prefix of the points sorted by distance to ``c``
    that ends at a tie-group boundary, so ball quantities reduce to cumulative
    sums along the rows of ``order``.
    """

    def __init__(self, dist: np.ndarray, mass: np.ndarray):
        n = dist.shape[0]
        self.order = np.argsort(dist, axis=1, kind="stable")
        self.sorted_d = np.take_along_axis(dist, self.order, axis=1)
        ends = np.ones((n, n), dtype=bool)
        ends[:, :-1] = self.sorted_d[:, :-1] < self.sorted_d[:, 1:]
        self.ends = ends
        self.rank = np.empty_like(self.order)
        rows = np.arange(n)[:, None]
        self.rank[rows, self.order] = np.arange(n)[None, :]
        self.cum_mass = np.cumsum(mass[self.order], axis=1)

    def cumulate(self, values: np.ndarray) -> np.ndarray:
        """Cumulative sums of ``values`` (shape (n,) or (n, m)) along every centre's order."""
        return np.cumsum(values[self.order], axis=1)

    def containing_max(self, per_prefix: np.ndarray) -> np.ndarray:
        """For every point x, max of ``per_prefix`` over the balls containing x.

        ``per_prefix[c, k]`` is the value of the ball made of the first k+1
        points in centre c's order; entries that are not tie-group ends are
        ignored.
        """
        vals = np.where(_expand(self.ends, per_prefix), per_prefix, -np.inf)
        # suffix max: x at position k lies in every valid prefix ending at >= k
        suffix = np.maximum.accumulate(vals[:, ::-1], axis=1)[:, ::-1]
        n = self.order.shape[0]
        cols = self.rank.T  # cols[x, c] = position of x in centre c's order
        gathered = suffix[np.arange(n)[None, :], cols]
        return gathered.max(axis=1)


def _expand(mask: np.ndarray, like: np.ndarray) -> np.ndarray:
    return mask if like.ndim == 2 else mask[..., None]


@dataclass(frozen=True)
class Ball:
    center: int
    radius: float
    members: tuple
    measure: float

    def to_json(self) -> dict:
        return {
            "center": self.center,
            "radius": self.radius,
            "members": list(self.members),
            "measure": self.measure,
        }


@dataclass(frozen=True, eq=False)
class BallFamily:
    """Deduplicated balls as a membership matrix (one row per ball)."""

    members: np.ndarray
    centers: np.ndarray
    radii: np.ndarray
    measures: np.ndarray

    def __len__(self) -> int:
        return self.members.shape[0]

    def ball(self, k: int) -> Ball:
        return Ball(
            center=int(self.centers[k]),
            radius=float(self.radii[k]),
            members=tuple(int(i) for i in np.flatnonzero(self.members[k])),
            measure=float(self.measures[k]),
        )

    def averages(self, values: np.ndarray, mass: np.ndarray) -> np.ndarray:
        return (self.members @ (values * mass)) / self.measures


def _canonical_radii(space: Space) -> np.ndarray:
    """Smallest canonical radius realising each prefix ball, shape (n, n)."""
    pre = space.prefix
    levels = np.unique(space.dist)
    diam = float(levels[-1])
    beyond = 2.0 * diam if diam > 0 else 1.0
    idx = np.searchsorted(levels, pre.sorted_d, side="right")
    padded = np.append(levels, beyond)
    return padded[idx]


def ball_family(space: Space) -> BallFamily:
    pre = space.prefix
    n = space.n
    radii = _canonical_radii(space)
    seen: dict[bytes, int] = {}
    rows, centers, rads, meas = [], [], [], []
    for c in range(n):
        member = np.zeros(n, dtype=bool)
        for k in range(n):
            member[pre.order[c, k]] = True
            if not pre.ends[c, k]:
                continue
            key = np.packbits(member).tobytes()
            r = float(radii[c, k])
            hit = seen.get(key)
            if hit is None:
                seen[key] = len(rows)
                rows.append(member.copy())
                centers.append(c)
                rads.append(r)
                meas.append(float(pre.cum_mass[c, k]))
            elif r < rads[hit]:
                centers[hit], rads[hit] = c, r
    return BallFamily(
        members=np.array(rows, dtype=bool).reshape(len(rows), n),
        centers=np.array(centers, dtype=int),
        radii=np.array(rads),
        measures=np.array(meas),
    )


def enumerate_balls(space: Space) -> list[Ball]:
    """Every set-distinct ball B(x, r) = {y : d(x, y) < r} of ``space``."""
    fam = space.balls
    return [fam.ball(k) for k in range(len(fam))]


def doubling_constant(space: Space) -> float:
    """max over x and r > 0 of mu(B(x, 2r)) / mu(B(x, r))."""
    pre = space.prefix
    levels = np.unique(space.dist)
    levels = levels[levels > 0]
    if levels.size == 0:
        return 1.0
    radii = np.unique(np.concatenate([levels, levels / 2, np.nextafter(levels, np.inf)]))
    best = 1.0
    zero = np.zeros((1,))
    for c in range(space.n):
        cum = np.concatenate([zero, pre.cum_mass[c]])
        inner = cum[np.searchsorted(pre.sorted_d[c], radii, side="left")]
        outer = cum[np.searchsorted(pre.sorted_d[c], 2 * radii, side="left")]
        best = max(best, float(np.max(outer / inner)))
    return best


def interval_grid(n: int) -> Space:
    """Uniform midpoint grid on (0, 1): n points, each of mass 1/n."""
    if int(n) != n or n < 1:
        raise LorextError(f"interval_grid needs a positive integer, got {n!r}")
    n = int(n)
    k = np.arange(n)
    # integer differences keep equal distances bitwise equal
    dist = np.abs(k[:, None] - k[None, :]) / n
    coords = (2 * k + 1) / (2 * n)
    return Space(dist=dist, mass=np.full(n, 1.0 / n), kappa=1.0, coords=coords, grid_n=n)


@dataclass(frozen=True)
class StructuralConstants:
    kappa: float
    D_mu: float
    theta_bar: float
    tau: float
    c_bar: float
    mode: str = "formula"
    overflow: bool = False

    def to_json(self) -> dict:
        return {
            "kappa": self.kappa,
            "D_mu": self.D_mu,
            "theta_bar": self.theta_bar,
            "tau": self.tau,
            "c_bar": self.c_bar,
            "mode": self.mode,
            "overflow": self.overflow,
        }


def _exp_or_inf(log_value: float) -> tuple[float, bool]:
    if log_value > _LOG_MAX:
        return math.inf, True
    return math.exp(log_value), False


def constants_from(kappa: float, D_mu: float, mode: str = "formula") -> StructuralConstants:
    """tau = 6 (32 kappa^4 (4 kappa + 1))^D, theta = 4 kappa^2 + kappa and
    c_bar = 32 kappa^D (2 theta)^D (1 + tau); ``mode="interval"`` uses c_bar = 2."""
    if mode not in ("formula", "interval"):
        raise LorextError(f"unknown mode {mode!r}")
    if kappa < 1:
        raise LorextError(f"kappa must be >= 1, got {kappa}")
    if not D_mu >= 1:
        raise LorextError(f"doubling constant must be >= 1, got {D_mu}")
    theta = 4 * kappa**2 + kappa
    log_base = math.log(32 * kappa**4 * (4 * kappa + 1))
    _, over_tau = _exp_or_inf(math.log(6) + D_mu * log_base)
    tau = math.inf if over_tau else 6 * (32 * kappa**4 * (4 * kappa + 1)) ** D_mu
    if mode == "interval":
        return StructuralConstants(kappa, D_mu, theta, tau, 2.0, mode, over_tau)
    if over_tau:
        return StructuralConstants(kappa, D_mu, theta, tau, math.inf, mode, True)
    log_c = math.log(32) + D_mu * (math.log(kappa) + math.log(2 * theta)) + math.log1p(tau)
    c_bar, over_c = _exp_or_inf(log_c)
    if not over_c:
        # direct product where it cannot overflow; the log path only guards
        c_bar = 32 * kappa**D_mu * (2 * theta) ** D_mu * (1 + tau)
    return StructuralConstants(kappa, D_mu, theta, tau, c_bar, mode, over_c)


def structural_constants(space: Space, mode: str = "formula") -> StructuralConstants:
    if mode == "interval" and not space.is_interval_grid:
        raise LorextError("interval mode (c_bar = 2) is only available on interval grids")
    return constants_from(space.kappa, doubling_constant(space), mode)
