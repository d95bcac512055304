"""Rubio de Francia iteration and the explicit extrapolation constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, NupTooSmall, Q0OutOfRange, ScalingMismatch, LorextError
from .lorentz import conjugate, lorentz_norm_rearr
from .operators import Operator, maximal, operator_norm
from .rearrange import Weight, as_values
from .space import Space, structural_constants
from .weights import ap_characteristic, openness_eps0

__all__ = [
    "RateFunction",
    "ConstantEvaluation",
    "ExtrapolationConstants",
    "RubioResult",
    "rubio_iterate",
    "crude_maximal_bound",
    "buckley_bound",
    "gamma",
    "K_diag",
    "K_diag_operator",
    "K_offdiag",
    "kle_constant",
    "tilde_maximal_norm",
    "K1_lorentz",
    "K1_stability",
    "marcinkiewicz_maximal_bound",
    "dual_maximal_bound",
    "phi_psi",
    "phi_psi_63",
    "grand_pairing",
    "grand_pairing_inverse",
]


@dataclass
class RateFunction:
    """A nonnegative nondecreasing N, checked on a probe grid."""

    fn: Callable[[float], float] = field(default=lambda x: x)
    name: str = "identity"

    def __call__(self, x: float) -> float:
        return float(self.fn(x))

    def check_monotone(self, probe) -> bool:
        vals = [self(x) for x in sorted(probe)]
        return all(v >= 0 for v in vals) and all(b >= a for a, b in zip(vals, vals[1:]))


def _N(N) -> RateFunction:
    if N is None:
        return RateFunction()
    return N if isinstance(N, RateFunction) else RateFunction(N, getattr(N, "__name__", "N"))


@dataclass
class ConstantEvaluation:
    formula: str
    branch: str
    value: float
    inputs: dict
    alt_value: Optional[float] = None
    gamma: Optional[float] = None
    flags: tuple = ()

    def to_json(self) -> dict:
        return {
            "formula": self.formula,
            "branch": self.branch,
            "inputs": self.inputs,
            "value": self.value,
            "alt_value": self.alt_value,
            "gamma": self.gamma,
            "flags": list(self.flags),
        }


@dataclass
class ExtrapolationConstants:
    gamma: Optional[float] = None
    K_diag: Optional[ConstantEvaluation] = None
    K_offdiag: Optional[ConstantEvaluation] = None
    K1_lorentz: Optional[ConstantEvaluation] = None
    K_grand: Optional[float] = None

    @property
    def branch(self) -> dict:
        return {k: getattr(self, k).branch for k in ("K_diag", "K_offdiag", "K1_lorentz")
                if getattr(self, k) is not None}

    def to_json(self) -> dict:
        out = {"gamma": self.gamma, "K_grand": self.K_grand}
        for k in ("K_diag", "K_offdiag", "K1_lorentz"):
            v = getattr(self, k)
            out[k] = None if v is None else v.to_json()
        return out


def _powprod(*pairs) -> float:
    """Product of base**exponent pairs, evaluated in log space (inf on overflow)."""
    log = 0.0
    for base, e in pairs:
        if e == 0:
            continue
        if base <= 0:
            raise DomainError(f"nonpositive base {base} in a constant formula")
        log += e * math.log(base)
    if log > 709.7:
        return math.inf
    return math.exp(log)


# ---------------------------------------------------------------------------
# Rubio de Francia iteration


@dataclass
class RubioResult:
    Rh: np.ndarray
    n_up: float
    k_terms: int
    tail_norm: float  # bound for the norm of the discarded terms
    tail_pointwise: np.ndarray  # M^K h / (2 N)^(K-1)
    term_norms: np.ndarray

    def to_json(self) -> dict:
        return {"Rh": self.Rh.tolist(), "n_up": self.n_up, "k_terms": self.k_terms,
                "tail_norm": self.tail_norm, "tail_pointwise": self.tail_pointwise.tolist()}


def crude_maximal_bound(space: Space, norm: Callable) -> float:
    """||chi_X|| / min_x ||chi_{x}||, a valid bound for M in any lattice norm."""
    n = space.n
    floor = min(norm(np.eye(n)[i]) for i in range(n))
    return float(norm(np.ones(n)) / floor)


def buckley_bound(w: Weight, p: float, mode: str = "formula") -> float:
    """c_bar p' [w]_{A_p}^(1/(p-1)) for M on L^p_w."""
    c_bar = structural_constants(w.space, mode).c_bar
    return c_bar * conjugate(p) * ap_characteristic(w, p).value ** (1 / (p - 1))


def rubio_iterate(h, space: Space, norm: Callable, n_up: float, k_terms: int = 64) -> RubioResult:
    """Partial sum of sum_k M^k h / (2 n_up)^k over k < k_terms.

    ``norm`` is the norm of the space in which ``n_up`` bounds M; it must be
    a genuine norm for the tail bound 2^(1-K) ||h|| to hold.
    """
    a = as_values(h)
    if np.any(a < 0):
        raise LorextError("the iteration needs a nonnegative h")
    if k_terms < 1:
        raise LorextError("k_terms must be at least 1")
    if not n_up >= 1:
        raise NupTooSmall(f"n_up={n_up} is below 1, but ||M|| >= 1 always")
    scale = 2.0 * n_up
    term = a.copy()
    total = np.zeros_like(a)
    norms = []
    for k in range(k_terms):
        total += term / scale**k
        norms.append(norm(term))
        nxt = maximal(term, space)
        nn = norm(nxt)
        # a valid certificate bounds every consecutive ratio
        if nn > n_up * norms[-1] * (1 + 1e-12):
            raise NupTooSmall(f"||M^{k+1} h|| / ||M^{k} h|| = {nn / norms[-1]} exceeds n_up={n_up}")
        term = nxt
    tail_pw = term / scale ** (k_terms - 1)
    return RubioResult(total, n_up, k_terms, 2.0 ** (1 - k_terms) * norms[0], tail_pw, np.array(norms))


# ---------------------------------------------------------------------------
# constant formulas


def gamma(p0: float, q0: float) -> float:
    """1/q0 + 1/p0', with 1/p0' = 0 when p0 = 1."""
    if not (p0 >= 1 and q0 > 0):
        raise DomainError(f"gamma needs p0 >= 1 and q0 > 0, got p0={p0}, q0={q0}")
    return 1 / q0 + (1 - 1 / p0)


def K_diag(ap: float, p: float, p0: float, N=None, c_bar: float = 2.0) -> ConstantEvaluation:
    """Characteristic form of the diagonal extrapolation constant."""
    N = _N(N)
    pp = conjugate(p)
    inputs = {"ap": ap, "p": p, "p0": p0, "c_bar": c_bar, "N": N.name}
    if p == p0:
        return ConstantEvaluation("K_diag", "p=p0", N(ap), inputs)
    if p < p0:
        arg = _powprod((2 * c_bar * pp, p0 - p), (ap, (pp - 1) * (p0 - p)))
        return ConstantEvaluation("K_diag", "p<p0", N(arg), inputs)
    arg = _powprod((2 * c_bar * pp, (p0 - p) / (p - 1)), (ap, (2 * p0 + p * p0 + 1) / (p - 1) ** 2))
    return ConstantEvaluation("K_diag", "p>p0", N(arg), inputs)


def K_diag_operator(ap: float, m_norm: float, p: float, p0: float, N=None) -> ConstantEvaluation:
    """Operator-norm form: ``m_norm`` is ||M|| on L^p_w (p < p0) or on L^(p')_(w^(1-p')) (p > p0)."""
    N = _N(N)
    inputs = {"ap": ap, "m_norm": m_norm, "p": p, "p0": p0, "N": N.name}
    if p == p0:
        return ConstantEvaluation("K_diag_operator", "p=p0", N(ap), inputs)
    if p < p0:
        return ConstantEvaluation("K_diag_operator", "p<p0", N(ap * (2 * m_norm) ** (p0 - p)), inputs)
    arg = _powprod((ap, (p0 - 1) / (p - 1)), (2 * m_norm, (p - p0) / (p - 1)))
    return ConstantEvaluation("K_diag_operator", "p>p0", N(arg), inputs)


def K_offdiag(char: float, p: float, q: float, p0: float, q0: float, N=None,
              c_bar: float = 2.0) -> ConstantEvaluation:
    """Off-diagonal constant; ``char`` is [w]_{A_(1+q/p')}.

    On the q < q0 branch ``value`` uses the exponent 1 + gamma p'(q0 - q)/q
    and ``alt_value`` the opposite sign convention 1 + gamma (q - q0) p'/q.
    """
    if abs((1 / p - 1 / q) - (1 / p0 - 1 / q0)) > 1e-12:
        raise ScalingMismatch(f"1/p - 1/q = {1/p - 1/q} but 1/p0 - 1/q0 = {1/p0 - 1/q0}")
    N = _N(N)
    g = gamma(p0, q0)
    pp = conjugate(p)
    base = 2 * c_bar * (1 + q / pp)
    inputs = {"char": char, "p": p, "q": q, "p0": p0, "q0": q0, "c_bar": c_bar, "N": N.name}
    if q == q0:
        return ConstantEvaluation("K_offdiag", "q=q0", N(char), inputs, N(char), g)
    if q < q0:
        main = _powprod((base, g * (q - q0)), (char, 1 + g * pp * (q0 - q) / q))
        alt = _powprod((base, g * (q - q0)), (char, 1 + g * (q - q0) * pp / q))
        return ConstantEvaluation("K_offdiag", "q<q0", N(main), inputs, N(alt), g)
    v = N(_powprod((base, g * (q - q0) / (g * q - 1)), (char, 1.0)))
    return ConstantEvaluation("K_offdiag", "q>q0", v, inputs, v, g)


def kle_constant(m_norm: float, q0: float, p0: float, N=None, c_bar: float = 2.0,
                 printed: bool = False, p: Optional[float] = None) -> ConstantEvaluation:
    """Constant of the Banach-function-space diagonal extrapolation.

    By default the free exponent p is read as q0, which is how the constant
    arises from the diagonal formula at exponent q0 with [Rh]_{A_1} replaced
    by ||M||.  ``printed=True`` keeps the printed exponents and needs ``p``.
    """
    N = _N(N)
    qq = conjugate(q0)
    inputs = {"m_norm": m_norm, "q0": q0, "p0": p0, "c_bar": c_bar, "printed": printed, "p": p}
    if q0 == p0:
        return ConstantEvaluation("kle", "q0=p0", N(m_norm), inputs)
    if printed:
        if p is None:
            raise DomainError("the printed form needs p")
        if q0 < p0:
            arg = _powprod((2 * c_bar * qq, p0 - p), (m_norm, (qq - 1) * (p0 - qq)))
        else:
            arg = _powprod((2 * c_bar * qq, (p0 - q0) / (q0 * p - 1)),
                           (m_norm, (2 * p0 + q0 * p0 + 1) / (q0 - 1) ** 2))
    elif q0 < p0:
        arg = _powprod((2 * c_bar * qq, p0 - q0), (m_norm, (qq - 1) * (p0 - q0)))
    else:
        arg = _powprod((2 * c_bar * qq, (p0 - q0) / (q0 - 1)),
                       (m_norm, (2 * p0 + q0 * p0 + 1) / (q0 - 1) ** 2))
    return ConstantEvaluation("kle", "q0<p0" if q0 < p0 else "q0>p0", N(arg), inputs,
                              flags=("printed",) if printed else ())


def _tilde_norm(w: Weight, r: float, t: float) -> Callable:
    return lambda f: lorentz_norm_rearr(np.asarray(f) / w.values, w, r, t)


def tilde_maximal_norm(w: Weight, p: float, s: float, q0: float, budget: int = 64, seed: int = 0):
    """Bounds for ||M|| on the space normed by ||f/w||_{L^((p/q0)', (s/q0)')_w}."""
    if not (p / q0 > 1 and s / q0 > 1):
        raise Q0OutOfRange(f"need p/q0 > 1 and s/q0 > 1, got p={p}, s={s}, q0={q0}")
    r, t = conjugate(p / q0), conjugate(s / q0)
    nrm = _tilde_norm(w, r, t)
    sp = w.space
    M = Operator("maximal", lambda f: maximal(f, sp), 1.0)
    extra = [w.values * w.values ** (1 - conjugate(r))]
    return operator_norm(M, nrm, nrm, sp, budget=budget, seed=seed, extra=extra, refine_sweeps=0)


def K1_lorentz(w: Weight, p: float, s: float, q0: float, p0: float, N=None,
               c_bar: Optional[float] = None, m_tilde: Optional[float] = None,
               eps0: Optional[float] = None, budget: int = 64, seed: int = 0) -> ConstantEvaluation:
    """Diagonal Lorentz-space constant built on the tilde-space maximal norm.

    q0 must satisfy 1 < q0 < p/(p - eps0).  ``value`` is the printed formula,
    ``alt_value`` the reading with p replaced by q0.
    """
    if eps0 is None:
        eps0 = openness_eps0(w, p)
    if not (1 < q0 < p / (p - eps0)):
        raise Q0OutOfRange(f"q0={q0} must lie in (1, {p / (p - eps0)})")
    if c_bar is None:
        c_bar = structural_constants(w.space).c_bar
    est = None
    if m_tilde is None:
        est = tilde_maximal_norm(w, p, s, q0, budget, seed)
        m_tilde = est.lower
    printed = kle_constant(m_tilde, q0, p0, N, c_bar, printed=True, p=p)
    alt = kle_constant(m_tilde, q0, p0, N, c_bar)
    inputs = {"p": p, "s": s, "q0": q0, "p0": p0, "c_bar": c_bar, "m_tilde": m_tilde, "eps0": eps0}
    if est is not None:
        inputs["m_tilde_upper"] = est.upper
    return ConstantEvaluation("K1_lorentz", printed.branch, printed.value, inputs, alt.value)


def K1_stability(w: Weight, p: float, s: float, q0: float, p0: float, eps_values, **kw) -> dict:
    """K1 at the perturbed exponents p - eps; returns the values and their sup."""
    vals = []
    for e in eps_values:
        vals.append(K1_lorentz(w, p - e, s, q0, p0, **kw).value)
    return {"eps": list(map(float, eps_values)), "values": vals, "sup": max(vals)}


def _maximal_inputs(w: Weight, p: float, eps0):
    if eps0 is None:
        eps0 = openness_eps0(w, p)
    lo = ap_characteristic(w, p - eps0).value
    hi = ap_characteristic(w, p + eps0).value
    return eps0, lo, hi


def marcinkiewicz_maximal_bound(w: Weight, p: float, s: Optional[float] = None, C: float = 1.0,
                                eps0: Optional[float] = None) -> ConstantEvaluation:
    """Interpolated bound for M on L^(p,s)_w.

    ``value`` follows the statement, p[w]_{A_(p-eps0)} + (p-eps0)[w]_{A_(p+eps0)};
    ``alt_value`` the order obtained in the argument, with the two
    characteristics swapped.  The structural constant C is unspecified.
    """
    eps0, lo, hi = _maximal_inputs(w, p, eps0)
    pre = C * 2 ** (1 / p) / eps0
    value = pre * (p * lo + (p - eps0) * hi)
    alt = pre * (p * hi + (p - eps0) * lo)
    inputs = {"p": p, "s": s, "eps0": eps0, "ap_minus": lo, "ap_plus": hi, "C": C}
    return ConstantEvaluation("marcinkiewicz_maximal", "statement", value, inputs, alt,
                              flags=("C_unspecified",))


def dual_maximal_bound(w: Weight, p: float, s: Optional[float] = None, C: float = 1.0,
                       eps0: Optional[float] = None, mode: str = "formula") -> ConstantEvaluation:
    """Interpolated bound for f -> w^(-1) M f on the (p', s') slot.

    ``alt_value`` is the form with the Buckley constants C1, C2 of the dual
    weights in place of the characteristics.
    """
    eps0, lo, hi = _maximal_inputs(w, p, eps0)
    pp = conjugate(p)
    pre = C * 2 ** (1 / pp) / eps0
    value = pre * (pp * lo + conjugate(p - eps0) * hi)
    c_bar = structural_constants(w.space, mode).c_bar
    a_lo, a_hi = conjugate(p - eps0), conjugate(p + eps0)
    C1 = c_bar * (p - eps0) * ap_characteristic(w.power(1 - a_lo), a_lo).value ** (1 / (a_lo - 1))
    C2 = c_bar * (p + eps0) * ap_characteristic(w.power(1 - a_hi), a_hi).value ** (1 / (a_hi - 1))
    alt = pre * (pp * C1 + conjugate(p - eps0) * C2)
    inputs = {"p": p, "s": s, "eps0": eps0, "ap_minus": lo, "ap_plus": hi, "C": C, "C1": C1, "C2": C2}
    return ConstantEvaluation("dual_maximal", "statement", value, inputs, alt, flags=("C_unspecified",))


# ---------------------------------------------------------------------------
# exponent functions


def _bracket_power(x, p, q, A):
    x = np.asarray(x, dtype=float)
    den = 1 - A * (x - q)
    if np.any(den <= 0):
        raise DomainError("1 - A(x - q) must be positive")
    br = (x - q) / den + p
    if np.any(br < 0):
        raise DomainError("the bracket is negative here")
    return br ** (1 - (x - q) * A)


def phi_psi(x, p: float, q: float, theta: float, A: float):
    """(Phi(x), Psi(x)) with Phi(x) = [(x-q)/(1-A(x-q)) + p]^(1-(x-q)A) and Psi(x) = Phi(x^theta)."""
    x = np.asarray(x, dtype=float)
    return _bracket_power(x, p, q, A), _bracket_power(x**theta, p, q, A)


def phi_psi_63(t, p: float, q: float, theta: float, alpha: float):
    """Same pair with A replaced by alpha."""
    return phi_psi(t, p, q, theta, alpha)


def grand_pairing(eps, p: float, q: float, A: float):
    """eta solving 1/(p - eta) - 1/(q - eps) = A, i.e. eta = p - 1/(A + 1/(q - eps))."""
    e = np.asarray(eps, dtype=float)
    if np.any(e < 0) or np.any(e >= q):
        raise DomainError("eps must lie in [0, q)")
    den = A + 1 / (q - e)
    if np.any(den <= 0):
        raise DomainError("A + 1/(q - eps) must be positive")
    eta = p - 1 / den
    if np.any(eta < -1e-12) or np.any(eta > p - 1):
        raise DomainError("eta falls outside [0, p - 1]")
    return eta if eta.ndim else float(eta)


def grand_pairing_inverse(eta, p: float, q: float, A: float):
    """eps solving the same relation for given eta."""
    h = np.asarray(eta, dtype=float)
    if np.any(h < 0) or np.any(h > p - 1):
        raise DomainError("eta must lie in [0, p - 1]")
    den = 1 / (p - h) - A
    if np.any(den <= 0):
        raise DomainError("1/(p - eta) - A must be positive")
    eps = q - 1 / den
    if np.any(eps < -1e-12) or np.any(eps >= q):
        raise DomainError("eps falls outside [0, q)")
    return eps if eps.ndim else float(eps)
