"""Command-line front end.

Exit status: 0 on success, 1 when a verification scenario fails, 2 on bad
input.  Text output prints the headline scalar; json and csv are
deterministic for a fixed seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import extrapolation as ex
from . import lorentz as lz
from . import operators as ops
from . import verify as vf
from . import weights as wt
from .errors import LorextError
from .rearrange import Weight, rearrangement
from .space import Space, doubling_constant, interval_grid, structural_constants

NORM_KINDS = ["lorentz", "lorentz_dist", "banach", "lebesgue", "iwaniec_sbordone", "grand_lorentz",
              "double_grand", "lambda_grand", "kothe_dual"]
WEIGHT_KINDS = ["ap", "a1", "ainf_exp", "ainf_fw", "apq", "aps", "eps0", "doubling", "structural"]
OPERATORS = ["identity", "maximal", "maximal^m", "frac_maximal", "frac_integral", "hilbert",
             "commutator_cz", "commutator_frac"]
FORMULAS = ["gamma", "K_diag", "K_offdiag", "kle", "K1_lorentz", "marcinkiewicz", "dual_maximal",
            "phi_psi", "grand_pairing"]


class InputError(LorextError):
    pass


def _load(text: str | None):
    """Inline JSON, or a path to a JSON file."""
    if text is None:
        return None
    path = Path(text)
    if not text.lstrip().startswith(("{", "[")) and path.exists():
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"cannot parse JSON input: {e}") from None


def _space(args) -> Space:
    obj = _load(args.space)
    if obj is None:
        return interval_grid(1)
    if not isinstance(obj, dict):
        raise InputError("--space must be a JSON object")
    return Space.from_json(obj)


def _vector(text, space: Space, name: str):
    obj = _load(text)
    if obj is None:
        return None
    if isinstance(obj, dict):
        if set(obj) != {"power"}:
            raise InputError(f"--{name} object form accepts only the key 'power'")
        if space.coords is None:
            raise InputError("power profiles need an interval grid")
        return np.asarray(space.coords, dtype=float) ** float(obj["power"])
    v = np.asarray(obj, dtype=float).reshape(-1)
    if v.size != space.n:
        raise InputError(f"--{name} has {v.size} values for {space.n} points")
    return v


def _weight(args, space: Space) -> Weight:
    v = _vector(args.weight, space, "weight")
    return Weight.ones(space) if v is None else Weight(space, v)


def _sample(args, space: Space) -> np.ndarray:
    v = _vector(args.sample, space, "sample")
    return np.ones(space.n) if v is None else v


def _eps_grid(args):
    if args.eps_grid is None:
        return None
    obj = _load(args.eps_grid)
    return np.asarray(obj, dtype=float)


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise InputError(f"--{n.replace('_', '-')} is required here")


# ---------------------------------------------------------------------------
# subcommands; each returns (scalar or None, record dict, csv rows, exit status)


def cmd_norm(args):
    sp = _space(args)
    w, f = _weight(args, sp), _sample(args, sp)
    p = 2.0 if args.p is None else args.p
    s = p if args.s is None else args.s
    theta = 1.0 if args.theta is None else args.theta
    grid = _eps_grid(args)
    witness = None
    k = args.kind
    if k == "lorentz":
        value = lz.lorentz_norm_rearr(f, w, p, s)
    elif k == "lorentz_dist":
        value = lz.lorentz_norm_dist(f, w, p, s)
    elif k == "banach":
        value = lz.banach_norm(f, w, p, s)
    elif k == "lebesgue":
        value = lz.lebesgue_norm(f, w, p)
    elif k == "iwaniec_sbordone":
        value, witness = lz.iwaniec_sbordone_norm(f, w, p, theta, grid, with_witness=True)
    elif k == "grand_lorentz":
        value, witness = lz.grand_lorentz_norm(f, w, lz.LorentzParams(p, s, theta, grid), with_witness=True)
    elif k == "double_grand":
        value, witness = lz.double_grand_norm(f, w, p, s, theta, grid, with_witness=True)
    elif k == "lambda_grand":
        value, witness = lz.lambda_grand_norm(f, w.values, p, theta, grid, with_witness=True)
    else:
        res = lz.kothe_dual_norm(f, w, p, s, seed=args.seed)
        value, witness = res.value, {"constant": res.constant}
    rec = {"norm_kind": k, "params": {"p": p, "s": s, "theta": theta}, "value": value, "witness_eps": witness}
    return value, rec, [["norm_kind", "value"], [k, value]], 0


def cmd_rearrange(args):
    sp = _space(args)
    st = rearrangement(_sample(args, sp), _weight(args, sp))
    rec = st.to_json()
    rows = [["breakpoint", "level"]] + [[b, l] for b, l in zip(rec["breakpoints"], rec["levels"])]
    return None, rec, rows, 0


def cmd_weight_const(args):
    sp = _space(args)
    w = _weight(args, sp)
    k = args.kind
    p = args.p
    if k == "ap":
        _need(args, "p")
        c = wt.ap_characteristic(w, p)
    elif k == "a1":
        c = wt.a1_characteristic(w)
    elif k in ("ainf_exp", "ainf_fw"):
        e, fw = wt.ainf_characteristics(w)
        c = e if k == "ainf_exp" else fw
    elif k == "apq":
        _need(args, "p", "q")
        c = wt.apq_characteristic(w, p, args.q)
    elif k == "aps":
        _need(args, "p")
        c = wt.aps_constant(w, p, p if args.s is None else args.s)
    elif k == "eps0":
        _need(args, "p")
        v = wt.openness_eps0(w, p)
        return v, {"kind": k, "p": p, "value": v}, [["kind", "value"], [k, v]], 0
    elif k == "doubling":
        v = doubling_constant(sp)
        return v, {"kind": k, "value": v}, [["kind", "value"], [k, v]], 0
    else:
        c = structural_constants(sp, args.mode)
        rec = c.to_json()
        return c.c_bar, rec, [["field", "value"]] + [[a, b] for a, b in sorted(rec.items())], 0
    rec = c.to_json()
    return c.value, rec, [["kind", "value"], [k, c.value]], 0


def cmd_operator(args):
    sp = _space(args)
    f = _sample(args, sp)
    b = _vector(args.symbol, sp, "symbol")
    alpha = 0.5 if args.alpha is None else args.alpha
    m = 1 if args.m is None else args.m
    T = ops.named_operator(args.name, sp, alpha=alpha, m=m, b=b)
    out = T(f)
    rec = {"operator": args.name, "values": out.tolist()}
    if args.estimate:
        w = _weight(args, sp)
        p = 2.0 if args.p is None else args.p
        s = p if args.s is None else args.s
        nrm = lambda g: lz.lorentz_norm_rearr(g, w, p, s)
        est = ops.operator_norm(T, nrm, nrm, sp, budget=args.budget, seed=args.seed, same_norm=True)
        rec["norm_estimate"] = est.to_json()
    rows = [["index", "value"]] + [[i, v] for i, v in enumerate(out.tolist())]
    scalar = rec["norm_estimate"]["lower"] if args.estimate else None
    return scalar, rec, rows, 0


def cmd_extrapolate(args):
    fm = args.formula
    c_bar = 2.0 if args.c_bar is None else args.c_bar
    if fm == "gamma":
        _need(args, "p0", "q0")
        v = ex.gamma(args.p0, args.q0)
        return v, {"formula": fm, "value": v}, [["formula", "value"], [fm, v]], 0
    if fm == "K_diag":
        _need(args, "char", "p", "p0")
        res = ex.K_diag(args.char, args.p, args.p0, c_bar=c_bar)
    elif fm == "K_offdiag":
        _need(args, "char", "p", "q", "p0", "q0")
        res = ex.K_offdiag(args.char, args.p, args.q, args.p0, args.q0, c_bar=c_bar)
    elif fm == "kle":
        _need(args, "char", "q0", "p0")
        res = ex.kle_constant(args.char, args.q0, args.p0, c_bar=c_bar, printed=args.printed, p=args.p)
    elif fm in ("K1_lorentz", "marcinkiewicz", "dual_maximal"):
        sp = _space(args)
        w = _weight(args, sp)
        _need(args, "p")
        s = args.p if args.s is None else args.s
        if fm == "K1_lorentz":
            _need(args, "q0", "p0")
            res = ex.K1_lorentz(w, args.p, s, args.q0, args.p0, c_bar=args.c_bar, seed=args.seed)
        elif fm == "marcinkiewicz":
            res = ex.marcinkiewicz_maximal_bound(w, args.p, s)
        else:
            res = ex.dual_maximal_bound(w, args.p, s, mode=args.mode)
    elif fm == "phi_psi":
        _need(args, "x", "p", "q")
        A = 1 / args.p - 1 / args.q
        theta = 1.0 if args.theta is None else args.theta
        phi, psi = ex.phi_psi(args.x, args.p, args.q, theta, A)
        rec = {"formula": fm, "inputs": {"x": args.x, "p": args.p, "q": args.q, "theta": theta, "A": A},
               "value": float(phi), "psi": float(psi)}
        return float(phi), rec, [["phi", "psi"], [float(phi), float(psi)]], 0
    else:
        _need(args, "x", "p", "q")
        A = 1 / args.p - 1 / args.q
        v = ex.grand_pairing(args.x, args.p, args.q, A)
        rec = {"formula": fm, "inputs": {"eps": args.x, "p": args.p, "q": args.q, "A": A}, "value": v}
        return v, rec, [["formula", "value"], [fm, v]], 0
    rec = res.to_json()
    return res.value, rec, [["formula", "branch", "value", "alt_value"],
                            [res.formula, res.branch, res.value, res.alt_value]], 0


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("LOREXT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"LOREXT_THREADS={env!r} is not an integer") from None
    return os.cpu_count() or 1


def cmd_verify(args):
    cfg = _load(args.scenario)
    if cfg is None:
        raise InputError("--scenario is required")
    cfgs = cfg if isinstance(cfg, list) else [cfg]
    for c in cfgs:
        if not isinstance(c, dict):
            raise InputError("a scenario must be a JSON object")
        c.setdefault("seed", args.seed)
    with ThreadPoolExecutor(max_workers=_threads(args)) as pool:
        # map keeps input order, so output does not depend on the thread count
        nested = list(pool.map(vf.run_scenario, cfgs))
    reports = [r for group in nested for r in group]
    ok = all(r.passed for r in reports)
    rec = {"reports": [r.to_dict() for r in reports], "passed": ok}
    rows = [["scenario", "label", "value", "witness"]]
    for r in reports:
        rows.extend(list(csv.reader(io.StringIO(r.to_csv())))[1:])
    return None, rec, rows, 0 if ok else 1


def cmd_sweep(args):
    """Power-weight sweep x^a on interval_grid(n): characteristics and bounds per a."""
    n = int(args.n)
    p = 2.0 if args.p is None else args.p
    values = _load(args.values) if args.values else [0.0, 0.2, 0.4, 0.6, 0.8]
    g = interval_grid(n)
    rows = [["a", "ap", "a1", "ainf_exp", "eps0", "buckley_interval", "marcinkiewicz"]]
    if args.with_fw:
        rows[0].append("ainf_fw")
    recs = []
    for a in values:
        w = wt.power_weight(g, float(a))
        ap = wt.ap_characteristic(w, p).value
        a1 = wt.a1_characteristic(w).value
        expo = _ainf_exp_only(w)
        eps0 = wt.openness_eps0(w, p, ap=ap)
        buck = 2.0 * lz.conjugate(p) * ap ** (1 / (p - 1))
        marc = ex.marcinkiewicz_maximal_bound(w, p, eps0=eps0).value
        row = [float(a), ap, a1, expo, eps0, buck, marc]
        if args.with_fw:
            row.append(wt.ainf_characteristics(w)[1].value)
        rows.append(row)
        recs.append(dict(zip(rows[0], row)))
    rec = {"sweep": "power_weight", "n": n, "p": p, "rows": recs}
    return None, rec, rows, 0


def _ainf_exp_only(w: Weight) -> float:
    sp = w.space
    expo = sp.balls.averages(w.values, sp.mass) * np.exp(sp.balls.averages(-np.log(w.values), sp.mass))
    return float(expo.max())


# ---------------------------------------------------------------------------


def _fmt_value(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return v


def _emit(args, scalar, rec, rows) -> str:
    if args.format == "json":
        return json.dumps(vf._clean(rec), sort_keys=True, indent=2) + "\n"
    if args.format == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        for r in rows:
            wr.writerow([_fmt_value(x) for x in r])
        return buf.getvalue()
    if scalar is not None:
        return repr(float(scalar)) + "\n"
    return json.dumps(vf._clean(rec), sort_keys=True, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", help="Space as inline JSON or a path; default {\"interval_grid\": 1}")
    common.add_argument("--weight", help="weight values (JSON array) or {\"power\": a}")
    common.add_argument("--sample", help="function values (JSON array) or {\"power\": a}")
    for name in ("p", "s", "q", "r", "theta", "alpha"):
        common.add_argument(f"--{name}", type=float)
    common.add_argument("--m", type=int)
    common.add_argument("--eps-grid", help="epsilon grid as a JSON array")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--format", choices=["text", "json", "csv"], default="text")
    common.add_argument("--mode", choices=["formula", "interval"], default="formula",
                        help="structural constant mode")

    ap = argparse.ArgumentParser(prog="lorext", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", parents=[common], help="evaluate a norm")
    p.add_argument("--kind", choices=NORM_KINDS, default="lorentz")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("rearrange", parents=[common], help="weighted decreasing rearrangement")
    p.set_defaults(func=cmd_rearrange)

    p = sub.add_parser("weight-const", parents=[common], help="weight characteristics")
    p.add_argument("--kind", choices=WEIGHT_KINDS, default="ap")
    p.set_defaults(func=cmd_weight_const)

    p = sub.add_parser("operator", parents=[common], help="apply an operator")
    p.add_argument("--name", choices=OPERATORS, default="maximal")
    p.add_argument("--symbol", help="the function b of the commutators")
    p.add_argument("--estimate", action="store_true", help="also estimate the L^(p,s)_w operator norm")
    p.add_argument("--budget", type=int, default=128)
    p.set_defaults(func=cmd_operator)

    p = sub.add_parser("extrapolate-const", parents=[common], help="evaluate a constant formula")
    p.add_argument("--formula", choices=FORMULAS, default="gamma")
    p.add_argument("--char", type=float, help="weight characteristic (or ||M|| for kle)")
    p.add_argument("--p0", type=float)
    p.add_argument("--q0", type=float)
    p.add_argument("--c-bar", type=float)
    p.add_argument("--x", type=float, help="argument of phi_psi / eps of grand_pairing")
    p.add_argument("--printed", action="store_true")
    p.set_defaults(func=cmd_extrapolate)

    p = sub.add_parser("verify", parents=[common], help="run verification scenarios")
    p.add_argument("--scenario", help="scenario JSON (inline or path); a list runs several")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="power-weight sweep, plot-ready")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--values", help="JSON array of exponents a")
    p.add_argument("--with-fw", action="store_true", help="include the Fujii-Wilson pass")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        scalar, rec, rows, status = args.func(args)
        text = _emit(args, scalar, rec, rows)
    except (LorextError, ValueError, OSError) as e:
        print(f"lorext: error: {e}", file=sys.stderr)
        return 2
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
