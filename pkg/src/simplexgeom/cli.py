"""Command-line front end: ``simplexgeom <command> [flags]``.

Commands: eval, pullback, invariance, conditions, reconstruct, factorize,
campbell, sweep, suite. Each reads one JSON document from ``--config FILE``,
``--json TEXT`` or standard input (``suite`` reads nothing unless asked),
validates it against :mod:`simplexgeom.schemas` and writes one JSON document
(CSV for ``sweep``) to ``--out`` or standard output. JSON output uses sorted
keys and shortest round-trip reals, so identical inputs give identical bytes.

Exit codes: 0 success (for checks: every outcome as expected), 1 a check
failed or a geometric precondition was violated (dimension mismatch, failed
prerequisites), 2 malformed input.

Tensor spec: ``{"kind": "fisher" | "d" | "s" | "lm", "lambda": x, "mu": y}``;
``d`` reads ``lambda`` (default 1), ``s`` reads ``mu`` (default 1).

Cone spec: ``{"lambda_fn": EXPR, "mu_fn": EXPR}`` where EXPR follows this
grammar (whitespace between tokens is ignored)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | "t" | "(" expr ")"
    NUMBER := DIGITS ("." DIGITS?)? (("e" | "E") ("+" | "-")? DIGITS)?
            | "." DIGITS (("e" | "E") ("+" | "-")? DIGITS)?

``^`` is right-associative and binds tighter than unary minus: ``-t^2`` is
``-(t^2)`` and ``2^3^2`` is ``512``.

In ``--mode rational`` every number in the input is read as an exact
fraction (JSON reals by their decimal value, strings as ``"p/q"``) and
``eval`` prints an exact fraction.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import time
from fractions import Fraction

import numpy as np

from . import verify as V
from ._numeric import to_fraction
from .embeddings import (
    MarkovPatch,
    markov_embedding,
    partition_from_dict,
    patch_from_dict,
    patched_embedding,
    random_partition,
    random_patch,
    scalar_patched,
)
from .errors import GeometryError, PrereqFailed
from .expr import ExprError, parse
from .schemas import COMMANDS, InputError, validate
from .simplex import make_point, make_tangent
from .tensors import ConeMetric, fisher, pullback, tensor_lm

RUN_DEFAULTS = {"seed": 0, "tol": 1e-9, "n_max": 6, "trials": 1000, "mode": "float"}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- I/O helpers

def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, V.CheckReport):
        return v.to_dict()
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if math.isfinite(f) else str(f)
    if isinstance(v, (np.integer, np.bool_)):
        return v.item()
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    return V._plain(v)


def dumps(doc) -> str:
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"


def _read_input(args, command: str):
    if args.json is not None:
        text, where = args.json, "--json"
    elif args.config is not None:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as e:
            raise UsageError(f"cannot read {args.config}: {e}") from e
        where = args.config
    elif command == "suite" or sys.stdin is None or sys.stdin.isatty():
        return {}, {}
    else:
        text, where = sys.stdin.read(), "<stdin>"
        if not text.strip() and command in ("suite", "invariance", "conditions"):
            return {}, {}
    try:
        plain = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"{where}: line {e.lineno} column {e.colno}: {e.msg}") from e
    try:
        validate(plain, COMMANDS[command])
    except InputError as e:
        raise UsageError(f"{where}: {e}") from e
    return plain, json.loads(text, parse_float=Fraction)


def _run_config(args, doc) -> dict:
    cfg = dict(RUN_DEFAULTS)
    for key in RUN_DEFAULTS:
        if key in doc:
            cfg[key] = doc[key]
        flag = getattr(args, key)
        if flag is not None:
            cfg[key] = flag
    cfg["tol"] = float(cfg["tol"])
    return cfg


def _num(v, exact: bool):
    if exact:
        return to_fraction(v)
    if isinstance(v, str):
        return float(Fraction(v))
    return float(v)


def _vec(vals, exact: bool):
    return [_num(v, exact) for v in vals]


def tensor_from_spec(spec: dict, n: int, exact: bool = False):
    kind = spec["kind"]
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    lam = _num(spec["lambda"], exact) if "lambda" in spec else None
    mu = _num(spec["mu"], exact) if "mu" in spec else None
    if kind == "fisher":
        return fisher(n)
    if kind == "d":
        return tensor_lm(n, one if lam is None else lam, zero)
    if kind == "s":
        return tensor_lm(n, zero, one if mu is None else mu)
    return tensor_lm(n, zero if lam is None else lam, zero if mu is None else mu)


def family_from_spec(spec: dict, max_n: int, exact: bool = False) -> V.FamilyOracle:
    name = json.dumps(spec, sort_keys=True)
    return V.FamilyOracle(max_n, lambda n: tensor_from_spec(spec, n, exact), name)


def cone_from_spec(spec: dict) -> ConeMetric:
    try:
        lf, mf = parse(spec["lambda_fn"]), parse(spec["mu_fn"])
    except ExprError as e:
        raise UsageError(f"cone spec: {e}") from e
    return ConeMetric(lambda t: float(lf(t)), lambda t: float(mf(t)), dict(spec))


def _point_and_tangents(doc, exact):
    w = _vec(doc["point"], exact)
    n = len(w) - 1
    p = make_point(n, w)
    X = make_tangent(len(doc["X"]) - 1, _vec(doc["X"], exact))
    Y = make_tangent(len(doc["Y"]) - 1, _vec(doc["Y"], exact))
    return p, X, Y


def _format_value(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return format(float(v), ".17g")


# ---------------------------------------------------------------- commands

def cmd_eval(doc, cfg):
    exact = cfg["mode"] == "rational"
    p, X, Y = _point_and_tangents(doc, exact)
    T = tensor_from_spec(doc["tensor"], p.n, exact)
    return 0, _format_value(T.eval(p, X, Y)) + "\n"


def _embedding_from_doc(d: dict, exact: bool):
    if "partition" in d:
        return markov_embedding(partition_from_dict(d["partition"], exact))
    if "patch" in d:
        return patched_embedding(patch_from_dict(d["patch"], exact))
    s = d["scalar"]
    sigma = tuple(s["sigma"]) if "sigma" in s else None
    return scalar_patched(int(s["n"]), _num(s["alpha"], exact), sigma)


def cmd_pullback(doc, cfg):
    exact = cfg["mode"] == "rational"
    f = _embedding_from_doc(doc["embedding"], exact)
    p, X, Y = _point_and_tangents(doc, exact)
    T_hi = tensor_from_spec(doc["tensor"], f.n_cod, exact)
    value = pullback(T_hi, f).eval(p, X, Y)
    base = tensor_from_spec(doc["tensor"], f.n_dom, exact).eval(p, X, Y)
    out = {"pullback": value, "same_kind_on_domain": base,
           "relative_deviation": V.relative_deviation(value, base),
           "embedding": [s.to_dict() for s in f.stages]}
    return 0, dumps(out)


def cmd_invariance(doc, cfg):
    exact = cfg["mode"] == "rational"
    spec = doc.get("tensor", {"kind": "lm", "lambda": 1, "mu": 1})
    max_n = min(cfg["n_max"], 4) if exact else cfg["n_max"]
    F = family_from_spec(spec, max_n, exact)
    rep = V.check_family_invariance(F, cfg["trials"], cfg["tol"], cfg["seed"], exact=exact)
    return (0 if rep.passed else 1), dumps(rep)


def cmd_conditions(doc, cfg):
    spec = doc.get("tensor", {"kind": "d"})
    F = family_from_spec(spec, max(cfg["n_max"], 2))
    table, c1 = V.check_C1(F.at(2), F.at(1))
    out = {
        "sym_u": V.check_sym_u(F.at(1)),
        "barycenter": [V.barycenter_quantity(F, n)[1] for n in range(1, F.max_n + 1)],
        "C1": c1,
        "r_table": [{"t": t, "r": r} for t, r in table],
        "C2": V.check_C2(F),
    }
    return 0, dumps(out)


def cmd_reconstruct(doc, cfg):
    F = family_from_spec(doc["tensor"], cfg["n_max"])
    fn = V.reconstruct_lambda if doc["target"] == "lambda" else V.reconstruct_mu
    try:
        value, rep = fn(F, cfg["tol"], rng=cfg["seed"])
    except PrereqFailed as e:
        return 1, dumps({"error": str(e), "prerequisite": e.report})
    return (0 if rep.passed else 1), dumps({doc["target"]: value, "report": rep})


def cmd_factorize(doc, cfg):
    exact = cfg["mode"] == "rational"
    samples = doc.get("samples", 100)
    if "partition" in doc:
        rep = V.factorization_check_markov(partition_from_dict(doc["partition"], exact),
                                           samples, cfg["seed"], tol=cfg["tol"])
    elif "patch" in doc:
        patch = patch_from_dict(doc["patch"], exact)
        j = int(doc.get("j", 1))
        b = _num(doc.get("b", "1/2"), exact)
        c = _num(doc["c"], exact) if "c" in doc else V.admissible_c(patch, j, b)
        rep = V.factorization_check_patched(patch, j, b, c, samples, cfg["seed"],
                                            tol=cfg["tol"])
    else:
        raise UsageError("factorize needs a 'partition' or a 'patch'")
    return (0 if rep.passed else 1), dumps(rep)


def cmd_campbell(doc, cfg):
    g = cone_from_spec(doc["cone"])
    bad = g.check_positivity(warn=False)
    samples = doc.get("samples", 200)
    iota = V.check_campbell_iota(g, cfg["n_max"], samples, cfg["seed"], tol=max(cfg["tol"], 1e-10))
    lam = _num(doc.get("lambda", 1), False)
    mu = _num(doc.get("mu", 0), False)
    j = V.check_campbell_j(g, lam, mu, samples, cfg["seed"])
    out = {"iota": iota, "j": j, "positivity_failures": bad}
    return (0 if iota.passed and not j.passed else 1), dumps(out)


def cmd_sweep(doc, cfg, quantity: str):
    spec = doc["tensor"]
    grid = tuple(_num(u, False) for u in doc["grid"]) if "grid" in doc else V.DEFAULT_GRID.u
    A1 = tensor_from_spec(spec, 1)
    buf = io.StringIO()
    if quantity == "A1_diag":
        buf.write("u,value\n")
        for u, v in zip(grid, V._a1_diag(A1, grid)):
            buf.write(f"{u!r},{float(v)!r}\n")
    elif quantity == "M_of_u":
        buf.write("u,value\n")
        for u in grid:
            buf.write(f"{u!r},{V.M_profile(A1, u)!r}\n")
    else:
        table, rep = V.check_C1(tensor_from_spec(spec, 2), A1, V.Grid(u=grid))
        if not table:
            raise GeometryError("r(t) is undefined: " + "; ".join(rep.notes))
        buf.write("t,value\n")
        for t, r in table:
            buf.write(f"{t!r},{float(r)!r}\n")
    return 0, buf.getvalue()


# ---------------------------------------------------------------- suite

def run_suite(cfg) -> dict:
    """Canonical checks with their expected outcomes."""
    exact = cfg["mode"] == "rational"
    seed, tol, n_max, trials = cfg["seed"], cfg["tol"], cfg["n_max"], cfg["trials"]
    rng = np.random.default_rng(seed)
    inv_n = min(n_max, 4) if exact else n_max
    items = []

    def add(name, expected, rep, extra=None):
        entry = {"check": name, "expected_pass": expected, "passed": bool(rep.passed),
                 "ok": bool(rep.passed) == expected, "report": rep}
        if extra:
            entry.update(extra)
        items.append(entry)

    for F, expected in ((V.FamilyOracle.lm(3, -1, inv_n), True),
                        (V.FamilyOracle.fisher(inv_n), False),
                        (V.FamilyOracle.zero(inv_n), True)):
        if exact:
            F = V.FamilyOracle.lm(Fraction(3), Fraction(-1), inv_n) if F.name.startswith("A^(3") \
                else F
        add(f"invariance {F.name}", expected,
            V.check_family_invariance(F, trials, tol, rng, exact=exact))
    add("alpha scaling fisher", True,
        V.check_alpha_scaling(V.FamilyOracle.fisher(n_max), trials, max(tol, 1e-10), rng))
    add("markov invariance fisher", True,
        V.check_markov_invariance(V.FamilyOracle.fisher(max(n_max, 8)), 100, 10, tol, rng, 8))
    patch = random_patch(2, rng, scalar=False)
    add("non-scalar patch invariance A^(1,1)", False, V.check_patch_invariance(patch, 1, 1, rng=rng))
    add("sym_u A^s", True, V.check_sym_u(tensor_lm(1, 0, 1)))
    add("sym_u A^d", True, V.check_sym_u(tensor_lm(1, 1, 0)))
    lm = V.FamilyOracle.lm(2.5, 1.5, n_max)
    for n in range(1, n_max + 1):
        value, rep = V.barycenter_quantity(lm, n)
        add(f"barycenter quantity n={n}", True, rep, {"value": value})
    d = V.FamilyOracle.d(3.7, n_max)
    s = V.FamilyOracle.s(2.25, n_max)
    add("C1 A^d", True, V.check_C1(d.at(2), d.at(1))[1])
    add("C1 A^s", False, V.check_C1(s.at(2), s.at(1))[1])
    add("C1 A^(1,1)", False, V.check_C1(tensor_lm(2, 1, 1), tensor_lm(1, 1, 1))[1])
    add("C2 A^s", True, V.check_C2(s))
    add("C2 A^d", False, V.check_C2(d))
    for label, fn, F, ref in (("lambda", V.reconstruct_lambda, d, 3.7),
                              ("mu", V.reconstruct_mu, s, 2.25)):
        try:
            value, rep = fn(F, tol, rng=rng)
        except PrereqFailed as e:
            value, rep = None, e.report
        add(f"reconstruct {label}", True, rep, {"value": value, "reference": ref})
    part = random_partition(2, 5, rng, exact=True)
    add("factorization markov", True, V.factorization_check_markov(part, 100, rng))
    bad_t = np.array(sum(part.measure(i) for i in range(1, part.n + 2)), dtype=object)
    bad_t[0] += Fraction(1, 10)
    add("factorization markov, corrupted t", False,
        V.factorization_check_markov(part, 10, rng, t=bad_t))
    patch = MarkovPatch(2, (1, 2, 3, 4), tuple(Fraction(k, 10) for k in (5, 9, 7)))
    b = Fraction(2, 5)
    c = V.admissible_c(patch, 1, b)
    add("factorization patched", True, V.factorization_check_patched(patch, 1, b, c, 100, rng))
    g = ConeMetric(lambda t: 2.0 + t, lambda t: t * t)
    add("campbell iota", True, V.check_campbell_iota(g, n_max, 200, rng))
    add("campbell j", False, V.check_campbell_j(ConeMetric(lambda t: 1.0, lambda t: 0.0), 1, 0))
    return {"config": cfg, "checks": items, "all_ok": all(i["ok"] for i in items)}


def cmd_suite(doc, cfg):
    start = time.perf_counter()
    out = run_suite(cfg)
    # runtime goes to stderr so the JSON stays byte-identical across runs
    print(f"suite finished in {time.perf_counter() - start:.1f} s", file=sys.stderr)
    return (0 if out["all_ok"] else 1), dumps(out)


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    common.add_argument("--tol", type=float, default=None, help="tolerance (default 1e-9)")
    common.add_argument("--n-max", dest="n_max", type=int, default=None,
                        help="largest simplex dimension (default 6)")
    common.add_argument("--trials", type=int, default=None, help="random trials (default 1000)")
    common.add_argument("--mode", choices=["float", "rational"], default=None)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    src = common.add_mutually_exclusive_group()
    src.add_argument("--config", default=None, help="JSON input file")
    src.add_argument("--json", default=None, help="JSON input given inline")

    parser = argparse.ArgumentParser(prog="simplexgeom", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("eval", "pullback", "invariance", "conditions", "reconstruct",
                 "factorize", "campbell", "suite"):
        sub.add_parser(name, parents=[common])
    sweep = sub.add_parser("sweep", parents=[common])
    sweep.add_argument("quantity", choices=["A1_diag", "r_of_t", "M_of_u"])
    return parser


COMMAND_FNS = {
    "eval": cmd_eval,
    "pullback": cmd_pullback,
    "invariance": cmd_invariance,
    "conditions": cmd_conditions,
    "reconstruct": cmd_reconstruct,
    "factorize": cmd_factorize,
    "campbell": cmd_campbell,
    "suite": cmd_suite,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        plain, doc = _read_input(args, args.command)
        cfg = _run_config(args, plain)
        exact = cfg["mode"] == "rational"
        if not exact:
            doc = plain
        if args.command == "sweep":
            code, text = cmd_sweep(doc, cfg, args.quantity)
        else:
            code, text = COMMAND_FNS[args.command](doc, cfg)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (GeometryError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
