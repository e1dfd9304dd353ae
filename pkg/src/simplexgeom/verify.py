"""Mechanized checks on families of tensor fields.

Each check returns a :class:`CheckReport`; a failed check is a report with
``passed=False`` and (usually) a witness, never an exception. Reconstructions
raise :class:`~simplexgeom.errors.PrereqFailed` when their hypotheses fail.

Deviations are relative with a floor of one: ``|value - ref| / max(|ref|, 1)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from ._numeric import as_vector, is_exact
from .config import DEFAULT_TOL
from .embeddings import (
    EmbeddingMap,
    MarkovPartition,
    MarkovPatch,
    apply,
    differential,
    h_ij,
    is_scalar,
    markov_embedding,
    patched_embedding,
    random_alpha,
    random_partition,
    random_permutation,
    scalar_patched,
)
from .errors import (
    DegenerateDenominator,
    EmptySample,
    InfeasibleConstraints,
    NegativeValue,
    OutOfRange,
    PrereqFailed,
)
from .simplex import (
    SimplexPoint,
    TangentVector,
    barycenter,
    e_diff,
    make_point,
    point_of_u,
    random_point,
    random_points,
    random_tangent,
    random_tangents,
    z_basis,
)
from .tensors import ConeMetric, TensorField, fisher, iota_pullback, j_pullback, pullback, \
    tensor_d, tensor_lm, tensor_s


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _plain(v):
    """JSON-friendly copy of a witness value."""
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, SimplexPoint):
        return _plain(v.w)
    if isinstance(v, TangentVector):
        return _plain(v.x)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return v


def relative_deviation(value, reference, floor: float = 1.0) -> float:
    if isinstance(value, Fraction) and isinstance(reference, Fraction):
        return float(abs(value - reference) / max(abs(reference), Fraction(floor)))
    return float(abs(value - reference) / max(abs(reference), floor))


@dataclass
class CheckReport:
    """Outcome of one check; ``passed`` iff ``max_deviation <= tolerance``."""

    name: str
    passed: bool
    max_deviation: float
    trials: int
    witness: dict | None = None
    notes: list = field(default_factory=list)
    tolerance: float | None = None

    def to_dict(self) -> dict:
        md = float(self.max_deviation)
        if not math.isfinite(md):
            md = str(md)
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "max_deviation": md,
            "trials": int(self.trials),
            "witness": _plain(self.witness) if self.witness is not None else None,
            "notes": list(self.notes),
        }


class _Worst:
    """Running maximum of a deviation together with its witness."""

    def __init__(self):
        self.dev = 0.0
        self.witness = None
        self.count = 0

    def see(self, dev: float, make_witness: Callable[[], dict]):
        self.count += 1
        if dev > self.dev or (self.witness is None and dev >= self.dev):
            self.dev = dev
            self.witness = make_witness()

    def report(self, name, tol, notes=None, trials=None) -> CheckReport:
        return CheckReport(name, self.dev <= tol, self.dev,
                           self.count if trials is None else trials,
                           self.witness, list(notes or []), tol)


@dataclass(frozen=True)
class Grid:
    """Sampling grid for the conditions on ``P_1`` and ``P_2``."""

    u: tuple = tuple(k / 24 for k in range(1, 24))
    alpha: tuple = tuple(k / 10 for k in range(1, 10))
    sigmas: tuple = tuple(itertools.permutations((1, 2, 3)))


DEFAULT_GRID = Grid()


@dataclass(frozen=True)
class FamilyOracle:
    """A family ``n -> A_n`` of tensor fields for ``n = 1..max_n``."""

    max_n: int
    at_fn: Callable[[int], TensorField]
    name: str = "custom"

    def at(self, n: int) -> TensorField:
        if not 1 <= n <= self.max_n:
            raise OutOfRange(f"family {self.name} defined for n in 1..{self.max_n}, not {n}")
        return _cached_at(self, n)

    @classmethod
    def lm(cls, lam, mu, max_n: int = 6) -> FamilyOracle:
        return cls(max_n, lambda n: tensor_lm(n, lam, mu), f"A^({lam},{mu})")

    @classmethod
    def d(cls, lam=1, max_n: int = 6) -> FamilyOracle:
        return cls.lm(lam, 0, max_n)

    @classmethod
    def s(cls, mu=1, max_n: int = 6) -> FamilyOracle:
        return cls.lm(0, mu, max_n)

    @classmethod
    def fisher(cls, max_n: int = 6) -> FamilyOracle:
        return cls(max_n, fisher, "fisher")

    @classmethod
    def zero(cls, max_n: int = 6) -> FamilyOracle:
        return cls.lm(0, 0, max_n)


@lru_cache(maxsize=256)
def _cached_at(F: FamilyOracle, n: int) -> TensorField:
    return F.at_fn(n)


@dataclass(frozen=True)
class PsiPoint:
    """``G_1^{alpha, sigma}(p_u)``, a point of ``P_2``."""

    u: float
    alpha: float
    sigma: tuple
    q: SimplexPoint

    def __post_init__(self):
        s, q, a, u = self.sigma, self.q, self.alpha, self.u
        expect = {s[0]: a * u, s[1]: a * (1 - u), s[2]: 1 - a}
        for k, v in expect.items():
            if abs(q[k] - v) > 1e-12:
                raise OutOfRange(f"q({k}) = {q[k]} but expected {v}")


def psi_point(u, alpha, sigma=(1, 2, 3)) -> PsiPoint:
    q = apply(scalar_patched(1, alpha, sigma), point_of_u(u))
    return PsiPoint(u, alpha, tuple(sigma), q)


def u_alpha_ij(u, alpha, i: int, j: int):
    """``psi(i) / (psi(i) + psi(j))`` for ``psi = G_1^alpha(p_u)`` (identity labels)."""
    psi = (alpha * u, alpha * (1 - u), 1 - alpha)
    return psi[i - 1] / (psi[i - 1] + psi[j - 1])


def _z1(exact=False) -> TangentVector:
    return z_basis(1, 1, exact)


def _a1_diag(A1: TensorField, us) -> np.ndarray:
    """``A_1(Z_u, Z_u)`` for every ``u`` in ``us``."""
    us = np.asarray(us, dtype=np.float64)
    W = np.column_stack([us, 1.0 - us])
    Z = np.tile([0.5, -0.5], (len(us), 1))
    return A1.eval_batch(W, Z, Z)


def _sgn(x: float) -> float:
    return float((x > 0) - (x < 0))


# ---------------------------------------------------------------- invariance

def check_family_invariance(F: FamilyOracle, trials: int = 1000, tol: float = 1e-9,
                            rng=None, exact: bool = False, samples_per_map: int = 10,
                            max_n: int | None = None) -> CheckReport:
    """Compare ``A_n`` with the pullback of ``A_{n+1}`` by random scalar patches.

    ``n`` is drawn from ``1..max_n - 1``. With ``exact=True`` all data is
    rational and deviations are computed exactly.
    """
    rng = _rng(rng)
    top = F.max_n if max_n is None else max_n
    if top < 2:
        raise OutOfRange("invariance check needs max_n >= 2")
    worst = _Worst()
    n_maps = max(1, -(-trials // samples_per_map))
    for _ in range(n_maps):
        n = int(rng.integers(1, top))
        G = scalar_patched(n, random_alpha(rng, exact), random_permutation(n + 2, rng))
        A_lo, pulled = F.at(n), pullback(F.at(n + 1), G)
        stage = G.stages[0]
        if exact:
            for _ in range(samples_per_map):
                p = random_point(n, rng, exact=True)
                X, Y = random_tangent(n, rng, True), random_tangent(n, rng, True)
                ref, val = A_lo.eval(p, X, Y), pulled.eval(p, X, Y)
                dev = relative_deviation(val, ref)
                worst.see(dev, lambda: {"n": n, "alpha": stage.alpha, "sigma": stage.sigma,
                                        "p": p, "X": X, "Y": Y, "A_n": ref, "pullback": val})
            continue
        W = random_points(n, samples_per_map, rng)
        X, Y = random_tangents(n, samples_per_map, rng), random_tangents(n, samples_per_map, rng)
        ref = A_lo.eval_batch(W, X, Y)
        val = pulled.eval_batch(W, X, Y)
        devs = np.abs(val - ref) / np.maximum(np.abs(ref), 1.0)
        for r in range(samples_per_map):
            worst.see(float(devs[r]), lambda r=r: {
                "n": n, "alpha": stage.alpha, "sigma": stage.sigma, "p": W[r], "X": X[r],
                "Y": Y[r], "A_n": ref[r], "pullback": val[r],
                "ratio": val[r] / ref[r] if ref[r] != 0 else None})
    return worst.report(f"invariance[{F.name}]", tol)


def check_alpha_scaling(F: FamilyOracle, trials: int = 1000, tol: float = 1e-10,
                        rng=None, samples_per_map: int = 10) -> CheckReport:
    """Check ``pullback(A_{n+1}, G^{alpha,sigma}) == alpha * A_n`` (the Fisher scaling law)."""
    rng = _rng(rng)
    worst = _Worst()
    for _ in range(max(1, -(-trials // samples_per_map))):
        n = int(rng.integers(1, F.max_n))
        alpha = random_alpha(rng)
        G = scalar_patched(n, alpha, random_permutation(n + 2, rng))
        pulled = pullback(F.at(n + 1), G)
        W = random_points(n, samples_per_map, rng)
        X, Y = random_tangents(n, samples_per_map, rng), random_tangents(n, samples_per_map, rng)
        ref = alpha * F.at(n).eval_batch(W, X, Y)
        val = pulled.eval_batch(W, X, Y)
        devs = np.abs(val - ref) / np.maximum(np.abs(ref), 1.0)
        for r in range(samples_per_map):
            worst.see(float(devs[r]), lambda r=r: {"n": n, "alpha": alpha, "p": W[r],
                                                   "X": X[r], "Y": Y[r]})
    return worst.report(f"alpha_scaling[{F.name}]", tol)


def check_markov_invariance(F: FamilyOracle, maps: int = 100, samples_per_map: int = 10,
                            tol: float = 1e-9, rng=None, max_N: int | None = None) -> CheckReport:
    """Compare ``A_n`` with its pullback along random Markov embeddings ``P_n -> P_N``."""
    rng = _rng(rng)
    top = F.max_n if max_N is None else max_N
    worst = _Worst()
    for _ in range(maps):
        N = int(rng.integers(1, top + 1))
        n = int(rng.integers(1, N + 1))
        part = random_partition(n, N, rng)
        pulled = pullback(F.at(N), markov_embedding(part))
        W = random_points(n, samples_per_map, rng)
        X, Y = random_tangents(n, samples_per_map, rng), random_tangents(n, samples_per_map, rng)
        ref = F.at(n).eval_batch(W, X, Y)
        val = pulled.eval_batch(W, X, Y)
        devs = np.abs(val - ref) / np.maximum(np.abs(ref), 1.0)
        for r in range(samples_per_map):
            worst.see(float(devs[r]), lambda r=r: {"n": n, "N": N, "partition": part.to_dict(),
                                                   "p": W[r], "X": X[r], "Y": Y[r]})
    return worst.report(f"markov_invariance[{F.name}]", tol)


def _witness_points(n: int) -> list:
    pts = [barycenter(n)]
    ramp = np.arange(1, n + 2, dtype=float)
    pts.append(make_point(n, ramp / ramp.sum()))
    pts.append(make_point(n, ramp[::-1] / ramp.sum()))
    return pts


def check_patch_invariance(patch: MarkovPatch, lam, mu, threshold: float = 1e-6,
                           max_random: int = 10_000, rng=None) -> CheckReport:
    """Does the pullback of ``A_{n+1}^{lam,mu}`` along ``patch`` equal ``A_n^{lam,mu}``?

    A fixed grid (barycenter and two ramps, tangents ``Z_i - Z_j``) is searched
    first, then up to ``max_random`` random samples. For a non-scalar patch and
    ``(lam, mu) != (0, 0)`` the expected outcome is ``passed=False`` with a
    witness. Finding no witness is reported as inconclusive, not as a proof.
    """
    rng = _rng(rng)
    n = patch.n
    G = patched_embedding(patch)
    A_lo, A_hi = tensor_lm(n, lam, mu), tensor_lm(n + 1, lam, mu)
    worst = _Worst()

    def probe(p, X):
        ref = A_lo.eval(p, X, X)
        val = A_hi.eval(apply(G, p), differential(G, X), differential(G, X))
        dev = relative_deviation(val, ref)
        worst.see(dev, lambda: {"p": p, "X": X, "A_n": ref, "pullback": val,
                                "abs_gap": abs(val - ref)})

    for p in _witness_points(n):
        for i, j in itertools.combinations(range(1, n + 2), 2):
            probe(p, e_diff(n, i, j))
    tried = 0
    while worst.dev <= threshold and tried < max_random:
        probe(random_point(n, rng), random_tangent(n, rng))
        tried += 1
    notes = []
    if worst.dev <= threshold:
        notes.append("inconclusive: no witness found on the grid or random samples")
    rep = worst.report(f"patch_invariance[{lam},{mu}]", threshold, notes)
    rep.witness = dict(rep.witness or {}, patch=patch.to_dict(), scalar=is_scalar(patch))
    return rep


# ---------------------------------------------------------------- P_1 / P_2 structure

def check_sym_u(A1: TensorField, grid=DEFAULT_GRID.u, tol: float = 1e-10) -> CheckReport:
    """``A_1(Z_u, Z_u) == A_1(Z_{1-u}, Z_{1-u})`` over ``grid``."""
    grid = grid.u if isinstance(grid, Grid) else grid
    us = np.asarray(grid, dtype=np.float64)
    a, b = _a1_diag(A1, us), _a1_diag(A1, 1.0 - us)
    worst = _Worst()
    for k, u in enumerate(us):
        dev = relative_deviation(a[k], b[k])
        worst.see(dev, lambda k=k, u=u: {"u": u, "at_u": a[k], "at_1_minus_u": b[k]})
    return worst.report("sym_u", tol)


def barycenter_quantity(F: FamilyOracle, n: int, tol: float = 1e-10) -> tuple[float, CheckReport]:
    """``A_n(Z_i, Z_i) / (n (n+1))`` at ``b_n`` and its agreement with the companions.

    The report compares, for every ``i`` and ``i != j``, both
    ``A_n(Z_i, Z_i) / (n (n+1))`` and ``-A_n(Z_i, Z_j) / (n+1)`` against the
    value and against the ``n = 1`` value.
    """
    def quantities(m):
        A = F.at(m)
        b = barycenter(m)
        Z = [z_basis(m, i) for i in range(1, m + 2)]
        out = []
        for i in range(m + 1):
            out.append((("diag", i + 1), A.eval(b, Z[i], Z[i]) / (m * (m + 1))))
            for j in range(m + 1):
                if i != j:
                    out.append((("off", i + 1, j + 1), -A.eval(b, Z[i], Z[j]) / (m + 1)))
        return out

    qs = quantities(n)
    value = qs[0][1]
    base = value if n == 1 else quantities(1)[0][1]
    worst = _Worst()
    for key, v in qs:
        dev = max(relative_deviation(v, value), relative_deviation(v, base))
        worst.see(dev, lambda key=key, v=v: {"n": n, "expression": list(key), "value": v,
                                             "reference": value, "n1_value": base})
    return value, worst.report(f"barycenter_quantity[n={n}]", tol)


def M_profile(A1: TensorField, u, tol: float = 1e-12) -> float:
    """Signed root ``sgn(2u - 1) sqrt(A_1(Z_u, Z_u))`` with ``sgn(0) = 0``."""
    v = A1.eval(point_of_u(u), _z1(), _z1())
    if v < -tol * max(1.0, abs(v)):
        raise NegativeValue(f"A_1(Z_u, Z_u) = {v} < 0 at u = {u}")
    return _sgn(2 * float(u) - 1) * math.sqrt(max(float(v), 0.0))


def _M_batch(A1: TensorField, us: np.ndarray, tol: float) -> tuple[np.ndarray, float]:
    vals = _a1_diag(A1, us)
    neg = float(max(0.0, -vals.min())) if len(vals) else 0.0
    signs = np.sign(2.0 * us - 1.0)
    return signs * np.sqrt(np.maximum(vals, 0.0)), neg


@lru_cache(maxsize=8)
def _c1_geometry(grid: Grid):
    """Grid cells with their points ``q`` and the vectors ``W_s3``, ``W_s1``, ``W_s2``."""
    cells = [(s, a, u) for s in grid.sigmas for a in grid.alpha for u in grid.u]
    Q, X3, Wn, Wd = [], [], [], []
    for s, a, u in cells:
        Q.append(psi_point(u, a, s).q.w)
        X3.append(e_diff(2, s[0], s[1]).x)
        Wn.append(e_diff(2, s[2], s[1]).x)
        Wd.append(e_diff(2, s[0], s[2]).x)
    arrays = [np.array(v) for v in (Q, X3, Wn, Wd)]
    for arr in arrays:
        arr.flags.writeable = False
    return (cells, *arrays)


def check_C1(A2: TensorField, A1: TensorField, grid: Grid = DEFAULT_GRID, tol: float = 1e-8,
             degeneracy_tol: float = 1e-12, require_nondegenerate: bool = True,
             exclude_vanishing: bool = True) -> tuple[list, CheckReport]:
    """Conformal condition on ``A_2``.

    For every ``(u, alpha, sigma)`` the ratio ``A_2(W_s3, W_s1) / A_2(W_s3, W_s2)``
    at ``G_1^{alpha,sigma}(p_u)`` is formed, with ``W_s3 = Z_s1 - Z_s2``,
    ``W_s1 = Z_s3 - Z_s2``, ``W_s2 = Z_s1 - Z_s3`` (``s = sigma``). The ratio
    must be positive, the same for all ``(alpha, sigma)`` at a given ``u``, and
    satisfy ``r(t) r(1/t) = 1`` with ``t = u / (1 - u)``.

    Returns ``(table, report)`` where ``table`` lists ``(t, r(t))`` by increasing
    ``t``. A family whose ``A_1`` vanishes on the whole grid satisfies the
    condition with any ``r``; the table is then empty. If ``A_1`` is
    degenerate at only some grid points the precondition fails unless
    ``require_nondegenerate=False``. Cells where ``|A_2(W_s3, W_s2)|`` is
    below ``degeneracy_tol`` are excluded and listed in the notes; with
    ``exclude_vanishing=False`` they raise :class:`DegenerateDenominator`.
    """
    us = np.asarray(grid.u, dtype=np.float64)
    a1 = _a1_diag(A1, us)
    degenerate = np.abs(a1) <= degeneracy_tol
    name = "C1"
    cells, Q, X3, Wn, Wd = _c1_geometry(grid)
    num = A2.eval_batch(Q, X3, Wn)
    den = A2.eval_batch(Q, X3, Wd)

    if degenerate.all():
        worst = _Worst()
        for k, (s, a, u) in enumerate(cells):
            dev = max(abs(num[k]), abs(den[k]))
            worst.see(dev, lambda k=k, s=s, a=a, u=u: {
                "clause": "vanishing", "u": u, "alpha": a, "sigma": s,
                "numerator": num[k], "denominator": den[k]})
        rep = worst.report(name, degeneracy_tol,
                           ["A_1 vanishes on the grid; the condition holds with any r"])
        return [], rep

    if degenerate.any() and require_nondegenerate:
        bad = [float(u) for u, d in zip(us, degenerate) if d]
        rep = CheckReport(name, False, math.inf, len(us),
                          {"clause": "precondition", "degenerate_u": bad,
                           "A1_values": [float(v) for v, d in zip(a1, degenerate) if d]},
                          [f"precondition failed: A_1 degenerate at u in {bad}"], tol)
        return [], rep

    notes = []
    ratio = {}
    for k, (s, a, u) in enumerate(cells):
        if abs(den[k]) < degeneracy_tol:
            if not exclude_vanishing:
                raise DegenerateDenominator(
                    f"A_2(W_3, W_2) = {den[k]} at u={u}, alpha={a}, sigma={s}")
            notes.append(f"excluded u={u}, alpha={a}, sigma={list(s)}: vanishing denominator")
            continue
        ratio[(s, a, u)] = float(num[k] / den[k])

    worst = _Worst()
    ref_sigma, ref_alpha = grid.sigmas[0], grid.alpha[0]
    table = {}
    for u in grid.u:
        vals = [(s, a, ratio[(s, a, u)]) for s in grid.sigmas for a in grid.alpha
                if (s, a, u) in ratio]
        if not vals:
            continue
        ref = ratio.get((ref_sigma, ref_alpha, u), vals[0][2])
        table[u] = ref
        for s, a, r in vals:
            if not r > 0:
                worst.see(math.inf, lambda s=s, a=a, u=u, r=r: {
                    "clause": "positivity", "u": u, "alpha": a, "sigma": s, "ratio": r})
                continue
            dev = abs(r - ref) / abs(ref)
            worst.see(dev, lambda s=s, a=a, u=u, r=r, ref=ref: {
                "clause": "depends_only_on_t", "u": u, "alpha": a, "sigma": s,
                "ratio": r, "reference_ratio": ref})
    for u, r in table.items():
        mirror = [v for v in table if abs(v - (1 - u)) < 1e-15]
        if mirror:
            dev = abs(r * table[mirror[0]] - 1.0)
            worst.see(dev, lambda u=u, r=r, m=mirror[0]: {
                "clause": "reciprocity", "u": u, "r_t": r, "r_1_over_t": table[m]})
    rows = sorted(((u / (1 - u), r) for u, r in table.items()), key=lambda x: x[0])
    return rows, worst.report(name, tol, notes, trials=len(cells))


@lru_cache(maxsize=8)
def _c2_geometry(grid: Grid):
    """Family-independent part of the parallel condition on ``grid``.

    For every cell and ordered pair ``(i, j)`` of distinct labels this builds
    ``H = H^{sigma(i) sigma(j)}`` through ``q = G_1^{alpha,sigma}(p_u)`` and
    records ``u^{ij}_alpha`` and ``dH(Z_1^1)``.
    """
    pairs = [(i, j) for i in range(1, 4) for j in range(1, 4) if i != j]
    Z = _z1()
    cells = []
    for s in grid.sigmas:
        for a in grid.alpha:
            for u in grid.u:
                q = psi_point(u, a, s).q
                vecs, uus = [], []
                for i, j in pairs:
                    H, uu = h_ij(q, s[i - 1], s[j - 1])
                    expect = u_alpha_ij(u, a, i, j)
                    if abs(uu - expect) > 1e-12:
                        raise AssertionError(f"u_alpha^{i}{j} mismatch: {uu} vs {expect}")
                    vecs.append(differential(H, Z).x)
                    uus.append(float(uu))
                cells.append((s, a, u, q.w, np.array(vecs), np.array(uus)))
    return pairs, cells


def check_C2(F: FamilyOracle, grid: Grid = DEFAULT_GRID, tol: float = 1e-9) -> CheckReport:
    """Parallel condition on ``A_1`` and ``A_2``.

    Clauses, checked in this order of reporting priority:
    ``degeneracy`` (``A_1(Z, Z) = 0`` at ``b_1``), ``psd`` (``A_1(Z_u, Z_u) >= 0``
    on the grid), and ``parallel``: for all ordered pairs ``(i, j)``, ``(k, l)``
    ``A_2(dH^{s(i)s(j)} Z, dH^{s(k)s(l)} Z) = M(u^{ij}) M(u^{kl})`` at
    ``G_1^{alpha,sigma}(p_u)``, where ``M`` is :func:`M_profile`.
    """
    A1, A2 = F.at(1), F.at(2)
    us = np.asarray(grid.u, dtype=np.float64)
    clauses = {}

    at_b = float(_a1_diag(A1, [0.5])[0])
    clauses["degeneracy"] = (abs(at_b) / max(1.0, 0.0),
                             {"clause": "degeneracy", "A1_at_b1": at_b})
    a1 = _a1_diag(A1, us)
    k_min = int(np.argmin(a1))
    clauses["psd"] = (max(0.0, -float(a1[k_min])),
                      {"clause": "psd", "u": float(us[k_min]), "A1": float(a1[k_min])})

    pairs, cells = _c2_geometry(grid)
    trials = len(cells) * len(pairs) ** 2
    if clauses["psd"][0] <= tol:
        uu_all = np.concatenate([c[5] for c in cells])
        M_all, _ = _M_batch(A1, uu_all, tol)
        m = len(pairs)
        Wrows, Xrows, Yrows, rhs = [], [], [], []
        for c_idx, (s, a, u, qw, vecs, uus) in enumerate(cells):
            Mc = M_all[c_idx * m:(c_idx + 1) * m]
            for x in range(m):
                for y in range(m):
                    Wrows.append(qw)
                    Xrows.append(vecs[x])
                    Yrows.append(vecs[y])
                    rhs.append(Mc[x] * Mc[y])
        rhs = np.array(rhs)
        lhs = A2.eval_batch(np.array(Wrows), np.array(Xrows), np.array(Yrows))
        devs = np.abs(lhs - rhs) / np.maximum(np.abs(rhs), 1.0)
        k = int(np.argmax(devs))
        c_idx, rem = divmod(k, m * m)
        x, y = divmod(rem, m)
        s, a, u = cells[c_idx][:3]
        clauses["parallel"] = (float(devs[k]), {
            "clause": "parallel", "u": u, "alpha": a, "sigma": s,
            "pair_ij": pairs[x], "pair_kl": pairs[y], "lhs": lhs[k], "rhs": rhs[k]})
    else:
        trials = len(us)

    failing = [c for c in ("degeneracy", "psd", "parallel")
               if c in clauses and clauses[c][0] > tol]
    dev = max(v[0] for v in clauses.values())
    if failing:
        witness = dict(clauses[failing[0]][1], failed_clauses=failing)
    else:
        witness = clauses.get("parallel", clauses["degeneracy"])[1]
    notes = [] if "parallel" in clauses else ["parallel clause skipped: A_1 not PSD"]
    return CheckReport(f"C2[{F.name}]", not failing, dev, trials, witness, notes, tol)


# ---------------------------------------------------------------- reconstruction

def _certify(F: FamilyOracle, target: Callable[[int], TensorField], samples: int, rng,
             name: str, tol: float) -> _Worst:
    worst = _Worst()
    for n in range(1, F.max_n + 1):
        W = random_points(n, samples, rng)
        X, Y = random_tangents(n, samples, rng), random_tangents(n, samples, rng)
        got = F.at(n).eval_batch(W, X, Y)
        want = target(n).eval_batch(W, X, Y)
        devs = np.abs(got - want) / np.maximum(np.abs(want), 1.0)
        k = int(np.argmax(devs))
        worst.see(float(devs[k]), lambda n=n, k=k: {
            "clause": name, "n": n, "p": W[k], "X": X[k], "Y": Y[k],
            "A_n": got[k], "model": want[k]})
        worst.count += samples - 1
    return worst


def reconstruct_lambda(F: FamilyOracle, tol: float = 1e-9, samples: int = 500, rng=None,
                       grid: Grid = DEFAULT_GRID,
                       invariance_trials: int = 200) -> tuple[float, CheckReport]:
    """Recover ``lambda = A_1(Z_{1/2}, Z_{1/2}) / 2`` and certify ``A_n = lambda A_n^d``.

    Requires the family to pass :func:`check_family_invariance` and
    :func:`check_C1`; otherwise raises :class:`PrereqFailed`.
    """
    rng = _rng(rng)
    inv = check_family_invariance(F, invariance_trials, tol, rng)
    if not inv.passed:
        raise PrereqFailed("family is not invariant under scalar patches", inv)
    _, c1 = check_C1(F.at(2), F.at(1), grid)
    if not c1.passed:
        raise PrereqFailed("family fails the conformal condition", c1)
    lam = 0.5 * F.at(1).eval(barycenter(1), _z1(), _z1())
    worst = _certify(F, lambda n: tensor_lm(n, lam, 0.0), samples, rng, "A_n = lambda A^d", tol)
    rep = worst.report(f"reconstruct_lambda[{F.name}]", tol)
    rep.witness = dict(rep.witness or {}, **{"lambda": lam})
    return lam, rep


def reconstruct_mu(F: FamilyOracle, tol: float = 1e-9, samples: int = 500, rng=None,
                   grid: Grid = DEFAULT_GRID,
                   invariance_trials: int = 200) -> tuple[float, CheckReport]:
    """Recover ``mu = (16/9) M(1/3)^2`` and certify ``A_n = mu A_n^s``.

    The report also covers ``M(u) = (sqrt(mu) / 2) (1/(1-u) - 1/u)`` on the
    u-grid. Requires invariance and :func:`check_C2`.
    """
    rng = _rng(rng)
    inv = check_family_invariance(F, invariance_trials, tol, rng)
    if not inv.passed:
        raise PrereqFailed("family is not invariant under scalar patches", inv)
    c2 = check_C2(F, grid)
    if not c2.passed:
        raise PrereqFailed("family fails the parallel condition", c2)
    A1 = F.at(1)
    mu = 16.0 / 9.0 * M_profile(A1, 1.0 / 3.0) ** 2
    worst = _certify(F, lambda n: tensor_lm(n, 0.0, mu), samples, rng, "A_n = mu A^s", tol)
    root = math.sqrt(mu) / 2.0
    for u in grid.u:
        got = M_profile(A1, u)
        want = root * (1.0 / (1.0 - u) - 1.0 / u)
        worst.see(relative_deviation(got, want), lambda u=u, got=got, want=want: {
            "clause": "M closed form", "u": u, "M": got, "closed_form": want})
    rep = worst.report(f"reconstruct_mu[{F.name}]", tol)
    rep.witness = dict(rep.witness or {}, mu=mu)
    return mu, rep


# ---------------------------------------------------------------- sufficiency

def factorization_check_markov(part: MarkovPartition, samples: int = 100, rng=None,
                               t=None, tol: float = DEFAULT_TOL.comparison) -> CheckReport:
    """Check ``F(rho)(I) = rho(kappa(I)) t(I)`` with ``t(I) = sum_i Q_i(I)``.

    Rational partitions are checked exactly (``tol`` ignored). ``t`` overrides
    the statistic, which is how mutants are tested.
    """
    rng = _rng(rng)
    exact = is_exact(part.q)
    F = markov_embedding(part)
    if t is None:
        t = sum(part.measure(i) for i in range(1, part.n + 2))
    t = as_vector(t, exact)
    worst = _Worst()
    for _ in range(samples):
        rho = random_point(part.n, rng, exact=exact)
        image = apply(F, rho)
        for I in range(part.N + 1):
            want = rho[part.kappa[I]] * t[I]
            gap = abs(image.w[I] - want)
            dev = float(gap)
            worst.see(dev, lambda I=I, rho=rho, image=image, want=want: {
                "rho": rho, "I": I + 1, "image": image.w[I], "s_times_t": want})
    tol = 0.0 if exact else tol
    return worst.report("factorization_markov", tol, trials=samples)


def _patch_interval(patch: MarkovPatch, j: int, b):
    others = [patch.a[i] for i in range(patch.n + 1) if i != j - 1]
    a_min, a_max = min(others), max(others)
    aj = patch.a[j - 1]
    return b * aj + (1 - b) * a_min, b * aj + (1 - b) * a_max, a_min == a_max


def admissible_c(patch: MarkovPatch, j: int, b, frac=Fraction(1, 2)):
    """A value of ``c`` inside the admissible interval (the forced value when it collapses)."""
    lo, hi, flat = _patch_interval(patch, j, b)
    if flat:
        return lo
    if not is_exact(patch.a):
        frac = float(frac)
    return lo + (hi - lo) * frac


def patched_statistic(patch: MarkovPatch, j: int, b, c) -> tuple[list, np.ndarray]:
    """The statistic ``kappa`` (1-based list) and the factor ``t`` for a patched embedding.

    ``t(I) = sum_i Q_i(I) * (sum_i delta_sigma(i)(I) + (1 - c) / (b sum_i (1 - a_i)) delta_sigma(n+2)(I))``.
    """
    n, sigma, a = patch.n, patch.sigma, patch.a
    G = patched_embedding(patch)
    exact = is_exact(a)
    kappa = [0] * (n + 2)
    for i in range(n + 1):
        kappa[sigma[i] - 1] = i + 1
    kappa[sigma[n + 1] - 1] = j
    total_loss = sum(1 - ai for ai in a)
    t = []
    for I in range(n + 2):
        mass = sum(G.M[I, i] for i in range(n + 1))
        if I == sigma[n + 1] - 1:
            t.append(mass * (1 - c) / (b * total_loss))
        else:
            t.append(mass * 1)
    return kappa, as_vector(t, exact)


def _sample_constrained(patch: MarkovPatch, j: int, b, c, rng, attempts: int):
    """Interior point with ``p(j) = b`` and ``sum a_i p(i) = c``."""
    n, a = patch.n, patch.a
    exact = is_exact(a)
    others = [i for i in range(n + 1) if i != j - 1]
    lo, hi, flat = _patch_interval(patch, j, b)
    rest = 1 - b

    def draw_simplex(k, total):
        if exact:
            raw = [Fraction(int(v)) for v in rng.integers(1, 20, size=k)]
            s = sum(raw)
            return [total * v / s for v in raw]
        d = rng.dirichlet(np.ones(k))
        return list(total * d)

    if flat:
        w = [None] * (n + 1)
        w[j - 1] = b
        for i, v in zip(others, draw_simplex(len(others), rest)):
            w[i] = v
        return w
    r = min(others, key=lambda i: a[i])
    s = max(others, key=lambda i: a[i])
    free = [i for i in others if i not in (r, s)]
    scale = Fraction(1, 2) if exact else 0.5
    for _ in range(attempts):
        w = [None] * (n + 1)
        w[j - 1] = b
        mass = rest * (scale if exact else float(scale)) if free else 0 * rest
        if free:
            for i, v in zip(free, draw_simplex(len(free), mass)):
                w[i] = v
        S = rest - mass
        C = c - a[j - 1] * b - sum((a[i] * w[i] for i in free), 0 * b)
        pr = (C - a[s] * S) / (a[r] - a[s])
        ps = S - pr
        if pr > 0 and ps > 0:
            w[r], w[s] = pr, ps
            return w
        scale = scale / 2
    raise EmptySample(f"no interior point of the constrained set after {attempts} attempts")


def factorization_check_patched(patch: MarkovPatch, j: int, b, c, samples: int = 100,
                                rng=None, t=None, attempts: int = 200,
                                tol: float = DEFAULT_TOL.comparison) -> CheckReport:
    """Check ``G(p)(w) = p(kappa(w)) t(w)`` on the slice ``p(j) = b``, ``sum a_i p(i) = c``.

    ``c`` must lie in the open interval ``(b a_j + (1-b) a_min, b a_j + (1-b) a_max)``
    (extrema over ``i != j``), or equal its endpoint when the interval
    collapses; otherwise :class:`InfeasibleConstraints` is raised.
    """
    rng = _rng(rng)
    n = patch.n
    if not 1 <= j <= n + 1:
        raise OutOfRange(f"j must lie in 1..{n + 1}")
    if not 0 < b < 1:
        raise OutOfRange(f"b must lie in (0, 1), got {b}")
    exact = is_exact(patch.a)
    lo, hi, flat = _patch_interval(patch, j, b)
    if flat:
        ok = (c == lo) if exact else abs(c - lo) <= DEFAULT_TOL.construction
    else:
        ok = lo < c < hi
    if not ok:
        raise InfeasibleConstraints(f"c = {c} outside the admissible range [{lo}, {hi}]")
    G = patched_embedding(patch)
    kappa, t_default = patched_statistic(patch, j, b, c)
    t = t_default if t is None else as_vector(t, exact)
    worst = _Worst()
    for _ in range(samples):
        w = _sample_constrained(patch, j, b, c, rng, attempts)
        p = make_point(n, as_vector(w, exact))
        image = apply(G, p)
        for I in range(n + 2):
            want = p[kappa[I]] * t[I]
            dev = float(abs(image.w[I] - want))
            worst.see(dev, lambda I=I, p=p, image=image, want=want: {
                "p": p, "omega": I + 1, "image": image.w[I], "s_times_t": want})
    tol = 0.0 if exact else tol
    rep = worst.report("factorization_patched", tol, trials=samples)
    rep.witness = dict(rep.witness or {}, kappa=kappa)
    return rep


# ---------------------------------------------------------------- cone metric

def check_campbell_iota(g: ConeMetric, max_n: int = 6, samples: int = 200, rng=None,
                        tol: float = 1e-10) -> CheckReport:
    """Restriction of the cone metric to the simplex equals ``lambda~(1)`` times Fisher."""
    rng = _rng(rng)
    scale = g.lambda_fn(1.0)
    worst = _Worst()
    for k in range(samples):
        n = 1 + k % max_n
        p, X, Y = random_point(n, rng), random_tangent(n, rng), random_tangent(n, rng)
        got = iota_pullback(g, n).eval(p, X, Y)
        want = scale * fisher(n).eval(p, X, Y)
        worst.see(relative_deviation(got, want), lambda: {
            "n": n, "p": p, "X": X, "Y": Y, "restricted": got, "fisher_scaled": want})
    return worst.report("campbell_iota", tol)


def check_campbell_j(g: ConeMetric, lam=1, mu=0, samples: int = 100, rng=None,
                     threshold: float = 1e-6) -> CheckReport:
    """Does the pullback of the cone metric by ``j`` equal ``A^{lam,mu}``? (It does not.)

    Tries the fixed witness ``q = (0.3, 0.3, 0.4)``, ``X = (1, -1, 0)`` first and
    random samples only if it does not separate the two.
    """
    rng = _rng(rng)
    worst = _Worst()

    def probe(q, X):
        n1 = q.n
        got = j_pullback(g, n1 - 1).eval(q, X, X)
        want = tensor_lm(n1, lam, mu).eval(q, X, X)
        worst.see(relative_deviation(got, want), lambda: {
            "q": q, "X": X, "j_pullback": got, "A_lambda_mu": want})

    probe(make_point(2, [0.3, 0.3, 0.4]), e_diff(2, 1, 2))
    k = 0
    while worst.dev <= threshold and k < samples:
        n1 = 2 + k % 4
        probe(random_point(n1, rng), random_tangent(n1, rng))
        k += 1
    notes = [] if worst.dev > threshold else ["inconclusive: no witness found"]
    return worst.report(f"campbell_j[{lam},{mu}]", threshold, notes)


__all__ = [
    "CheckReport",
    "DEFAULT_GRID",
    "FamilyOracle",
    "Grid",
    "M_profile",
    "PsiPoint",
    "admissible_c",
    "barycenter_quantity",
    "check_C1",
    "check_C2",
    "check_alpha_scaling",
    "check_campbell_iota",
    "check_campbell_j",
    "check_family_invariance",
    "check_markov_invariance",
    "check_patch_invariance",
    "check_sym_u",
    "factorization_check_markov",
    "factorization_check_patched",
    "patched_statistic",
    "psi_point",
    "reconstruct_lambda",
    "reconstruct_mu",
    "relative_deviation",
    "u_alpha_ij",
]
