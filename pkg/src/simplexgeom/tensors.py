"""Symmetric (0,2)-tensor fields on ``P_n`` and on the positive cone.

A :class:`TensorField` is an evaluator, not a stored matrix. Built-in kinds
route float64 input through :mod:`simplexgeom.kernels` and fall back to
generic numpy code for rational input, which keeps pullback chains exact.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import kernels
from ._numeric import as_vector, is_exact, scalar
from .embeddings import EmbeddingMap
from .errors import DimensionMismatch, NonPositiveCoordinate
from .simplex import SimplexPoint, TangentVector, e_diff

RawFn = Callable[[np.ndarray, np.ndarray, np.ndarray], object]


@dataclass(frozen=True, eq=False)
class TensorField:
    """Evaluator ``(p, X, Y) -> real`` on ``P_n``.

    ``fn`` receives raw arrays ``(w, x, y)`` (weights and ambient tangent
    components). ``batch``, when present, evaluates 2-D float arrays row-wise.
    ``kind`` is one of ``fisher``, ``Ad``, ``As``, ``lambda_mu``, ``pullback``,
    ``cone_restricted`` or ``custom``; ``params`` carries the kind's data.
    """

    n: int
    kind: str
    fn: RawFn = field(repr=False)
    batch: Callable | None = field(default=None, repr=False)
    params: dict = field(default_factory=dict)

    def eval(self, p: SimplexPoint, X: TangentVector, Y: TangentVector):
        if not p.n == X.n == Y.n == self.n:
            raise DimensionMismatch(
                f"tensor on P_{self.n} given point P_{p.n}, tangents P_{X.n}, P_{Y.n}")
        return scalar(self.fn(p.w, X.x, Y.x))

    __call__ = eval

    def eval_batch(self, W, X, Y) -> np.ndarray:
        """Evaluate rows of float arrays of shape ``(k, n+1)``."""
        W = np.ascontiguousarray(W, dtype=np.float64)
        X = np.ascontiguousarray(X, dtype=np.float64)
        Y = np.ascontiguousarray(Y, dtype=np.float64)
        if W.shape[1] != self.n + 1 or W.shape != X.shape or W.shape != Y.shape:
            raise DimensionMismatch(f"batch shapes {W.shape}, {X.shape}, {Y.shape} "
                                    f"do not fit P_{self.n}")
        if self.batch is not None:
            return np.asarray(self.batch(W, X, Y), dtype=np.float64)
        return np.array([float(self.fn(W[r], X[r], Y[r])) for r in range(W.shape[0])])

    @property
    def label(self) -> dict:
        out = {"kind": self.kind, "n": self.n}
        for k, v in self.params.items():
            if isinstance(v, TensorField):
                out[k] = v.label
            elif isinstance(v, Fraction):
                out[k] = str(v)
            elif isinstance(v, (int, float)):
                out[k] = v
        return out


def _float_inputs(*arrs) -> bool:
    return not any(is_exact(a) for a in arrs)


def _lift(v, arrs):
    """Promote an integer coefficient to Fraction when evaluating exactly."""
    if any(is_exact(a) for a in arrs) and isinstance(v, int):
        return Fraction(v)
    return v


def _fisher_fn(w, x, y):
    if _float_inputs(w, x, y):
        return kernels.fisher_eval(w, x, y)
    return (x * y / w).sum()


def _lm_fn(lam, mu):
    lam_f, mu_f = float(lam), float(mu)

    def fn(w, x, y):
        if _float_inputs(w, x, y):
            return kernels.lm_eval(w, x, y, lam_f, mu_f)
        rx = x / w
        ry = y / w
        lam_e = _lift(lam, (w,))
        mu_e = _lift(mu, (w,))
        return lam_e * (rx * ry).sum() + mu_e * rx.sum() * ry.sum()

    def batch(W, X, Y):
        return kernels.lm_eval_batch(W, X, Y, lam_f, mu_f)

    return fn, batch


def fisher(n: int) -> TensorField:
    """``sum_i X^i Y^i / p(i)``."""
    return TensorField(n, "fisher", _fisher_fn, kernels.fisher_eval_batch)


def tensor_lm(n: int, lam, mu) -> TensorField:
    """``lam * A^d + mu * A^s``. Pass Fractions or ints to keep rational evaluation exact."""
    fn, batch = _lm_fn(lam, mu)
    return TensorField(n, "lambda_mu", fn, batch, {"lambda": lam, "mu": mu})


def tensor_d(n: int) -> TensorField:
    """``sum_i X^i Y^i / p(i)^2``."""
    fn, batch = _lm_fn(1, 0)
    return TensorField(n, "Ad", fn, batch, {"lambda": 1, "mu": 0})


def tensor_s(n: int) -> TensorField:
    """``(sum_i X^i / p(i)) (sum_j Y^j / p(j))``; computed as a product of two sums."""
    fn, batch = _lm_fn(0, 1)
    return TensorField(n, "As", fn, batch, {"lambda": 0, "mu": 1})


def custom(n: int, fn: RawFn, name: str = "custom") -> TensorField:
    """Wrap a raw evaluator ``fn(w, x, y)``. Symmetry and bilinearity are the caller's job."""
    return TensorField(n, "custom", fn, None, {"name": name})


def scaled(T: TensorField, c) -> TensorField:
    """``c * T``."""
    def fn(w, x, y):
        return _lift(c, (w, x, y)) * T.fn(w, x, y)

    batch = None
    if T.batch is not None:
        cf = float(c)

        def batch(W, X, Y):
            return cf * T.batch(W, X, Y)

    return TensorField(T.n, "custom", fn, batch, {"name": "scaled", "scale": c, "inner": T})


def pullback(T: TensorField, f: EmbeddingMap) -> TensorField:
    """``(p, X, Y) -> T(f(p), df X, df Y)`` on ``P_{f.n_dom}``."""
    if T.n != f.n_cod:
        raise DimensionMismatch(f"tensor lives on P_{T.n}, map lands in P_{f.n_cod}")

    def fn(w, x, y):
        return T.fn(f.matvec(w), f.matvec(x), f.matvec(y))

    def batch(W, X, Y):
        return T.eval_batch(f.matvec_batch(W), f.matvec_batch(X), f.matvec_batch(Y))

    return TensorField(f.n_dom, "pullback", fn, batch,
                       {"inner": T, "stages": [s.to_dict() for s in f.stages]})


def gram(T: TensorField, p: SimplexPoint) -> np.ndarray:
    """Matrix of ``T`` at ``p`` in the basis ``Z_i - Z_{n+1}``, ``i = 1..n``.

    With ``c`` the Z-coordinates of ``X`` and ``d`` those of ``Y``,
    ``T(X, Y) = c @ G @ d``.
    """
    if T.n != p.n:
        raise DimensionMismatch(f"tensor lives on P_{T.n}, point on P_{p.n}")
    n = p.n
    basis = [e_diff(n, i, n + 1, p.exact) for i in range(1, n + 1)]
    dtype = object if p.exact else np.float64
    G = np.empty((n, n), dtype=dtype)
    for i in range(n):
        for j in range(i, n):
            G[i, j] = G[j, i] = T.eval(p, basis[i], basis[j])
    return G


@dataclass(frozen=True, eq=False)
class ConeMetric:
    """Metric ``lam(h) h / x^i delta_ij + mu(h)`` on the positive orthant, ``h = sum x``.

    ``lambda_fn`` and ``mu_fn`` are user functions of one real variable.
    Positivity can only be spot-checked; see :meth:`check_positivity`.
    """

    lambda_fn: Callable[[float], float]
    mu_fn: Callable[[float], float]
    source: dict = field(default_factory=dict)

    def check_positivity(self, ts=None, warn: bool = True) -> list:
        """Return sampled ``t`` where ``lam(t) > 0`` or ``lam(t) + mu(t) > 0`` fails."""
        if ts is None:
            ts = np.geomspace(1e-3, 1e3, 61)
        bad = []
        for t in ts:
            lt = self.lambda_fn(t)
            if not (lt > 0 and lt + self.mu_fn(t) > 0):
                bad.append(float(t))
        if bad and warn:
            warnings.warn(f"cone metric positivity fails at t in {bad[:5]}", RuntimeWarning,
                          stacklevel=2)
        return bad


def _cone_raw(g: ConeMetric, x, U, V):
    if any(not v > 0 for v in x):
        raise NonPositiveCoordinate("cone point must have strictly positive coordinates")
    if _float_inputs(x, U, V):
        h, diag, su, sv = kernels.cone_terms(np.ascontiguousarray(x, dtype=np.float64),
                                             np.ascontiguousarray(U, dtype=np.float64),
                                             np.ascontiguousarray(V, dtype=np.float64))
        return g.lambda_fn(h) * diag + g.mu_fn(h) * su * sv
    h = x.sum()
    return g.lambda_fn(h) * (h / x * U * V).sum() + g.mu_fn(h) * U.sum() * V.sum()


def cone_eval(g: ConeMetric, x, U, V):
    """Evaluate ``g`` at the cone point ``x`` on ambient vectors ``U`` and ``V``."""
    x, U, V = as_vector(x), as_vector(U), as_vector(V)
    if not x.shape == U.shape == V.shape:
        raise DimensionMismatch(f"shapes {x.shape}, {U.shape}, {V.shape} differ")
    return scalar(_cone_raw(g, x, U, V))


def iota_pullback(g: ConeMetric, n: int) -> TensorField:
    """Restriction of ``g`` to ``P_n`` sitting inside the cone ``R_+^{n+1}``."""
    return TensorField(n, "cone_restricted", lambda w, x, y: _cone_raw(g, w, x, y),
                       None, {"via": "iota"})


def j_pullback(g: ConeMetric, n: int) -> TensorField:
    """Pullback of ``g`` on ``R_+^{n+1}`` to ``P_{n+1}`` by dropping the last coordinate."""
    m = n + 1

    def fn(w, x, y):
        return _cone_raw(g, w[:m], x[:m], y[:m])

    return TensorField(n + 1, "cone_restricted", fn, None, {"via": "j"})

