"""Points of the open simplex, tangent vectors and the Z frame.

A point of ``P_n`` is a strictly positive weight vector over the ``n + 1``
outcomes ``1..n+1``; a tangent vector is written through its ambient
components, which sum to zero. Indices in the public API are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._numeric import as_vector, is_exact, to_fraction
from .config import DEFAULT_TOL, Tolerances
from .errors import (
    DimensionMismatch,
    IdenticalIndices,
    IndexOutOfRange,
    NonPositiveWeight,
    NotNormalized,
    NotTangent,
    OutOfRange,
)


@dataclass(frozen=True, eq=False)
class SimplexPoint:
    """A validated point of ``P_n``. Build it with :func:`make_point`."""

    n: int
    w: np.ndarray

    @property
    def exact(self) -> bool:
        return is_exact(self.w)

    def __getitem__(self, i: int):
        """Weight of outcome ``i`` (1-based)."""
        return self.w[_index(self.n, i)]

    def __repr__(self):
        return f"SimplexPoint(n={self.n}, w={list(self.w)!r})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Tangent vector at a point of ``P_n`` given by its ambient components."""

    n: int
    x: np.ndarray

    @property
    def exact(self) -> bool:
        return is_exact(self.x)

    def __getitem__(self, i: int):
        return self.x[_index(self.n, i)]

    def __add__(self, other: TangentVector) -> TangentVector:
        _same_dim(self.n, other.n)
        return _tangent(self.n, self.x + other.x)

    def __sub__(self, other: TangentVector) -> TangentVector:
        _same_dim(self.n, other.n)
        return _tangent(self.n, self.x - other.x)

    def __neg__(self) -> TangentVector:
        return _tangent(self.n, -self.x)

    def __mul__(self, c) -> TangentVector:
        if self.exact and isinstance(c, (int, Fraction)):
            c = to_fraction(c)
        return _tangent(self.n, self.x * c)

    __rmul__ = __mul__

    def __truediv__(self, c) -> TangentVector:
        if self.exact and isinstance(c, (int, Fraction)):
            c = to_fraction(c)
        return _tangent(self.n, self.x / c)

    def __repr__(self):
        return f"TangentVector(n={self.n}, x={list(self.x)!r})"


@dataclass(frozen=True, eq=False)
class ZCoordinates:
    """Coefficients of a tangent vector in the basis ``Z_i - Z_{n+1}``, ``i <= n``."""

    n: int
    c: np.ndarray


def _index(n: int, i: int) -> int:
    if not 1 <= i <= n + 1:
        raise IndexOutOfRange(f"index {i} outside 1..{n + 1}")
    return i - 1


def _same_dim(a: int, b: int):
    if a != b:
        raise DimensionMismatch(f"dimension {a} != {b}")


def _tangent(n: int, x: np.ndarray) -> TangentVector:
    # internal: caller guarantees the sum-zero constraint
    x = as_vector(x)
    return TangentVector(n, x)


def make_point(n: int, w, tol: Tolerances = DEFAULT_TOL) -> SimplexPoint:
    """Validate ``w`` as a point of ``P_n``.

    Rational weights must sum to exactly one; float weights within
    ``tol.construction``. Nothing is renormalized.
    """
    if n < 1:
        raise OutOfRange(f"n must be >= 1, got {n}")
    w = as_vector(w)
    if w.shape[0] != n + 1:
        raise DimensionMismatch(f"expected {n + 1} weights, got {w.shape[0]}")
    bad = [i + 1 for i, v in enumerate(w) if not v > 0]
    if bad:
        raise NonPositiveWeight(f"weights at {bad} are not positive")
    total = w.sum()
    if is_exact(w):
        if total != 1:
            raise NotNormalized(f"weights sum to {total}, not 1")
    elif not abs(total - 1.0) <= tol.construction:
        raise NotNormalized(f"weights sum to {total!r}, not 1")
    return SimplexPoint(n, w)


def make_tangent(n: int, x, tol: Tolerances = DEFAULT_TOL) -> TangentVector:
    """Validate ``x`` as ambient components of a tangent vector on ``P_n``.

    Float vectors pass when ``|sum x| <= tol.construction * max(1, sum |x|)``.
    """
    x = as_vector(x)
    if x.shape[0] != n + 1:
        raise DimensionMismatch(f"expected {n + 1} components, got {x.shape[0]}")
    total = x.sum()
    if is_exact(x):
        if total != 0:
            raise NotTangent(f"components sum to {total}, not 0")
    else:
        scale = max(1.0, float(np.abs(x).sum()))
        if not abs(total) <= tol.construction * scale:
            raise NotTangent(f"components sum to {total!r}, not 0")
    return TangentVector(n, x)


def barycenter(n: int, exact: bool = False) -> SimplexPoint:
    if n < 1:
        raise OutOfRange(f"n must be >= 1, got {n}")
    v = Fraction(1, n + 1) if exact else 1.0 / (n + 1)
    return SimplexPoint(n, as_vector([v] * (n + 1), exact))


def point_of_u(u) -> SimplexPoint:
    """The point ``(u, 1 - u)`` of ``P_1``; exact when ``u`` is a Fraction."""
    if not 0 < u < 1:
        raise OutOfRange(f"u must lie in (0, 1), got {u}")
    if isinstance(u, Fraction):
        return SimplexPoint(1, as_vector([u, 1 - u], True))
    u = float(u)
    return SimplexPoint(1, as_vector([u, 1.0 - u], False))


def z_basis(n: int, i: int, exact: bool = False) -> TangentVector:
    """``Z_i^n``: ambient components ``delta_ji - 1/(n+1)``."""
    k = _index(n, i)
    if exact:
        x = [Fraction(-1, n + 1)] * (n + 1)
        x[k] = Fraction(n, n + 1)
        return TangentVector(n, as_vector(x, True))
    x = np.full(n + 1, -1.0 / (n + 1))
    x[k] = n / (n + 1)
    return _tangent(n, x)


def e_diff(n: int, i: int, j: int, exact: bool = False) -> TangentVector:
    """``Z_i^n - Z_j^n``, whose ambient components are ``e_i - e_j``."""
    a, b = _index(n, i), _index(n, j)
    if a == b:
        raise IdenticalIndices(f"need distinct indices, got {i} twice")
    x = [Fraction(0)] * (n + 1) if exact else np.zeros(n + 1)
    x[a] += 1
    x[b] -= 1
    return TangentVector(n, as_vector(x, exact))


def from_z_coords(c: ZCoordinates) -> TangentVector:
    cv = c.c
    last = -cv.sum()
    x = np.concatenate([cv, np.array([last], dtype=cv.dtype)])
    return TangentVector(c.n, as_vector(x, is_exact(cv)))


def to_z_coords(X: TangentVector) -> ZCoordinates:
    return ZCoordinates(X.n, as_vector(X.x[: X.n], X.exact))


def z_coords(n: int, c) -> ZCoordinates:
    c = as_vector(c)
    if c.shape[0] != n:
        raise DimensionMismatch(f"expected {n} coordinates, got {c.shape[0]}")
    return ZCoordinates(n, c)


def random_point(n: int, rng: np.random.Generator, margin: float = 1e-3,
                 exact: bool = False) -> SimplexPoint:
    """Uniform (Dirichlet(1)) sample squeezed so every weight is at least ``margin``.

    Exact samples are rational with small denominators; ``margin`` is then
    ignored (every weight is at least 1/(50 (n+1)))).
    """
    if exact:
        k = rng.integers(1, 51, size=n + 1)
        total = int(k.sum())
        return SimplexPoint(n, as_vector([Fraction(int(v), total) for v in k], True))
    if margin * (n + 1) >= 1:
        raise OutOfRange(f"margin {margin} too large for n={n}")
    d = rng.dirichlet(np.ones(n + 1))
    w = margin + (1.0 - margin * (n + 1)) * d
    w /= w.sum()
    return SimplexPoint(n, as_vector(w, False))


def random_tangent(n: int, rng: np.random.Generator, exact: bool = False) -> TangentVector:
    if exact:
        k = [Fraction(int(v)) for v in rng.integers(-10, 11, size=n + 1)]
        mean = sum(k, Fraction(0)) / (n + 1)
        return TangentVector(n, as_vector([v - mean for v in k], True))
    x = rng.standard_normal(n + 1)
    x -= x.mean()
    return TangentVector(n, as_vector(x, False))


def random_points(n: int, k: int, rng: np.random.Generator, margin: float = 1e-3) -> np.ndarray:
    """``k`` float samples as rows, drawn like :func:`random_point`."""
    if margin * (n + 1) >= 1:
        raise OutOfRange(f"margin {margin} too large for n={n}")
    W = margin + (1.0 - margin * (n + 1)) * rng.dirichlet(np.ones(n + 1), size=k)
    return W / W.sum(axis=1, keepdims=True)


def random_tangents(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """``k`` float tangent vectors as rows, drawn like :func:`random_tangent`."""
    X = rng.standard_normal((k, n + 1))
    return X - X.mean(axis=1, keepdims=True)
