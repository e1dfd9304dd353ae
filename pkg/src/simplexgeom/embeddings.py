"""Markov and patched Markov embeddings between simplices.

Every embedding ``P_n -> P_m`` is stored as an ``(m+1) x (n+1)``
column-stochastic matrix plus a flat record of the stages that built it.
Column ``i`` of the matrix is the probability measure ``Q_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from ._numeric import as_matrix, as_vector, is_exact, to_fraction
from .config import DEFAULT_TOL, Tolerances
from .errors import (
    DimensionMismatch,
    IdenticalIndices,
    IndexOutOfRange,
    InvalidPartition,
    InvalidPatch,
    OutOfRange,
)
from .simplex import SimplexPoint, TangentVector, make_point


@dataclass(frozen=True)
class Stage:
    """One factor of an embedding.

    ``kind`` is ``"identity"``, ``"partition"``, ``"patch"`` or
    ``"scalar_patch"``; only the fields relevant to the kind are set.
    """

    kind: str
    n_dom: int
    n_cod: int
    alpha: object = None
    sigma: tuple | None = None
    a: tuple | None = None
    kappa: tuple | None = None
    q: tuple | None = None

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "n_dom": self.n_dom, "n_cod": self.n_cod}
        for name in ("alpha", "sigma", "a", "kappa", "q"):
            v = getattr(self, name)
            if v is not None:
                d[name] = _jsonable(v)
        return d


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.integer, int)):
        return int(v)
    return float(v)


def _check_perm(sigma: Sequence[int], size: int, err=InvalidPatch) -> tuple:
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(1, size + 1)):
        raise err(f"{list(sigma)} is not a permutation of 1..{size}")
    return sigma


@dataclass(frozen=True, eq=False)
class MarkovPartition:
    """Probability measures ``Q_1..Q_{n+1}`` on ``Omega_{N+1}`` with disjoint supports.

    ``kappa[I-1]`` is the block that owns outcome ``I`` and ``q[I-1]`` is
    ``Q_{kappa(I)}(I)``.
    """

    n: int
    N: int
    kappa: tuple
    q: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        n, N = self.n, self.N
        if not 1 <= n <= N:
            raise InvalidPartition(f"need 1 <= n <= N, got n={n}, N={N}")
        kappa = tuple(int(k) for k in self.kappa)
        q = as_vector(self.q)
        if len(kappa) != N + 1 or q.shape[0] != N + 1:
            raise InvalidPartition(f"kappa and q must have length {N + 1}")
        if any(not 1 <= k <= n + 1 for k in kappa):
            raise InvalidPartition(f"kappa values must lie in 1..{n + 1}")
        if set(kappa) != set(range(1, n + 2)):
            raise InvalidPartition("kappa is not surjective: some Q_i has empty support")
        if any(not v > 0 for v in q):
            raise InvalidPartition("q must be strictly positive on every support")
        for i in range(1, n + 2):
            s = sum((q[I] for I in range(N + 1) if kappa[I] == i), q[0] * 0)
            if is_exact(q):
                ok = s == 1
            else:
                ok = abs(s - 1.0) <= self.tol.construction
            if not ok:
                raise InvalidPartition(f"Q_{i} has total mass {s}, not 1")
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "q", q)

    def measure(self, i: int) -> np.ndarray:
        """``Q_i`` as a vector over ``Omega_{N+1}``."""
        zero = Fraction(0) if is_exact(self.q) else 0.0
        return np.array([self.q[I] if self.kappa[I] == i else zero
                         for I in range(self.N + 1)], dtype=self.q.dtype)

    def to_dict(self) -> dict:
        return {"n": self.n, "N": self.N, "kappa": list(self.kappa),
                "q": [_jsonable(v) for v in self.q]}


@dataclass(frozen=True, eq=False)
class MarkovPatch:
    """``Q_i = a_i delta_sigma(i) + (1 - a_i) delta_sigma(n+2)`` for ``i <= n+1``.

    ``sigma`` is stored as the tuple ``(sigma(1), ..., sigma(n+2))``.
    """

    n: int
    sigma: tuple
    a: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidPatch(f"n must be >= 1, got {self.n}")
        sigma = _check_perm(self.sigma, self.n + 2)
        a = as_vector(self.a)
        if a.shape[0] != self.n + 1:
            raise InvalidPatch(f"a must have length {self.n + 1}")
        if any(not 0 < v < 1 for v in a):
            raise InvalidPatch("every a_i must lie in (0, 1)")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "a", a)

    @property
    def is_scalar(self) -> bool:
        return is_scalar(self)

    def to_dict(self) -> dict:
        return {"n": self.n, "sigma": list(self.sigma), "a": [_jsonable(v) for v in self.a]}


def is_scalar(patch: MarkovPatch, tol: Tolerances | None = None) -> bool:
    """True when all ``a_i`` coincide (exactly for rational patches)."""
    a = patch.a
    spread = max(a) - min(a)
    if is_exact(a):
        return spread == 0
    tol = tol or patch.tol
    return spread <= tol.construction


@dataclass(frozen=True, eq=False)
class EmbeddingMap:
    """Column-stochastic linear map ``P_{n_dom} -> P_{n_cod}``.

    ``stages`` lists the factors in the order they are applied.
    """

    n_dom: int
    n_cod: int
    M: np.ndarray
    stages: tuple = ()
    M_float: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        M = as_matrix(self.M)
        if M.shape != (self.n_cod + 1, self.n_dom + 1):
            raise DimensionMismatch(
                f"matrix shape {M.shape} does not match "
                f"({self.n_cod + 1}, {self.n_dom + 1})")
        if is_exact(M):
            if any(v < 0 for v in M.ravel()):
                raise OutOfRange("embedding matrix has negative entries")
            if any(M[:, k].sum() != 1 for k in range(M.shape[1])):
                raise OutOfRange("embedding matrix is not column-stochastic")
            Mf = np.array(M, dtype=np.float64)
        else:
            if (M < 0).any():
                raise OutOfRange("embedding matrix has negative entries")
            if not np.allclose(M.sum(axis=0), 1.0, rtol=0, atol=1e-12):
                raise OutOfRange("embedding matrix is not column-stochastic")
            Mf = M
        Mf.flags.writeable = False
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "M_float", Mf)
        object.__setattr__(self, "stages", tuple(self.stages))

    @property
    def exact(self) -> bool:
        return is_exact(self.M)

    @property
    def scalar_alphas(self) -> list:
        """``alpha`` of each scalar-patch stage, in application order."""
        return [s.alpha for s in self.stages if s.kind == "scalar_patch"]

    def matvec(self, v: np.ndarray) -> np.ndarray:
        if is_exact(v) and self.exact:
            return self.M @ v
        if is_exact(v):
            v = np.array(v, dtype=np.float64)
        return kernels.stoch_apply(self.M_float, v)

    def matvec_batch(self, V: np.ndarray) -> np.ndarray:
        """Apply to every row of a 2-D float array."""
        return kernels.stoch_apply_batch(self.M_float, np.ascontiguousarray(V, dtype=np.float64))


def identity_embedding(n: int, exact: bool = False) -> EmbeddingMap:
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    M = [[one if r == c else zero for c in range(n + 1)] for r in range(n + 1)]
    return EmbeddingMap(n, n, as_matrix(M, exact), (Stage("identity", n, n),))


def markov_embedding(part: MarkovPartition) -> EmbeddingMap:
    """``p -> sum_i p(i) Q_i``; column ``i`` is ``Q_i``."""
    cols = [part.measure(i) for i in range(1, part.n + 2)]
    M = np.stack(cols, axis=1)
    stage = Stage("partition", part.n, part.N, kappa=part.kappa, q=tuple(part.q))
    return EmbeddingMap(part.n, part.N, as_matrix(M, is_exact(part.q)), (stage,))


def permutation_embedding(n: int, perm: Sequence[int], exact: bool = False) -> EmbeddingMap:
    """Relabeling ``P_n -> P_n`` sending outcome ``i`` to ``perm[i-1]``.

    It is the Markov embedding of the partition ``Q_i = delta_perm(i)``.
    """
    perm = _check_perm(perm, n + 1, IndexOutOfRange)
    kappa = [0] * (n + 1)
    for i, target in enumerate(perm, start=1):
        kappa[target - 1] = i
    one = Fraction(1) if exact else 1.0
    return markov_embedding(MarkovPartition(n, n, tuple(kappa), [one] * (n + 1)))


def patched_embedding(patch: MarkovPatch) -> EmbeddingMap:
    n, sigma, a = patch.n, patch.sigma, patch.a
    exact = is_exact(a)
    zero = Fraction(0) if exact else 0.0
    M = [[zero] * (n + 1) for _ in range(n + 2)]
    for i in range(n + 1):
        M[sigma[i] - 1][i] = a[i]
        M[sigma[n + 1] - 1][i] = 1 - a[i]
    if is_scalar(patch):
        stage = Stage("scalar_patch", n, n + 1, alpha=a[0], sigma=sigma)
    else:
        stage = Stage("patch", n, n + 1, sigma=sigma, a=tuple(a))
    return EmbeddingMap(n, n + 1, as_matrix(M, exact), (stage,))


def scalar_patched(n: int, alpha, sigma: Sequence[int] | None = None) -> EmbeddingMap:
    """``G_n^{alpha, sigma}``: ``p -> alpha sum p(i) delta_sigma(i) + (1 - alpha) delta_sigma(n+2)``.

    ``sigma`` defaults to the identity. A Fraction ``alpha`` gives an exact map.
    """
    if not 0 < alpha < 1:
        raise OutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    if sigma is None:
        sigma = tuple(range(1, n + 3))
    exact = isinstance(alpha, Fraction)
    a = [alpha] * (n + 1) if exact else [float(alpha)] * (n + 1)
    f = patched_embedding(MarkovPatch(n, tuple(sigma), as_vector(a, exact)))
    stage = Stage("scalar_patch", n, n + 1, alpha=alpha if exact else float(alpha),
                  sigma=tuple(int(s) for s in sigma))
    return EmbeddingMap(f.n_dom, f.n_cod, f.M, (stage,))


def apply(f: EmbeddingMap, p: SimplexPoint, tol: Tolerances = DEFAULT_TOL) -> SimplexPoint:
    if p.n != f.n_dom:
        raise DimensionMismatch(f"map expects a point of P_{f.n_dom}, got P_{p.n}")
    return make_point(f.n_cod, f.matvec(p.w), tol)


def differential(f: EmbeddingMap, X: TangentVector) -> TangentVector:
    """The map is linear, so its differential is the same matrix acting on tangents."""
    if X.n != f.n_dom:
        raise DimensionMismatch(f"map expects a tangent of P_{f.n_dom}, got P_{X.n}")
    return TangentVector(f.n_cod, as_vector(f.matvec(X.x)))


def compose(f: EmbeddingMap, g: EmbeddingMap) -> EmbeddingMap:
    """``f o g`` (``g`` first)."""
    if f.n_dom != g.n_cod:
        raise DimensionMismatch(f"cannot compose P_{g.n_cod} output with P_{f.n_dom} input")
    if f.exact and g.exact:
        M = f.M @ g.M
    else:
        M = f.M_float @ g.M_float
    return EmbeddingMap(g.n_dom, f.n_cod, M, g.stages + f.stages)


def compose_all(maps: Sequence[EmbeddingMap]) -> EmbeddingMap:
    """Compose maps given in application order."""
    out = maps[0]
    for m in maps[1:]:
        out = compose(m, out)
    return out


def _chain(pp: list, start: int, last_sigma: tuple, exact: bool) -> list:
    """Scalar patches ``G_start, ..., G_{n-1}`` carrying the first ``start + 1`` weights of ``pp``.

    ``pp`` is a point of ``P_n`` (already relabeled). Returns the stage maps in
    application order; the last one uses ``last_sigma`` to undo the relabeling.
    """
    n = len(pp) - 1
    alphas = {}
    prod = None
    for k in range(n - 1, start - 1, -1):
        if k == n - 1:
            alphas[k] = 1 - pp[n]
            prod = alphas[k]
        else:
            alphas[k] = 1 - pp[k + 1] / prod
            prod = prod * alphas[k]
    maps = []
    for k in range(start, n):
        sigma = last_sigma if k == n - 1 else None
        maps.append(scalar_patched(k, alphas[k], sigma))
    return maps


def _relabel(n: int, head: Sequence[int]) -> tuple:
    rest = [k for k in range(1, n + 2) if k not in head]
    return tuple(head) + tuple(rest)


def _check_indices(n: int, idx: Sequence[int]):
    for i in idx:
        if not 1 <= i <= n + 1:
            raise IndexOutOfRange(f"index {i} outside 1..{n + 1}")
    if len(set(idx)) != len(idx):
        raise IdenticalIndices(f"indices {list(idx)} are not distinct")


def h_ij(p: SimplexPoint, i: int, j: int) -> tuple[EmbeddingMap, object]:
    """Composite of scalar patches ``H: P_1 -> P_n`` through ``p`` along ``Z_i - Z_j``.

    Returns ``(H, u)`` with ``u = p(i) / (p(i) + p(j))``, ``H(p_u) = p`` and
    ``dH(Z_1^1) = (p(i) + p(j)) / 2 * (Z_i - Z_j)``.

    The chain is built for the relabeled point ``p o pi`` with
    ``pi = (i, j, rest...)``; the relabeling is folded into the permutation of
    the last stage. For ``n = 1`` the result is the identity, or the swap when
    ``(i, j) = (2, 1)``.
    """
    n = p.n
    _check_indices(n, (i, j))
    s = p[i] + p[j]
    u = p[i] / s
    if n == 1:
        H = identity_embedding(1, p.exact) if (i, j) == (1, 2) else \
            permutation_embedding(1, (2, 1), p.exact)
        return H, u
    pi = _relabel(n, (i, j))
    pp = [p[k] for k in pi]
    return compose_all(_chain(pp, 1, pi, p.exact)), u


def h_ijk(p: SimplexPoint, i: int, j: int, k: int) -> tuple[EmbeddingMap, SimplexPoint]:
    """Composite of scalar patches ``H: P_2 -> P_n`` through ``p`` spanning ``Z_i - Z_j``, ``Z_i - Z_k``.

    Returns ``(H, q)`` with ``q = (p(i), p(j), p(k)) / (p(i) + p(j) + p(k))``,
    ``H(q) = p``, ``dH(Z_1 - Z_2) = s (Z_i - Z_j)`` and
    ``dH(Z_1 - Z_3) = s (Z_i - Z_k)`` where ``s = p(i) + p(j) + p(k)``.
    For ``n = 2`` the result is a relabeling (identity for ``(1, 2, 3)``).
    """
    n = p.n
    if n < 2:
        raise OutOfRange("h_ijk needs a point of P_n with n >= 2")
    _check_indices(n, (i, j, k))
    s = p[i] + p[j] + p[k]
    q = make_point(2, [p[i] / s, p[j] / s, p[k] / s])
    pi = _relabel(n, (i, j, k))
    if n == 2:
        if pi == (1, 2, 3):
            return identity_embedding(2, p.exact), q
        return permutation_embedding(2, pi, p.exact), q
    pp = [p[m] for m in pi]
    return compose_all(_chain(pp, 2, pi, p.exact)), q


def random_permutation(size: int, rng: np.random.Generator) -> tuple:
    return tuple(int(v) + 1 for v in rng.permutation(size))


def random_alpha(rng: np.random.Generator, exact: bool = False, low: float = 0.05,
                 high: float = 0.95):
    if exact:
        return Fraction(int(rng.integers(1, 20)), 20)
    return float(rng.uniform(low, high))


def random_scalar_patched(n: int, rng: np.random.Generator, exact: bool = False) -> EmbeddingMap:
    return scalar_patched(n, random_alpha(rng, exact), random_permutation(n + 2, rng))


def random_patch(n: int, rng: np.random.Generator, scalar: bool = False,
                 exact: bool = False, min_spread: float = 1e-3) -> MarkovPatch:
    """Random patch; non-scalar ones have ``max(a) - min(a) >= min_spread``."""
    sigma = random_permutation(n + 2, rng)
    if scalar:
        a = [random_alpha(rng, exact)] * (n + 1)
        return MarkovPatch(n, sigma, as_vector(a, exact))
    while True:
        a = [random_alpha(rng, exact) for _ in range(n + 1)]
        if max(a) - min(a) >= min_spread:
            return MarkovPatch(n, sigma, as_vector(a, exact))


def random_partition(n: int, N: int, rng: np.random.Generator,
                     exact: bool = False) -> MarkovPartition:
    if not 1 <= n <= N:
        raise InvalidPartition(f"need 1 <= n <= N, got n={n}, N={N}")
    order = rng.permutation(N + 1)
    kappa = [0] * (N + 1)
    for pos, I in enumerate(order):
        kappa[I] = pos + 1 if pos <= n else int(rng.integers(1, n + 2))
    raw = rng.integers(1, 10, size=N + 1) if exact else rng.uniform(0.1, 1.0, size=N + 1)
    q = []
    for I in range(N + 1):
        block = sum(raw[J] for J in range(N + 1) if kappa[J] == kappa[I])
        q.append(Fraction(int(raw[I]), int(block)) if exact else raw[I] / block)
    return MarkovPartition(n, N, tuple(kappa), as_vector(q, exact))


def _num(v, exact: bool):
    if exact:
        return to_fraction(v)
    if isinstance(v, str):
        return float(Fraction(v))
    return float(v)


def partition_from_dict(d: dict, exact: bool = False) -> MarkovPartition:
    """Build a partition from ``{"n", "N", "kappa", "q"}``."""
    q = as_vector([_num(v, exact) for v in d["q"]], exact)
    return MarkovPartition(int(d["n"]), int(d["N"]), tuple(int(k) for k in d["kappa"]), q)


def patch_from_dict(d: dict, exact: bool = False) -> MarkovPatch:
    """Build a patch from ``{"n", "sigma", "a"}``."""
    a = as_vector([_num(v, exact) for v in d["a"]], exact)
    return MarkovPatch(int(d["n"]), tuple(int(s) for s in d["sigma"]), a)
