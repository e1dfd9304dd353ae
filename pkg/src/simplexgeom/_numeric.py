"""Dual float / exact-rational array helpers.

Float data lives in read-only ``float64`` arrays. Exact data lives in
read-only ``object`` arrays of :class:`fractions.Fraction`; numpy's elementwise
arithmetic and ``@`` work on those unchanged, so most formulas are written once.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational

import numpy as np


def is_exact_scalar(v) -> bool:
    return isinstance(v, Rational) and not isinstance(v, bool)


def to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, Integral):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v.strip())
    return Fraction(v)


def as_vector(values, exact: bool | None = None) -> np.ndarray:
    """Return a read-only 1-D array.

    With ``exact=None`` the array is rational when at least one entry is a
    Fraction and no entry is a float; plain integers alone give floats.
    """
    if isinstance(values, np.ndarray) and exact is None:
        if values.dtype == object:
            exact = True
        else:
            exact = False
    if exact is None:
        seq = list(values)
        exact = any(isinstance(v, Fraction) for v in seq) and all(
            is_exact_scalar(v) for v in seq
        )
        values = seq
    if exact:
        arr = np.array([to_fraction(v) for v in np.asarray(values, dtype=object).ravel()],
                       dtype=object)
    else:
        arr = np.array(values, dtype=np.float64).ravel()
    arr.flags.writeable = False
    return arr


def as_matrix(values, exact: bool | None = None) -> np.ndarray:
    if exact is None:
        if isinstance(values, np.ndarray):
            exact = values.dtype == object
        else:
            flat = [v for row in values for v in row]
            exact = any(isinstance(v, Fraction) for v in flat) and all(
                is_exact_scalar(v) for v in flat
            )
    if exact:
        rows = [[to_fraction(v) for v in row] for row in values]
        arr = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
        for i, row in enumerate(rows):
            arr[i, :] = row
    else:
        arr = np.array(values, dtype=np.float64, order="C")
    arr.flags.writeable = False
    return arr


def is_exact(arr: np.ndarray) -> bool:
    return arr.dtype == object


def zero_like(arr: np.ndarray):
    return Fraction(0) if is_exact(arr) else 0.0


def scalar(v):
    """Collapse numpy scalars to Python ``float``; Fractions pass through."""
    if isinstance(v, Fraction):
        return v
    return float(v)
