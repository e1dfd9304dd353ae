"""Tolerance record shared by constructors and checkers."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances.

    ``construction`` bounds how far a weight vector may be from summing to one
    (and a tangent vector from summing to zero) before it is rejected.
    ``comparison`` is the default relative tolerance used by checks.
    Rational inputs ignore both and are held to exact equality.
    """

    construction: float = 1e-12
    comparison: float = 1e-9


DEFAULT_TOL = Tolerances()
