"""Rationality detection for closure and periodicity verdicts.

Exact inputs (ints, Fractions, rational sympy numbers) are decided exactly.
Floats are matched against the best rational approximation with a bounded
denominator and reported as "numeric". A float only counts as rational when
that approximation lies inside the window and does not change when the
denominator bound is raised a hundredfold; irrationals keep improving.
"""

import logging
from fractions import Fraction
from numbers import Rational
from typing import Literal, Optional, Tuple

import numpy as np
import sympy

logger = logging.getLogger(__name__)

Method = Literal["exact", "numeric"]

STABILITY_FACTOR = 100


def is_exact(x) -> bool:
    if isinstance(x, (bool, float)):
        return False
    if isinstance(x, Rational):
        return True
    return isinstance(x, sympy.Basic) and bool(x.is_number)


def exact_value(x) -> sympy.Expr:
    if isinstance(x, sympy.Basic):
        return x
    if isinstance(x, Fraction):
        return sympy.Rational(x.numerator, x.denominator)
    return sympy.Integer(int(x))


def rational_ratio_exact(numerator, denominator) -> Tuple[bool, Optional[Fraction]]:
    """Decide whether numerator/denominator is rational using sympy arithmetic."""
    ratio = sympy.simplify(exact_value(numerator) / exact_value(denominator))
    if ratio.is_rational:
        p, q = sympy.fraction(ratio)
        return True, Fraction(int(p), int(q))
    return False, None


def approximate_fraction(x: float, max_denominator: int, window: float) -> Optional[Fraction]:
    """Bounded-denominator rational for x, or None if x looks irrational."""
    exact = Fraction(float(x))
    candidate = exact.limit_denominator(max_denominator)
    if abs(float(candidate) - x) > window * max(1.0, abs(x)):
        logger.debug(f"{x!r} is not within {window:g} of any fraction with denominator <= {max_denominator}")
        return None
    if exact.limit_denominator(STABILITY_FACTOR * max_denominator) != candidate:
        logger.debug(f"{x!r}: approximation {candidate} is not stable under a larger denominator bound")
        return None
    return candidate


def precession_ratio(omega, mu, max_denominator: int, window: float) -> Tuple[bool, Optional[Fraction], Method]:
    """Rationality of μ/α with α = √(ω² + μ²)."""
    if is_exact(omega) and is_exact(mu):
        w, m = exact_value(omega), exact_value(mu)
        rational, frac = rational_ratio_exact(m, sympy.sqrt(w**2 + m**2))
        return rational, frac, "exact"
    w, m = float(omega), float(mu)
    frac = approximate_fraction(m / float(np.hypot(w, m)), max_denominator, window)
    return frac is not None, frac, "numeric"
