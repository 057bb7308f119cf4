"""Quadrature and finite differences on uniform grids."""

import numpy as np
from scipy import integrate


def simpson(values: np.ndarray, dx: float) -> float:
    """Composite Simpson over node values (odd interval counts use scipy's end correction)."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] < 3:
        return float(integrate.trapezoid(values, dx=dx, axis=0))
    return float(integrate.simpson(values, dx=dx, axis=0))


def cumulative(values: np.ndarray, dx: float, initial: float = 0.0) -> np.ndarray:
    """Running integral from the first node; ``out[0] == initial``.

    Works along axis 0, so ``(n, 3)`` tangent arrays integrate to positions.
    """
    values = np.asarray(values, dtype=float)
    if values.shape[0] < 3:
        out = integrate.cumulative_trapezoid(values, dx=dx, axis=0, initial=0)
    else:
        out = integrate.cumulative_simpson(values, dx=dx, axis=0, initial=0)
    return out + initial


def central_difference(values: np.ndarray, dx: float) -> np.ndarray:
    """Second-order derivative estimate on every node (one-sided at the ends)."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] < 3:
        return np.gradient(values, dx, axis=0)
    return np.gradient(values, dx, axis=0, edge_order=2)
