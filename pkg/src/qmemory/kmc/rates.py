"""Bath rate function gamma(omega) = omega / (1 - exp(-beta*omega))."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

UNDERFLOW_CUT = -30.0
SERIES_CUT = 1e-6


class InvalidParameter(ValueError):
    pass


@njit(cache=True)
def gamma_scalar(omega, beta):
    x = beta * omega
    if x < UNDERFLOW_CUT:
        return abs(omega) * math.exp(x)
    if abs(x) < SERIES_CUT:
        return 1.0 / beta + 0.5 * omega
    return omega / (-math.expm1(-x))


def gamma(omega, beta):
    """Vectorized rate; scalar in, scalar out."""
    if not beta > 0:
        raise InvalidParameter(f"beta must be positive, got {beta}")
    w = np.asarray(omega, dtype=float)
    x = beta * w
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        out = np.where(x < UNDERFLOW_CUT, np.abs(w) * np.exp(np.minimum(x, 0.0)),
                       np.where(np.abs(x) < SERIES_CUT, 1.0 / beta + 0.5 * w,
                                w / -np.expm1(-x)))
    return float(out) if out.ndim == 0 else out
