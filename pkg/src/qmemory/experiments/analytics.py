"""Closed-form baselines: Curie-Weiss free energy, Peierls bound, Ising Metropolis."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit


class DomainError(ValueError):
    pass


@dataclass
class CurieWeissCurve:
    x: np.ndarray
    energy: np.ndarray
    entropy: np.ndarray
    free_energy: np.ndarray
    minima: np.ndarray
    barrier: float
    curvature_half: float

    @property
    def double_well(self) -> bool:
        return self.curvature_half < 0


def _xlogx(x):
    x = np.asarray(x, float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos])
    return out


def curie_weiss(n: int, delta: float, beta: float, points: int = 1001) -> CurieWeissCurve:
    """Free energy F(x) = E(x) - S(x)/beta of the n-spin mean-field model.

    x is the fraction of flipped spins; the x ln x terms take their limit 0
    at the endpoints.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    x = np.linspace(0.0, 1.0, points)
    e = -delta * n * (1 - 2 * x) ** 2
    s = -n * (_xlogx(x) + _xlogx(1 - x))
    f = e - s / beta
    inner = (f[1:-1] <= f[:-2]) & (f[1:-1] <= f[2:])
    mins = np.flatnonzero(inner) + 1
    if f[0] < f[1]:
        mins = np.concatenate([[0], mins])
    if f[-1] < f[-2]:
        mins = np.concatenate([mins, [points - 1]])
    half = -n * math.log(2.0) / beta  # E(1/2) = 0, S(1/2) = n ln 2
    barrier = half - float(f.min())
    curv = 4 * n * (1 / beta - 2 * delta)
    return CurieWeissCurve(x, e, s, f, x[mins], barrier, curv)


@dataclass
class PeierlsBound:
    beta: float
    minority_density: float
    magnetization: float


def peierls_bound(beta: float) -> PeierlsBound:
    """Upper bound on minority-spin density and lower bound on |magnetization|."""
    ratio = 3 * math.exp(-beta)
    if not ratio < 1:
        raise DomainError(f"contour series diverges: 3 exp(-beta) = {ratio:.4g} >= 1")
    q = 9 * math.exp(-2 * beta)
    dens = 27 * math.exp(-4 * beta) * (2 - q) / (1 - q) ** 2
    return PeierlsBound(beta, dens, 0.5 - 2 * dens)


@njit(cache=True)
def _metropolis(spins, L, beta, sweeps, burn, rng):
    acc = np.exp(-beta * np.arange(9.0))  # indexed by dE
    total = 0.0
    for sw in range(sweeps):
        for _ in range(L * L):
            i = int(rng.random() * L)
            j = int(rng.random() * L)
            s = spins[i, j]
            nb = spins[(i + 1) % L, j] + spins[(i - 1) % L, j] + spins[i, (j + 1) % L] + spins[i, (j - 1) % L]
            de = s * nb  # coupling 1/2 per bond, flip changes each bond by 1
            if de <= 0 or rng.random() < acc[de]:
                spins[i, j] = -s
        if sw >= burn:
            total += abs(spins.sum()) / (L * L)
    return total / max(sweeps - burn, 1)


def ising_metropolis(L: int, beta: float, sweeps: int, rng, burn_in: int | None = None,
                     start: str = "up") -> float:
    """Mean |magnetization| of single-spin Metropolis on the periodic L x L lattice."""
    if start == "up":
        spins = np.ones((L, L), np.int64)
    else:
        spins = np.where(rng.random((L, L)) < 0.5, 1, -1).astype(np.int64)
    burn = sweeps // 10 if burn_in is None else burn_in
    return float(_metropolis(spins, L, float(beta), int(sweeps), int(burn), rng))
