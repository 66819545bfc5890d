"""Energy functions over syndrome configurations.

Three kinds are supported: the bare stabilizer Hamiltonian, an anyon-anyon
pair potential, and the anyon-vacuum model whose single-anyon cost grows
with system size.  Interactions act within one CSS sector only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codes.base import StabilizerCode

KINDS = ("stabilizer", "anyon-anyon", "anyon-vacuum")
POTENTIALS = ("power", "log")


class UnknownModel(ValueError):
    pass


@dataclass(frozen=True)
class EnergyModel:
    kind: str = "stabilizer"
    delta: float = 1.0
    V: float = 0.0
    alpha: float = 1.0
    potential: str = "power"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnknownModel(f"unknown energy model kind {self.kind!r}")
        if self.potential not in POTENTIALS:
            raise UnknownModel(f"unknown potential {self.potential!r}")

    @property
    def interacting(self) -> bool:
        return self.kind != "stabilizer" and self.V != 0.0

    def pair_coefficient(self) -> float:
        return self.V if self.kind == "anyon-anyon" else -4.0 * self.V

    def potential_of(self, r: np.ndarray) -> np.ndarray:
        """U(r); the anyon-vacuum kind always uses r^-alpha."""
        r = np.asarray(r, dtype=float)
        if self.kind == "anyon-anyon" and self.potential == "log":
            return np.log(r)
        return r ** (-self.alpha)


@dataclass(frozen=True, eq=False)
class AnyonConfiguration:
    """Violated checks of a code, grouped by sector."""
    code: StabilizerCode
    violated: np.ndarray
    sectors: dict = field(default_factory=dict)

    @classmethod
    def from_violated(cls, code: StabilizerCode, bits) -> "AnyonConfiguration":
        bits = np.asarray(bits, dtype=np.uint8).copy()
        bits.setflags(write=False)
        types = code.check_type
        sectors = {int(t): np.flatnonzero(bits & (types == t)) for t in np.unique(types)}
        return cls(code, bits, sectors)

    @property
    def count(self) -> int:
        return int(self.violated.sum())

    def anyons(self):
        """(check index, coordinate) for each violated check, by sector."""
        pos = self.code.geometry.check_positions
        return {t: [(int(c), tuple(pos[c])) for c in idx] for t, idx in self.sectors.items()}

    def flipped(self, checks) -> "AnyonConfiguration":
        bits = self.violated.copy()
        for c in checks:
            bits[c] ^= 1
        return AnyonConfiguration.from_violated(self.code, bits)


def distances(code: StabilizerCode, a, b) -> np.ndarray:
    """Minimum-image Euclidean distance between check positions (broadcasting)."""
    g = code.geometry
    if g.dim == 0:
        raise UnknownModel("interacting models need a lattice geometry")
    pos = g.check_positions
    d = g.min_image(pos[np.asarray(a)][..., None, :] - pos[np.asarray(b)][None, ...])
    return np.sqrt((d ** 2).sum(axis=-1))


def _pair_sum(model: EnergyModel, code: StabilizerCode, idx: np.ndarray) -> float:
    if len(idx) < 2:
        return 0.0
    r = distances(code, idx, idx)
    iu = np.triu_indices(len(idx), 1)
    return float(model.potential_of(r[iu]).sum())


def anyon_gap(model: EnergyModel, code: StabilizerCode, check: int) -> float:
    """mu_k = delta + 4V sum_{k' != k in sector} r^-alpha, exact lattice sum."""
    if model.V == 0.0:
        return float(model.delta)
    same = np.flatnonzero(code.check_type == code.check_type[check])
    same = same[same != check]
    r = distances(code, [check], same)[0]
    return float(model.delta + 4.0 * model.V * (r ** (-model.alpha)).sum())


def self_energy(model: EnergyModel, code: StabilizerCode) -> np.ndarray:
    """Per-check cost of a lone violation: delta*mass, or mu_k for anyon-vacuum."""
    base = np.full(code.m, model.delta * code.mass)
    if model.kind == "anyon-vacuum" and model.V != 0.0:
        for t in np.unique(code.check_type):
            idx = np.flatnonzero(code.check_type == t)
            # translation invariance: one lattice sum per sector
            base[idx] = anyon_gap(model, code, int(idx[0]))
    return base


def total_energy(model: EnergyModel, cfg: AnyonConfiguration) -> float:
    code = cfg.code
    if model.kind not in KINDS:
        raise UnknownModel(model.kind)
    if model.kind == "stabilizer":
        return float(model.delta * code.mass * cfg.count)
    own = self_energy(model, code)
    e = float(own[cfg.violated.astype(bool)].sum())
    if model.V != 0.0:
        coef = model.pair_coefficient()
        for idx in cfg.sectors.values():
            e += coef * _pair_sum(model, code, idx)
    return e


def delta_energy(model: EnergyModel, cfg: AnyonConfiguration, flipped) -> float:
    """E(after) - E(before) when the given checks toggle."""
    flipped = np.unique(np.asarray(list(flipped), dtype=np.int64))
    if len(flipped) == 0:
        return 0.0
    code = cfg.code
    before = cfg.violated.astype(np.int64)
    sign = 1 - 2 * before[flipped]
    if model.kind == "stabilizer":
        return float(model.delta * code.mass * sign.sum())
    own = self_energy(model, code)
    de = float((own[flipped] * sign).sum())
    if model.V == 0.0:
        return de
    coef = model.pair_coefficient()
    after = before.copy()
    after[flipped] ^= 1
    types = code.check_type
    in_f = np.zeros(code.m, bool)
    in_f[flipped] = True
    dp = 0.0
    for a, s in zip(flipped, sign):
        # partners outside the flipped set keep their state
        others = np.flatnonzero(before.astype(bool) & ~in_f & (types == types[a]))
        if len(others):
            dp += s * model.potential_of(distances(code, [a], others)[0]).sum()
    for i in range(len(flipped)):
        for j in range(i + 1, len(flipped)):
            a, b = flipped[i], flipped[j]
            if types[a] != types[b]:
                continue
            change = after[a] * after[b] - before[a] * before[b]
            if change:
                dp += change * model.potential_of(distances(code, [a], [b])[0, 0])
    return de + coef * float(dp)
