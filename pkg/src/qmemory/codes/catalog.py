"""Concrete codes: 4-qubit toric, 2D toric, cubic, 4D toric, and the 2D Ising model."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from ..pauli import PauliOperator
from .base import (KIND_X, KIND_Z, Geometry, InvalidSize, StabilizerCode,
                   from_support_lists)


def _lattice_sites(L: int, dim: int) -> np.ndarray:
    """All sites in index order (first coordinate fastest)."""
    grids = np.meshgrid(*[np.arange(L)] * dim, indexing="ij")
    sites = np.stack([g.ravel(order="F") for g in grids], axis=1)
    return sites.astype(np.int64)


def build_four_qubit_toric() -> StabilizerCode:
    n = 4
    checks = [(KIND_X, [0, 1, 2, 3]), (KIND_Z, [0, 1, 2, 3])]
    # The exposed pair comes first; the second pair completes the basis.
    pairs = [
        (PauliOperator.from_support(n, x=[0, 1]), PauliOperator.from_support(n, z=[0, 2])),
        (PauliOperator.from_support(n, x=[0, 2]), PauliOperator.from_support(n, z=[0, 1])),
    ]
    empty = np.zeros((n, 0), np.int64)
    geom = Geometry(0, 0, False, empty, empty.astype(float), np.zeros((2, 0), np.int64),
                    np.zeros((2, 0)), qubits_per_site=4, checks_per_site=2)
    return from_support_lists("four_qubit", n, checks, pairs, k=2, geometry=geom,
                              exposed_pairs=1)


def toric_qubit(L, x, y, sub):
    """Edge index: sub 0 = horizontal edge from (x,y), sub 1 = vertical edge."""
    return 2 * ((y % L) * L + (x % L)) + sub


def build_toric_2d(L: int) -> StabilizerCode:
    if L < 2:
        raise InvalidSize(f"toric code needs L >= 2, got {L}")
    n = 2 * L * L
    h = lambda x, y: toric_qubit(L, x, y, 0)
    v = lambda x, y: toric_qubit(L, x, y, 1)
    checks = []
    for y in range(L):
        for x in range(L):
            checks.append((KIND_X, [h(x, y), h(x - 1, y), v(x, y), v(x, y - 1)]))
            checks.append((KIND_Z, [h(x, y), h(x, y + 1), v(x, y), v(x + 1, y)]))
    pairs = [
        (PauliOperator.from_support(n, x=[v(x, L - 1) for x in range(L)]),
         PauliOperator.from_support(n, z=[v(0, y) for y in range(L)])),
        (PauliOperator.from_support(n, x=[h(L - 1, y) for y in range(L)]),
         PauliOperator.from_support(n, z=[h(x, 0) for x in range(L)])),
    ]
    sites = _lattice_sites(L, 2)
    qsites = np.repeat(sites, 2, axis=0)
    qoff = np.tile([[0.5, 0.0], [0.0, 0.5]], (L * L, 1))
    coff = np.tile([[0.0, 0.0], [0.5, 0.5]], (L * L, 1))
    geom = Geometry(2, L, True, qsites, qoff, qsites.copy(), coff, 2, 2)
    return from_support_lists("toric2d", n, checks, pairs, k=2, geometry=geom, size=L)


def cubic_allowed(L: int) -> bool:
    return L % 2 == 1 and 3 <= L < 200 and L % 15 != 0 and L % 63 != 0


def _cubic_fixture() -> dict:
    text = resources.files("qmemory.codes").joinpath("data/cubic_code.json").read_text()
    return json.loads(text)


def build_cubic_code(L: int) -> StabilizerCode:
    if not cubic_allowed(L):
        raise InvalidSize(f"cubic code needs odd L < 200 without factors 15 or 63, got {L}")
    fx = _cubic_fixture()
    n = 2 * L ** 3
    sites = _lattice_sites(L, 3)
    geom_idx = lambda s: ((s[:, 0] % L) + L * (s[:, 1] % L) + L * L * (s[:, 2] % L))
    per_kind = []
    for key, kind in (("X", KIND_X), ("Z", KIND_Z)):
        cols = []
        for sub, name in enumerate(("qubit1", "qubit2")):
            for off in fx[key][name]:
                cols.append(2 * geom_idx(sites + np.asarray(off)) + sub)
        per_kind.append((kind, np.stack(cols, axis=1)))
    checks = []
    for s in range(len(sites)):
        for kind, table in per_kind:
            checks.append((kind, table[s]))
    q1 = np.arange(0, n, 2)
    q2 = np.arange(1, n, 2)
    pairs = [
        (PauliOperator.from_support(n, x=q1), PauliOperator.from_support(n, z=q1)),
        (PauliOperator.from_support(n, x=q2), PauliOperator.from_support(n, z=q2)),
    ]
    qsites = np.repeat(sites, 2, axis=0)
    qoff = np.zeros((n, 3))
    coff = np.full((n, 3), 0.5)
    geom = Geometry(3, L, True, qsites, qoff, qsites.copy(), coff, 2, 2)
    return from_support_lists("cubic", n, checks, pairs, k=2, geometry=geom, size=L)


PLANES_4D = list(itertools.combinations(range(4), 2))
TRIPLES_4D = list(itertools.combinations(range(4), 3))


def build_toric_4d(L: int) -> StabilizerCode:
    if L < 2:
        raise InvalidSize(f"4D toric code needs L >= 2, got {L}")
    nsite = L ** 4
    n = 6 * nsite
    sites = _lattice_sites(L, 4)
    eye = np.eye(4, dtype=np.int64)
    weights = L ** np.arange(4)
    site_of = lambda s: ((s % L) * weights).sum(axis=-1)
    pidx = {p: i for i, p in enumerate(PLANES_4D)}
    face = lambda s, i, j: 6 * site_of(s) + pidx[(min(i, j), max(i, j))]

    link_tables = []
    for a in range(4):
        cols = []
        for j in range(4):
            if j != a:
                cols.append(face(sites, a, j))
                cols.append(face(sites - eye[j], a, j))
        link_tables.append(np.stack(cols, axis=1))
    cube_tables = []
    for t in TRIPLES_4D:
        cols = []
        for third in t:
            i, j = [u for u in t if u != third]
            cols.append(face(sites, i, j))
            cols.append(face(sites + eye[third], i, j))
        cube_tables.append(np.stack(cols, axis=1))
    checks = []
    for s in range(nsite):
        checks.extend((KIND_X, tab[s]) for tab in link_tables)
        checks.extend((KIND_Z, tab[s]) for tab in cube_tables)

    pairs = []
    for (i, j) in PLANES_4D:
        others = [u for u in range(4) if u not in (i, j)]
        in_plane = (sites[:, others[0]] == 0) & (sites[:, others[1]] == 0)
        dual = (sites[:, i] == 0) & (sites[:, j] == 0)
        p = pidx[(i, j)]
        pairs.append((PauliOperator.from_support(n, x=6 * np.flatnonzero(dual) + p),
                      PauliOperator.from_support(n, z=6 * np.flatnonzero(in_plane) + p)))

    qsites = np.repeat(sites, 6, axis=0)
    qoff = np.tile([0.5 * (eye[i] + eye[j]) for i, j in PLANES_4D], (nsite, 1))
    csites = np.repeat(sites, 8, axis=0)
    coff_cell = [0.5 * eye[a] for a in range(4)] + [0.5 * eye[list(t)].sum(axis=0) for t in TRIPLES_4D]
    coff = np.tile(coff_cell, (nsite, 1))
    geom = Geometry(4, L, True, qsites, qoff.astype(float), csites, coff.astype(float), 6, 8)
    return from_support_lists("toric4d", n, checks, pairs, k=6, geometry=geom, size=L)


CODE_BUILDERS = {
    "four_qubit": lambda L=None: build_four_qubit_toric(),
    "toric2d": build_toric_2d,
    "cubic": build_cubic_code,
    "toric4d": build_toric_4d,
}


def build_code(name: str, L: int | None = None) -> StabilizerCode:
    try:
        builder = CODE_BUILDERS[name]
    except KeyError:
        raise InvalidSize(f"unknown code {name!r}; choose from {sorted(CODE_BUILDERS)}") from None
    if name != "four_qubit" and L is None:
        raise InvalidSize(f"code {name!r} needs a size L")
    return builder(L)


@dataclass(frozen=True, eq=False)
class ClassicalSpinModel:
    """Ising spins with pairwise couplings; E = -sum_edges J s_i s_j."""
    L: int
    V: int
    edges: np.ndarray
    coupling: float = 0.5

    def energy(self, spins) -> float:
        s = np.asarray(spins, dtype=np.int64)
        return float(-self.coupling * (s[self.edges[:, 0]] * s[self.edges[:, 1]]).sum())

    @staticmethod
    def magnetization(spins) -> float:
        return float(np.mean(spins))

    def neighbours(self) -> np.ndarray:
        """(V, 4) neighbour table for the square lattice."""
        idx = np.arange(self.V).reshape(self.L, self.L)
        return np.stack([np.roll(idx, s, axis=a).ravel()
                         for a in (0, 1) for s in (1, -1)], axis=1)


def build_ising_2d(L: int) -> ClassicalSpinModel:
    if L < 2:
        raise InvalidSize(f"Ising model needs L >= 2, got {L}")
    idx = np.arange(L * L).reshape(L, L)
    right = np.stack([idx.ravel(), np.roll(idx, -1, axis=1).ravel()], axis=1)
    down = np.stack([idx.ravel(), np.roll(idx, -1, axis=0).ravel()], axis=1)
    return ClassicalSpinModel(L, L * L, np.concatenate([right, down]))
