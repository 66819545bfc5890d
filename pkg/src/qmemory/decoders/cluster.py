"""Box-growing clustering decoder for local CSS codes.

Each round merges still-charged clusters whose violated checks are within
periodic Chebyshev distance r (r = 1, 2, 4, ...), then tries to neutralise
every cluster by a GF(2) solve restricted to qubits strictly inside the
cluster's bounding box.  Neutral clusters freeze and leave the search.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .. import gf2
from ..codes.base import (X_TYPE, Z_TYPE, ResidualClass, StabilizerCode,
                          classify_residual)
from ..pauli import PauliOperator, multiply

# one dense box system may not exceed this many matrix bits
MAX_BOX_BITS = 4_000_000_000


class InvalidSyndrome(ValueError):
    pass


class DecoderCapacity(RuntimeError):
    """A box system grew beyond what dense elimination can handle."""


@dataclass
class ClusterBox:
    sector: int
    start: tuple
    extent: tuple
    full: tuple
    checks: np.ndarray
    neutral: bool = False
    correction: np.ndarray | None = None  # qubit indices flipped

    @property
    def wraps(self) -> bool:
        return any(self.full)


@dataclass
class DecoderResult:
    correction: PauliOperator
    success: ResidualClass | None = None
    rounds: int = 0
    final_radius: int = 0
    round_clusters: list = field(default_factory=list)
    boxes: list = field(default_factory=list)
    class_bits: int | None = None  # correction's own class bits when known

    @property
    def failed(self) -> bool:
        return self.success is not None and self.success.is_logical


def syndrome_bits(syndrome) -> np.ndarray:
    """0/1 violation bits from either bits or an int8 eigenvalue vector.

    int8 input (what ``syndrome()`` returns) or any negative entry is read
    as eigenvalues; anything else is taken to be violation bits already.
    """
    s = np.asarray(syndrome)
    if s.dtype == np.int8 or (s < 0).any():
        return (s < 0).astype(np.uint8)
    return (s != 0).astype(np.uint8)


def circular_cover(vals: np.ndarray, L: int) -> tuple[int, int]:
    """Smallest periodic interval [start, start+extent] covering ``vals``."""
    v = np.sort(np.asarray(vals))
    gaps = np.empty(len(v), np.int64)
    gaps[:-1] = np.diff(v)
    gaps[-1] = v[0] + L - v[-1]
    # ties go to the wrap-around gap first, then the lowest index
    order = np.concatenate([[len(v) - 1], np.arange(len(v) - 1)])
    i = order[np.argmax(gaps[order])]
    return int(v[(i + 1) % len(v)]), int(L - gaps[i])


class _Sector:
    def __init__(self, code: StabilizerCode, ctype: int):
        self.ctype = ctype
        self.checks = np.flatnonzero(code.check_type == ctype)
        m = code.m
        self.local = np.full(m, -1, np.int64)
        self.local[self.checks] = np.arange(len(self.checks))
        ptr, chk, _ = code.qubit_to_checks
        mask = code.check_type[chk] == ctype
        owner = np.repeat(np.arange(code.n), np.diff(ptr))
        counts = np.bincount(owner[mask], minlength=code.n)
        self.q_ptr = np.concatenate([[0], np.cumsum(counts)])
        self.q_chk = chk[mask]
        g = code.geometry
        self.sites = g.check_sites[self.checks]
        self.dim = g.dim
        self.L = g.L
        if self.dim:
            lin = g.site_index(self.sites)
            nsite = self.L ** self.dim
            per = np.bincount(lin, minlength=nsite)
            self.per_site = int(per.max())
            self.site_checks = np.full((nsite, self.per_site), -1, np.int64)
            fill = np.zeros(nsite, np.int64)
            for c, s in zip(self.checks, lin):
                self.site_checks[s, fill[s]] = c
                fill[s] += 1


class ClusterDecoder:
    """Per-code precomputation for repeated decodes."""

    def __init__(self, code: StabilizerCode):
        if not code.is_css:
            raise ValueError("clustering decoder supports CSS codes only")
        self.code = code
        # Z-type checks see X errors and are fixed by X corrections
        self.sectors = {X_TYPE: _Sector(code, X_TYPE), Z_TYPE: _Sector(code, Z_TYPE)}
        self._in_box = np.zeros(code.m, bool)

    # boxes
    def box_for(self, sector: int, members: np.ndarray) -> ClusterBox:
        sec = self.sectors[sector]
        starts, exts, fulls = [], [], []
        sites = self.code.geometry.check_sites[members]
        for d in range(sec.dim):
            s, e = circular_cover(sites[:, d], sec.L)
            starts.append(s)
            exts.append(e)
            fulls.append(e >= sec.L - 1)
        return ClusterBox(sector, tuple(starts), tuple(exts), tuple(fulls),
                          np.sort(np.asarray(members)))

    def full_box(self, sector: int, members: np.ndarray) -> ClusterBox:
        sec = self.sectors[sector]
        d = sec.dim
        return ClusterBox(sector, (0,) * d, (sec.L - 1,) * d, (True,) * d,
                          np.sort(np.asarray(members)))

    def _box_checks(self, box: ClusterBox) -> np.ndarray:
        sec = self.sectors[box.sector]
        if sec.dim == 0 or all(box.full):
            return sec.checks
        axes = []
        for d in range(sec.dim):
            if box.full[d]:
                axes.append(np.arange(sec.L))
            else:
                axes.append((box.start[d] + np.arange(box.extent[d] + 1)) % sec.L)
        grids = np.meshgrid(*axes, indexing="ij")
        lin = np.zeros(grids[0].shape, np.int64)
        for d in reversed(range(sec.dim)):
            lin = lin * sec.L + grids[d]
        cs = sec.site_checks[lin.ravel()].ravel()
        return np.sort(cs[cs >= 0])

    def box_neutral(self, box: ClusterBox) -> np.ndarray | None:
        """Qubits of a correction inside ``box`` fixing exactly its members, or None."""
        code = self.code
        sec = self.sectors[box.sector]
        rows = self._box_checks(box)
        inbox = self._in_box
        inbox[rows] = True
        try:
            ptr = code.check_ptr
            cand = np.unique(np.concatenate([code.check_qubits[ptr[c]:ptr[c + 1]] for c in rows]))
            keep = np.ones(len(cand), bool)
            for i, q in enumerate(cand):
                cs = sec.q_chk[sec.q_ptr[q]:sec.q_ptr[q + 1]]
                if not inbox[cs].all():
                    keep[i] = False
            cand = cand[keep]
        finally:
            inbox[rows] = False
        if len(rows) * len(cand) > MAX_BOX_BITS:
            raise DecoderCapacity(f"box system {len(rows)}x{len(cand)} too large")
        row_of = np.full(code.m, -1, np.int64)
        row_of[rows] = np.arange(len(rows))
        a = np.zeros((len(rows), len(cand)), np.uint8)
        for j, q in enumerate(cand):
            cs = sec.q_chk[sec.q_ptr[q]:sec.q_ptr[q + 1]]
            a[row_of[cs], j] ^= 1
        b = np.zeros(len(rows), np.uint8)
        b[row_of[box.checks]] = 1
        if len(cand) == 0:
            return None if b.any() else np.zeros(0, np.int64)
        x = gf2.solve(a, b)
        if x is None:
            return None
        return cand[x.astype(bool)]

    # main loop
    def decode_sector(self, sector: int, bits: np.ndarray, result: DecoderResult) -> np.ndarray:
        sec = self.sectors[sector]
        members = sec.checks[bits[sec.checks].astype(bool)]
        flips = np.zeros(self.code.n, np.uint8)
        K = len(members)
        if K == 0:
            return flips
        parent = np.arange(K)

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        active = np.ones(K, bool)
        tried = set()
        sites = self.code.geometry.check_sites[members]
        r = 1
        rounds = 0
        max_r = max(sec.L // 2, 1)
        while active.any():
            rounds += 1
            act = np.flatnonzero(active)
            if sec.dim == 0:
                pairs = [(act[0], j) for j in act[1:]]
            else:
                tree = cKDTree(sites[act].astype(float), boxsize=float(sec.L))
                pairs = [(act[i], act[j]) for i, j in sorted(tree.query_pairs(r + 0.5, p=np.inf))]
            for i, j in pairs:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
            roots = np.array([find(i) for i in act])
            groups = [act[roots == rt] for rt in np.unique(roots)]
            if len(result.round_clusters) < rounds:
                result.round_clusters.append(0)
            result.round_clusters[rounds - 1] += len(groups)
            last = sec.dim == 0 or r >= max_r
            for g in groups:
                key = tuple(g.tolist())
                if key in tried and not last:
                    continue
                tried.add(key)
                box = self.box_for(sector, members[g])
                sol = self.box_neutral(box)
                if sol is None and last:
                    box = self.full_box(sector, members[g])
                    sol = self.box_neutral(box)
                    if sol is None:
                        raise InvalidSyndrome("no correction exists even on the full lattice")
                if sol is not None:
                    box.neutral = True
                    box.correction = sol
                    flips[sol] ^= 1
                    active[g] = False
                    result.boxes.append(box)
            if active.any():
                r *= 2
        result.rounds = max(result.rounds, rounds)
        result.final_radius = max(result.final_radius, r)
        return flips

    def decode(self, syndrome, error: PauliOperator | None = None) -> DecoderResult:
        bits = syndrome_bits(syndrome)
        if len(bits) != self.code.m:
            raise InvalidSyndrome(f"syndrome length {len(bits)} != {self.code.m} checks")
        result = DecoderResult(PauliOperator.identity(self.code.n))
        xfix = self.decode_sector(Z_TYPE, bits, result)
        zfix = self.decode_sector(X_TYPE, bits, result)
        result.correction = PauliOperator.from_bits(xfix, zfix)
        if error is not None:
            result.success = classify_residual(self.code, multiply(result.correction, error))
        return result


_DECODERS: dict = {}


def decoder_for(code: StabilizerCode) -> ClusterDecoder:
    key = id(code)
    dec = _DECODERS.get(key)
    if dec is None or dec.code is not code:
        dec = ClusterDecoder(code)
        _DECODERS[key] = dec
    return dec


def cluster_decode(code: StabilizerCode, syndrome, error: PauliOperator | None = None) -> DecoderResult:
    """Decode a syndrome (0/1 bits or +-1 eigenvalues) with the generic box solver."""
    return decoder_for(code).decode(syndrome, error)


def box_neutral(code: StabilizerCode, box: ClusterBox) -> PauliOperator | None:
    sol = decoder_for(code).box_neutral(box)
    if sol is None:
        return None
    kind = "x" if box.sector == Z_TYPE else "z"
    return PauliOperator.from_support(code.n, **{kind: sol})
