"""Sparse stabilizer-code container shared by every catalog entry."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .. import gf2
from ..pauli import (DimensionError, ParityCheckMatrix, PauliOperator,
                     in_group, symplectic_product)

# Pauli kind codes used in sparse tables: bit 0 = X part, bit 1 = Z part.
KIND_X, KIND_Z, KIND_Y = 1, 2, 3
KIND_NAMES = {KIND_X: "X", KIND_Z: "Z", KIND_Y: "Y"}
KIND_CODES = {v: k for k, v in KIND_NAMES.items()}

# check sector labels
X_TYPE, Z_TYPE, MIXED = 0, 1, -1


class InvalidSize(ValueError):
    pass


class ContractViolation(ValueError):
    pass


def anticommutes_kind(a: int, b: int):
    """Symplectic product of single-qubit kinds (works on arrays too)."""
    return ((a & 1) & (b >> 1)) ^ ((a >> 1) & (b & 1))


@dataclass(frozen=True, eq=False)
class Geometry:
    """Integer lattice placement of qubits and checks.

    Sites are integer vectors in [0, L)^D.  ``*_offset`` holds the real-space
    displacement inside the unit cell, used only for distances.
    """
    dim: int
    L: int
    periodic: bool
    qubit_sites: np.ndarray
    qubit_offset: np.ndarray
    check_sites: np.ndarray
    check_offset: np.ndarray
    qubits_per_site: int
    checks_per_site: int

    def site_index(self, sites: np.ndarray) -> np.ndarray:
        sites = np.asarray(sites) % max(self.L, 1)
        idx = np.zeros(sites.shape[:-1], dtype=np.int64)
        for d in reversed(range(self.dim)):
            idx = idx * self.L + sites[..., d]
        return idx

    def translate_qubits(self, shift) -> np.ndarray:
        """Permutation q -> image of q under a lattice translation."""
        sub = np.arange(len(self.qubit_sites)) % self.qubits_per_site
        return self.qubits_per_site * self.site_index(self.qubit_sites + shift) + sub

    def translate_checks(self, shift) -> np.ndarray:
        sub = np.arange(len(self.check_sites)) % self.checks_per_site
        return self.checks_per_site * self.site_index(self.check_sites + shift) + sub

    @property
    def check_positions(self) -> np.ndarray:
        return self.check_sites + self.check_offset

    def min_image(self, delta: np.ndarray) -> np.ndarray:
        if not self.periodic or self.L == 0:
            return delta
        return delta - self.L * np.round(delta / self.L)


class StabilizerCode:
    """Local stabilizer code stored as a sparse check table."""

    def __init__(self, name, n, check_ptr, check_qubits, check_kinds,
                 logical_pairs, k, geometry, size=None, exposed_pairs=None,
                 mass=1.0):
        self.name = name
        self.size = size
        self.n = int(n)
        self.check_ptr = np.asarray(check_ptr, dtype=np.int64)
        self.check_qubits = np.asarray(check_qubits, dtype=np.int64)
        self.check_kinds = np.asarray(check_kinds, dtype=np.uint8)
        self.logical_pairs = tuple(logical_pairs)
        self.k = int(k)
        self.exposed_pairs = len(self.logical_pairs) if exposed_pairs is None else exposed_pairs
        self.geometry = geometry
        self.mass = float(mass)
        for arr in (self.check_ptr, self.check_qubits, self.check_kinds):
            arr.setflags(write=False)

    @property
    def m(self) -> int:
        return len(self.check_ptr) - 1

    @property
    def L(self):
        return self.geometry.L

    def __repr__(self) -> str:
        return f"StabilizerCode({self.name}, n={self.n}, m={self.m}, k={self.k})"

    @cached_property
    def check_type(self) -> np.ndarray:
        out = np.full(self.m, MIXED, dtype=np.int8)
        for c in range(self.m):
            kinds = set(self.check_kinds[self.check_ptr[c]:self.check_ptr[c + 1]].tolist())
            if kinds == {KIND_X}:
                out[c] = X_TYPE
            elif kinds == {KIND_Z}:
                out[c] = Z_TYPE
        return out

    @property
    def is_css(self) -> bool:
        return bool((self.check_type != MIXED).all())

    @cached_property
    def _entry_check(self) -> np.ndarray:
        return np.repeat(np.arange(self.m), np.diff(self.check_ptr))

    @cached_property
    def qubit_to_checks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR (ptr, checks, kinds): for each qubit the checks acting on it."""
        order = np.argsort(self.check_qubits, kind="stable")
        counts = np.bincount(self.check_qubits, minlength=self.n)
        ptr = np.concatenate([[0], np.cumsum(counts)])
        return ptr, self._entry_check[order], self.check_kinds[order]

    def check_operator(self, c: int) -> PauliOperator:
        sl = slice(self.check_ptr[c], self.check_ptr[c + 1])
        q, kd = self.check_qubits[sl], self.check_kinds[sl]
        xb = np.zeros(self.n, np.uint8)
        zb = np.zeros(self.n, np.uint8)
        np.bitwise_xor.at(xb, q, kd & 1)
        np.bitwise_xor.at(zb, q, kd >> 1)
        return PauliOperator.from_bits(xb, zb)

    @cached_property
    def checks(self) -> ParityCheckMatrix:
        return ParityCheckMatrix([self.check_operator(c) for c in range(self.m)])

    @property
    def logical_generators(self) -> list[PauliOperator]:
        """Flattened [X1, Z1, X2, Z2, ...]."""
        return [op for pair in self.logical_pairs for op in pair]

    @property
    def exposed_mask(self) -> int:
        return (1 << (2 * self.exposed_pairs)) - 1

    def sector_matrix(self, sector: int) -> np.ndarray:
        """Dense 0/1 incidence (checks of one CSS type) x qubits."""
        rows = np.flatnonzero(self.check_type == sector)
        mat = np.zeros((len(rows), self.n), np.uint8)
        for i, c in enumerate(rows):
            q = self.check_qubits[self.check_ptr[c]:self.check_ptr[c + 1]]
            np.bitwise_xor.at(mat[i], q, 1)
        return mat

    @cached_property
    def stabilizer_rank(self) -> int:
        return self.checks.rank

    @cached_property
    def locality_radius(self) -> float:
        g = self.geometry
        if g.dim == 0:
            return 0.0
        qpos = g.qubit_sites[self.check_qubits] + g.qubit_offset[self.check_qubits]
        cpos = g.check_positions[self._entry_check]
        rel = g.min_image(qpos - cpos)
        lo = np.full((self.m, g.dim), np.inf)
        hi = np.full((self.m, g.dim), -np.inf)
        np.minimum.at(lo, self._entry_check, rel)
        np.maximum.at(hi, self._entry_check, rel)
        return float((hi - lo).max())

    # serialization
    def to_dict(self) -> dict:
        g = self.geometry
        return {
            "name": self.name,
            "size": self.size,
            "n": self.n,
            "k": self.k,
            "exposed_pairs": self.exposed_pairs,
            "mass": self.mass,
            "checks": [self.check_operator(c).to_string() for c in range(self.m)],
            "logicals": [[x.to_string(), z.to_string()] for x, z in self.logical_pairs],
            "geometry": {
                "dim": g.dim, "L": g.L, "periodic": g.periodic,
                "qubits_per_site": g.qubits_per_site,
                "checks_per_site": g.checks_per_site,
                "qubit_sites": g.qubit_sites.tolist(),
                "qubit_offset": g.qubit_offset.tolist(),
                "check_sites": g.check_sites.tolist(),
                "check_offset": g.check_offset.tolist(),
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StabilizerCode":
        ops = [PauliOperator.from_string(s) for s in d["checks"]]
        g = d["geometry"]
        dim = g["dim"]

        def arr(key, dtype):
            return np.asarray(g[key], dtype=dtype).reshape(-1, dim)

        geom = Geometry(dim, g["L"], g["periodic"], arr("qubit_sites", np.int64),
                        arr("qubit_offset", float), arr("check_sites", np.int64),
                        arr("check_offset", float), g["qubits_per_site"],
                        g["checks_per_site"])
        pairs = [(PauliOperator.from_string(x), PauliOperator.from_string(z))
                 for x, z in d["logicals"]]
        return from_operators(d["name"], ops, pairs, d["k"], geom, size=d["size"],
                              exposed_pairs=d["exposed_pairs"], mass=d["mass"])


def from_operators(name, ops, logical_pairs, k, geometry, **kw) -> StabilizerCode:
    ptr, qubits, kinds = [0], [], []
    for op in ops:
        kd = op.x_bits + 2 * op.z_bits
        supp = np.flatnonzero(kd)
        qubits.extend(supp.tolist())
        kinds.extend(kd[supp].tolist())
        ptr.append(len(qubits))
    return StabilizerCode(name, ops[0].n, ptr, qubits, kinds, logical_pairs, k,
                          geometry, **kw)


def from_support_lists(name, n, checks, logical_pairs, k, geometry, **kw):
    """Build from [(kind, [qubits...]), ...]; repeated qubits cancel."""
    ptr, qubits, kinds = [0], [], []
    for kind, qs in checks:
        vals, counts = np.unique(np.asarray(qs, dtype=np.int64), return_counts=True)
        keep = vals[counts % 2 == 1]
        qubits.append(keep)
        kinds.append(np.full(len(keep), kind, np.uint8))
        ptr.append(ptr[-1] + len(keep))
    return StabilizerCode(name, n, ptr, np.concatenate(qubits), np.concatenate(kinds),
                          logical_pairs, k, geometry, **kw)


# syndromes and classification

def violated(code: StabilizerCode, error: PauliOperator) -> np.ndarray:
    """0/1 vector, 1 where the check anticommutes with ``error``."""
    if error.n != code.n:
        raise DimensionError(f"error acts on {error.n} qubits, code has {code.n}")
    ek = (error.x_bits + 2 * error.z_bits)[code.check_qubits]
    ac = anticommutes_kind(code.check_kinds, ek).astype(np.int64)
    sums = np.add.reduceat(ac, code.check_ptr[:-1]) if len(ac) else np.zeros(code.m, np.int64)
    return (sums & 1).astype(np.uint8)


def syndrome(code: StabilizerCode, error: PauliOperator) -> np.ndarray:
    """Eigenvalue vector: +1 where the check commutes with the error, else -1."""
    return (1 - 2 * violated(code, error).astype(np.int8)).astype(np.int8)


def class_bits(code: StabilizerCode, op: PauliOperator) -> int:
    """Bit 2i: anticommutes with X̄_i; bit 2i+1: anticommutes with Z̄_i."""
    bits = 0
    for i, g in enumerate(code.logical_generators):
        if symplectic_product(op, g):
            bits |= 1 << i
    return bits


@dataclass(frozen=True)
class ResidualClass:
    kind: str  # "trivial" | "stabilizer" | "logical"
    bits: int = 0

    @property
    def is_logical(self) -> bool:
        return self.kind == "logical"


def classify_residual(code: StabilizerCode, residual: PauliOperator) -> ResidualClass:
    if violated(code, residual).any():
        raise ContractViolation("residual has a nontrivial syndrome")
    if residual.is_identity():
        return ResidualClass("trivial")
    bits = class_bits(code, residual)
    if len(code.logical_pairs) == code.k:
        # complete logical basis: commuting with all of it means stabilizer
        return ResidualClass("logical", bits) if bits else ResidualClass("stabilizer")
    if in_group(residual, code.checks):
        return ResidualClass("stabilizer")
    return ResidualClass("logical", bits)


def code_distance_bruteforce(code: StabilizerCode, max_n: int = 24) -> int:
    """Minimum weight of a nontrivial logical, by exhaustive search."""
    if code.n > max_n:
        raise InvalidSize(f"n={code.n} exceeds exhaustive limit {max_n}")
    if code.is_css:
        return min(_css_sector_distance(code, Z_TYPE, KIND_X),
                   _css_sector_distance(code, X_TYPE, KIND_Z))
    if code.n > 12:
        raise InvalidSize("non-CSS exhaustive search limited to n <= 12")
    kinds = (KIND_X, KIND_Z, KIND_Y)
    for w in range(1, code.n + 1):
        for supp in itertools.combinations(range(code.n), w):
            for ks in itertools.product(kinds, repeat=w):
                xb = np.zeros(code.n, np.uint8)
                zb = np.zeros(code.n, np.uint8)
                for q, kd in zip(supp, ks):
                    xb[q], zb[q] = kd & 1, kd >> 1
                op = PauliOperator.from_bits(xb, zb)
                if not violated(code, op).any() and classify_residual(code, op).is_logical:
                    return w
    raise ContractViolation("no logical operator found")


def _css_sector_distance(code, detector_type, kind):
    h = code.sector_matrix(detector_type).astype(np.int64)
    gens = code.logical_generators
    bit = 1 if kind == KIND_X else 0  # X errors are seen by Z logicals
    lmat = np.stack([(g.z_bits if kind == KIND_X else g.x_bits) for g in gens]).astype(np.int64)
    complete = len(code.logical_pairs) == code.k
    for w in range(1, code.n + 1):
        for supp in itertools.combinations(range(code.n), w):
            cols = list(supp)
            if (h[:, cols].sum(axis=1) & 1).any():
                continue
            if complete:
                if (lmat[:, cols].sum(axis=1) & 1).any():
                    return w
                continue
            op = PauliOperator.from_support(code.n, **{"x" if bit else "z": cols})
            if not in_group(op, code.checks):
                return w
    raise ContractViolation("no logical operator found")


def translation_covariant(code: StabilizerCode, rng, axis: int = 0, density: float = 0.05) -> bool:
    """Syndrome of a shifted random error equals the shifted syndrome."""
    g = code.geometry
    if g.dim == 0:
        return True
    err = PauliOperator.from_bits(rng.random(code.n) < density, rng.random(code.n) < density)
    shift = np.zeros(g.dim, np.int64)
    shift[axis] = 1
    qmap = g.translate_qubits(shift)
    cmap = g.translate_checks(shift)
    xb = np.zeros(code.n, np.uint8)
    zb = np.zeros(code.n, np.uint8)
    xb[qmap] = err.x_bits
    zb[qmap] = err.z_bits
    moved = violated(code, PauliOperator.from_bits(xb, zb))
    expect = np.zeros(code.m, np.uint8)
    expect[cmap] = violated(code, err)
    return bool(np.array_equal(moved, expect))


def logical_algebra_ok(code: StabilizerCode) -> bool:
    """Logicals commute with checks and realize the standard symplectic form."""
    gens = code.logical_generators
    for g in gens:
        if violated(code, g).any():
            return False
    for i, a in enumerate(gens):
        for j, b in enumerate(gens):
            expect = 1 if (i // 2 == j // 2 and i != j) else 0
            if symplectic_product(a, b) != expect:
                return False
    return True


def checks_commute(code: StabilizerCode) -> bool:
    """Sparse pairwise commutation test of all checks."""
    from scipy import sparse
    rows = code._entry_check
    shape = (code.m, code.n)
    hx = sparse.csr_matrix(((code.check_kinds & 1).astype(np.int64), (rows, code.check_qubits)), shape)
    hz = sparse.csr_matrix(((code.check_kinds >> 1).astype(np.int64), (rows, code.check_qubits)), shape)
    prod = (hx @ hz.T + hz @ hx.T).tocoo()
    return not (prod.data % 2).any()


def encoded_qubits(code: StabilizerCode) -> int:
    """k = n - rank(checks), by GF(2) elimination on the packed matrix."""
    return code.n - _sparse_rank(code)


def _sparse_rank(code: StabilizerCode) -> int:
    bits = np.zeros((code.m, 2 * code.n), np.uint8)
    rows = code._entry_check
    bits[rows, code.check_qubits] ^= (code.check_kinds & 1)
    bits[rows, code.n + code.check_qubits] ^= (code.check_kinds >> 1)
    return gf2.rank(gf2.pack_rows(bits), 2 * code.n)
