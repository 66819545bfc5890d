"""Projective Pauli operators in symplectic form.

Phases are dropped on purpose: syndromes and logical classes never see them.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from . import gf2

_CHARS = "IXZY"  # index = x + 2z


class DimensionError(ValueError):
    pass


def _pack_bits(bits: np.ndarray) -> np.ndarray:
    return gf2.pack_rows(np.asarray(bits, dtype=np.uint8)[None, :])[0]


class PauliOperator:
    """n-qubit Pauli up to phase, stored as packed X and Z words."""

    def __init__(self, n: int, x_words: np.ndarray, z_words: np.ndarray):
        nw = gf2.n_words(n)
        x_words = np.ascontiguousarray(x_words, dtype=np.uint64)
        z_words = np.ascontiguousarray(z_words, dtype=np.uint64)
        if x_words.shape != (nw,) or z_words.shape != (nw,):
            raise DimensionError(f"expected {nw} words for n={n}")
        x_words.setflags(write=False)
        z_words.setflags(write=False)
        self.n = int(n)
        self._x = x_words
        self._z = z_words
        self._hash = None

    # construction
    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        nw = gf2.n_words(n)
        return cls(n, np.zeros(nw, np.uint64), np.zeros(nw, np.uint64))

    @classmethod
    def from_bits(cls, x_bits, z_bits) -> "PauliOperator":
        x_bits = np.asarray(x_bits, dtype=np.uint8) & 1
        z_bits = np.asarray(z_bits, dtype=np.uint8) & 1
        if x_bits.shape != z_bits.shape or x_bits.ndim != 1:
            raise DimensionError("x and z bit strings must have equal length")
        return cls(len(x_bits), _pack_bits(x_bits), _pack_bits(z_bits))

    @classmethod
    def from_string(cls, text: str) -> "PauliOperator":
        idx = np.array([_CHARS.index(c) for c in text.upper()], dtype=np.uint8)
        return cls.from_bits(idx & 1, idx >> 1)

    @classmethod
    def from_support(cls, n: int, x=(), z=(), y=()) -> "PauliOperator":
        """Build from qubit index lists; repeated indices cancel."""
        xb = np.zeros(n, np.uint8)
        zb = np.zeros(n, np.uint8)
        for q in x:
            xb[q] ^= 1
        for q in z:
            zb[q] ^= 1
        for q in y:
            xb[q] ^= 1
            zb[q] ^= 1
        return cls.from_bits(xb, zb)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> "PauliOperator":
        kind = kind.upper()
        return cls.from_support(n, **{kind.lower(): [qubit]})

    # views
    @property
    def x_words(self) -> np.ndarray:
        return self._x

    @property
    def z_words(self) -> np.ndarray:
        return self._z

    @cached_property
    def x_bits(self) -> np.ndarray:
        out = gf2.unpack_rows(self._x, self.n)[0]
        out.setflags(write=False)
        return out

    @cached_property
    def z_bits(self) -> np.ndarray:
        out = gf2.unpack_rows(self._z, self.n)[0]
        out.setflags(write=False)
        return out

    @property
    def symplectic(self) -> np.ndarray:
        """Concatenated (x | z) 0/1 vector of length 2n."""
        return np.concatenate([self.x_bits, self.z_bits])

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.x_bits | self.z_bits)

    def is_identity(self) -> bool:
        return not (self._x.any() or self._z.any())

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self._x, other._x)
                and np.array_equal(self._z, other._z))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self._x.tobytes(), self._z.tobytes()))
        return self._hash

    def to_string(self) -> str:
        idx = self.x_bits + 2 * self.z_bits
        return "".join(_CHARS[i] for i in idx)

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        if self.n <= 64:
            return f"PauliOperator('{self.to_string()}')"
        return f"PauliOperator(n={self.n}, weight={weight(self)})"


def _check(p: PauliOperator, q: PauliOperator) -> None:
    if p.n != q.n:
        raise DimensionError(f"qubit counts differ: {p.n} vs {q.n}")


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    _check(p, q)
    return PauliOperator(p.n, p.x_words ^ q.x_words, p.z_words ^ q.z_words)


def symplectic_product(p: PauliOperator, q: PauliOperator) -> int:
    _check(p, q)
    acc = (p.x_words & q.z_words) ^ (p.z_words & q.x_words)
    return int(np.bitwise_count(acc).sum() & 1)


def commutes(p: PauliOperator, q: PauliOperator) -> bool:
    return symplectic_product(p, q) == 0


def weight(p: PauliOperator) -> int:
    return int(np.bitwise_count(p.x_words | p.z_words).sum())


def stack_symplectic(ops) -> np.ndarray:
    """Packed (rows, words) matrix of [x | z] for a list of operators."""
    ops = list(ops)
    if not ops:
        return np.zeros((0, 1), np.uint64)
    bits = np.stack([o.symplectic for o in ops])
    return gf2.pack_rows(bits)


class ParityCheckMatrix:
    """Possibly over-complete list of commuting generators."""

    def __init__(self, rows):
        self.rows = tuple(rows)
        if not self.rows:
            raise ValueError("need at least one generator")
        self.n = self.rows[0].n
        for r in self.rows:
            _check(self.rows[0], r)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @cached_property
    def _packed(self) -> np.ndarray:
        return stack_symplectic(self.rows)

    @cached_property
    def rank(self) -> int:
        return gf2.rank(self._packed, 2 * self.n)

    def all_commute(self) -> bool:
        x = np.stack([r.x_bits for r in self.rows]).astype(np.int64)
        z = np.stack([r.z_bits for r in self.rows]).astype(np.int64)
        return not ((x @ z.T + z @ x.T) % 2).any()


def in_group(p: PauliOperator, gens) -> bool:
    """Projective membership of ``p`` in the group generated by ``gens``."""
    rows = gens.rows if isinstance(gens, ParityCheckMatrix) else tuple(gens)
    for r in rows:
        _check(p, r)
    if p.is_identity():
        return True
    packed = stack_symplectic(rows)
    vec = stack_symplectic([p])[0]
    return gf2.in_rowspan(packed, 2 * p.n, vec)
