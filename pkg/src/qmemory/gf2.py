"""Dense GF(2) linear algebra on bit-packed uint64 rows.

Rows are stored little-endian within words: column ``c`` lives in word
``c >> 6`` at bit ``c & 63``.  Pivot order is fixed (leftmost column,
topmost available row), so every routine here is deterministic.
"""

from __future__ import annotations

import numpy as np
from numba import njit

WORD = 64


def n_words(ncols: int) -> int:
    return max(1, (ncols + WORD - 1) // WORD)


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack a 2D 0/1 array (rows x cols) into uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim == 1:
        bits = bits[None, :]
    rows, cols = bits.shape
    nw = n_words(cols)
    padded = np.zeros((rows, nw * WORD), dtype=np.uint8)
    padded[:, :cols] = bits
    as_bytes = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(as_bytes).view("<u8").reshape(rows, nw).astype(np.uint64)


def unpack_rows(words: np.ndarray, ncols: int) -> np.ndarray:
    words = np.ascontiguousarray(np.atleast_2d(words).astype("<u8"))
    as_bytes = words.view(np.uint8).reshape(words.shape[0], -1)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :ncols].astype(np.uint8)


@njit(cache=True)
def _rref(m, ncols):
    # Full reduction in place. Returns the rank and pivot columns.
    nrows, nw = m.shape
    piv = np.empty(min(nrows, ncols), np.int64)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        w = c >> 6
        b = np.uint64(1) << np.uint64(c & 63)
        p = -1
        for i in range(r, nrows):
            if m[i, w] & b:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for k in range(nw):
                tmp = m[p, k]
                m[p, k] = m[r, k]
                m[r, k] = tmp
        for i in range(nrows):
            if i != r and (m[i, w] & b):
                for k in range(nw):
                    m[i, k] ^= m[r, k]
        piv[r] = c
        r += 1
    return r, piv[:r]


@njit(cache=True)
def _reduce_vector(basis, piv, rank, v):
    # Reduce v against an RREF basis; v is modified in place.
    for i in range(rank):
        c = piv[i]
        w = c >> 6
        b = np.uint64(1) << np.uint64(c & 63)
        if v[w] & b:
            for k in range(v.shape[0]):
                v[k] ^= basis[i, k]


@njit(cache=True)
def _is_zero(v):
    for k in range(v.shape[0]):
        if v[k] != 0:
            return False
    return True


def rank(packed: np.ndarray, ncols: int) -> int:
    work = np.array(packed, dtype=np.uint64, copy=True)
    if work.shape[0] == 0:
        return 0
    r, _ = _rref(work, ncols)
    return int(r)


def rref(packed: np.ndarray, ncols: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (reduced rows[:rank], pivot columns)."""
    work = np.array(packed, dtype=np.uint64, copy=True)
    if work.shape[0] == 0:
        return work, np.zeros(0, np.int64)
    r, piv = _rref(work, ncols)
    return work[:r].copy(), piv.copy()


def in_rowspan(packed: np.ndarray, ncols: int, vector: np.ndarray) -> bool:
    """True iff the packed vector is a GF(2) combination of the packed rows."""
    basis, piv = rref(packed, ncols)
    v = np.array(vector, dtype=np.uint64, copy=True)
    _reduce_vector(basis, piv, len(piv), v)
    return bool(_is_zero(v))


@njit(cache=True)
def _solve(aug, ncols):
    # aug holds [A | b] with b in column ncols.  Pivots are only taken on A.
    nrows, nw = aug.shape
    r, piv = _rref(aug, ncols)
    bw = ncols >> 6
    bb = np.uint64(1) << np.uint64(ncols & 63)
    for i in range(r, nrows):
        if aug[i, bw] & bb:
            return False, np.zeros(ncols, np.uint8)
    x = np.zeros(ncols, np.uint8)
    for i in range(r):
        if aug[i, bw] & bb:
            x[piv[i]] = 1
    return True, x


def solve(a_bits: np.ndarray, b_bits: np.ndarray) -> np.ndarray | None:
    """Solve A x = b over GF(2); free variables are set to zero.

    Returns None when the system is inconsistent.
    """
    a_bits = np.asarray(a_bits, dtype=np.uint8)
    nrows, ncols = a_bits.shape
    aug = np.zeros((nrows, ncols + 1), dtype=np.uint8)
    aug[:, :ncols] = a_bits
    aug[:, ncols] = np.asarray(b_bits, dtype=np.uint8)
    if nrows == 0:
        return np.zeros(ncols, np.uint8)
    ok, x = _solve(pack_rows(aug), ncols)
    return x if ok else None


def solve_reference(a_bits, b_bits):
    """Pure-Python elimination using int bitmasks; slow, used as a test oracle."""
    a_bits = np.asarray(a_bits, dtype=np.uint8)
    nrows, ncols = a_bits.shape
    rows = []
    for i in range(nrows):
        v = 0
        for c in range(ncols):
            if a_bits[i, c]:
                v |= 1 << c
        if b_bits[i]:
            v |= 1 << ncols
        rows.append(v)
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if rows[i] >> c & 1), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(nrows):
            if i != r and rows[i] >> c & 1:
                rows[i] ^= rows[r]
        pivots.append(c)
        r += 1
    if any(rows[i] >> ncols & 1 for i in range(r, nrows)):
        return None
    x = np.zeros(ncols, np.uint8)
    for i, c in enumerate(pivots):
        x[c] = rows[i] >> ncols & 1
    return x
