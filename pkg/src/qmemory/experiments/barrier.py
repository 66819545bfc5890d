"""Exact energy barrier by bottleneck search over single-sector error configurations."""

from __future__ import annotations

import numpy as np
from numba import njit

from ..codes.base import KIND_X, KIND_Z, anticommutes_kind, class_bits
from ..pauli import PauliOperator

MAX_SECTOR_QUBITS = 24


class StateSpaceTooLarge(ValueError):
    pass


@njit(cache=True)
def _popcount(x):
    c = 0
    one = np.uint64(1)
    while x:
        x &= x - one
        c += 1
    return c


@njit(cache=True)
def _reachable(n, qsyn, qcls, cap, mask, target, visited, queue):
    """BFS from 0 over configurations whose violated count never exceeds ``cap``.

    Returns True when a zero-syndrome configuration in class ``target`` is hit.
    """
    visited[:] = 0
    visited[0] = 1
    queue[0] = 0
    head = 0
    tail = 1
    while head < tail:
        s = queue[head]
        head += 1
        syn = np.uint64(0)
        cls = 0
        for q in range(n):
            if (s >> q) & 1:
                syn ^= qsyn[q]
                cls ^= qcls[q]
        if syn == 0 and (cls & mask) == target and (s != 0 or target == 0):
            return True
        for q in range(n):
            nxt = s ^ (1 << q)
            if visited[nxt]:
                continue
            if _popcount(syn ^ qsyn[q]) > cap:
                continue
            visited[nxt] = 1
            queue[tail] = nxt
            tail += 1
    return False


def _sector_tables(code, kind):
    kinds = code.check_kinds
    # checks this kind of error can flip at all
    ac = anticommutes_kind(np.int64(kind), kinds.astype(np.int64)).astype(bool)
    ent_chk = np.repeat(np.arange(code.m), np.diff(code.check_ptr))
    relevant = np.unique(ent_chk[ac])
    if len(relevant) > 63:
        raise StateSpaceTooLarge(f"{len(relevant)} detecting checks exceed the 63-bit syndrome word")
    slot = np.full(code.m, -1, np.int64)
    slot[relevant] = np.arange(len(relevant))
    qsyn = np.zeros(code.n, np.uint64)
    for e in np.flatnonzero(ac):
        qsyn[code.check_qubits[e]] ^= np.uint64(1) << np.uint64(slot[ent_chk[e]])
    name = "X" if kind == KIND_X else "Z"
    qcls = np.array([class_bits(code, PauliOperator.single(code.n, q, name)) for q in range(code.n)],
                    np.int64)
    return qsyn, qcls


def energy_barrier(code, target=None, sector="X", delta=1.0, max_qubits=MAX_SECTOR_QUBITS) -> float:
    """Min over single-qubit flip paths of the max energy on the way to ``target``.

    ``target`` is the class-bit pattern to reach (restricted to the exposed
    logical pairs); None means any nontrivial class. Only one Pauli kind acts,
    chosen by ``sector``.
    """
    if code.n > max_qubits:
        raise StateSpaceTooLarge(f"search over 2^{code.n} configurations refused "
                                 f"(limit 2^{max_qubits}, about {8 * 2 ** max_qubits / 1e6:.0f} MB)")
    kind = {"X": KIND_X, "Z": KIND_Z}[sector.upper()]
    qsyn, qcls = _sector_tables(code, kind)
    mask = code.exposed_mask
    size = 1 << code.n
    visited = np.zeros(size, np.uint8)
    queue = np.zeros(size, np.int64)
    reach = 0
    for c in qcls:
        reach |= int(c) & mask
    if target is None:
        targets = sorted({int(c) & mask for c in _span(qcls & mask)} - {0})
        if not targets:
            raise ValueError(f"no nontrivial logical class is reachable with {sector} errors")
    else:
        targets = [int(target) & mask]
    max_cap = 64
    for cap in range(0, max_cap + 1):
        for t in targets:
            if _reachable(code.n, qsyn, qcls, cap, mask, t, visited, queue):
                return float(cap) * delta * code.mass
    raise ValueError(f"target class {target} is unreachable with {sector} errors")


def _span(vals):
    """All XOR combinations of a set of small integers."""
    basis = []
    for v in vals:
        v = int(v)
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    out = {0}
    for b in basis:
        out |= {o ^ b for o in out}
    return out
