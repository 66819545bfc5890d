"""Compiled clustering decoder specialised to the 2D toric code.

On the toric code a box is neutralisable exactly when it holds an even
number of violations of one sector, so the GF(2) solve reduces to a parity
count.  The correction's logical class follows from how many members sit
on the far side of the periodic seam once the box is unrolled.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


@njit(cache=True)
def _union(parent, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra == rb:
        return
    # smaller index becomes the root, keeps labels deterministic
    if ra < rb:
        parent[rb] = ra
    else:
        parent[ra] = rb


@njit(cache=True)
def circular_cover(vals, L):
    """Smallest periodic interval covering sorted ``vals``: (start, extent)."""
    k = vals.shape[0]
    best_gap = vals[0] + L - vals[k - 1]
    best_i = k - 1
    for i in range(k - 1):
        g = vals[i + 1] - vals[i]
        if g > best_gap:
            best_gap = g
            best_i = i
    start = vals[(best_i + 1) % k]
    return start, L - best_gap


@njit(cache=True)
def _cheb(ax, ay, bx, by, L):
    dx = abs(ax - bx)
    dx = min(dx, L - dx)
    dy = abs(ay - by)
    dy = min(dy, L - dy)
    return max(dx, dy)


@njit(cache=True)
def cluster_sector(mem, K, cx, cy, L, occ, vpos, seam_x, seam_y,
                   parent, active, label, bx0, by0, bfull, stats):
    """Cluster the K violated checks ``mem[:K]`` of one sector.

    ``occ`` maps lattice cells to check indices (-1 when clean) and
    ``vpos`` maps a check to its position in ``mem``.  On return ``label``
    holds the final cluster root per member and ``bx0/by0/bfull`` the box
    of the frozen cluster (bfull bit 0: full in x, bit 1: full in y).
    ``stats`` receives [rounds, final radius].  Returns class bits.
    """
    bits = 0
    n_active = K
    for i in range(K):
        parent[i] = i
        active[i] = 1
    r = 1
    rounds = 0
    while n_active > 0:
        rounds += 1
        span = 2 * r + 1
        if span * span < n_active and span < L:
            for i in range(K):
                if not active[i]:
                    continue
                c = mem[i]
                x = cx[c]
                y = cy[c]
                for dx in range(-r, r + 1):
                    xx = (x + dx) % L
                    for dy in range(-r, r + 1):
                        yy = (y + dy) % L
                        c2 = occ[xx, yy]
                        if c2 >= 0:
                            j = vpos[c2]
                            if j != i and active[j]:
                                _union(parent, i, j)
        else:
            for i in range(K):
                if not active[i]:
                    continue
                ci = mem[i]
                for j in range(i + 1, K):
                    if active[j]:
                        cj = mem[j]
                        if _cheb(cx[ci], cy[ci], cx[cj], cy[cj], L) <= r:
                            _union(parent, i, j)
        # group active members by root
        roots = np.empty(n_active, np.int64)
        idx = np.empty(n_active, np.int64)
        a = 0
        for i in range(K):
            if active[i]:
                roots[a] = _find(parent, i)
                idx[a] = i
                a += 1
        order = np.argsort(roots, kind="mergesort")
        n_round = n_active
        s = 0
        while s < n_round:
            root = roots[order[s]]
            e = s
            while e < n_round and roots[order[e]] == root:
                e += 1
            cnt = e - s
            if cnt % 2 == 0:
                xs = np.empty(cnt, np.int64)
                ys = np.empty(cnt, np.int64)
                for t in range(cnt):
                    c = mem[idx[order[s + t]]]
                    xs[t] = cx[c]
                    ys[t] = cy[c]
                xs.sort()
                ys.sort()
                x0, ex = circular_cover(xs, L)
                y0, ey = circular_cover(ys, L)
                full = 0
                if ex >= L - 1:
                    full |= 1
                if ey >= L - 1:
                    full |= 2
                px = 0
                py = 0
                for t in range(cnt):
                    i = idx[order[s + t]]
                    c = mem[i]
                    if cx[c] < x0:
                        px ^= 1
                    if cy[c] < y0:
                        py ^= 1
                    active[i] = 0
                    label[i] = root
                    bx0[i] = x0
                    by0[i] = y0
                    bfull[i] = full
                n_active -= cnt
                if px and not (full & 1):
                    bits ^= seam_x
                if py and not (full & 2):
                    bits ^= seam_y
            s = e
        if n_active > 0:
            r *= 2
    stats[0] = rounds
    stats[1] = r
    return bits


class ToricDecoderWorkspace:
    """Reusable buffers for decoding one toric code from Python."""

    def __init__(self, code):
        from ..codes.base import X_TYPE, Z_TYPE
        self.code = code
        self.L = code.L
        sites = code.geometry.check_sites
        self.cx = np.ascontiguousarray(sites[:, 0], dtype=np.int64)
        self.cy = np.ascontiguousarray(sites[:, 1], dtype=np.int64)
        self.types = code.check_type
        self.sector_types = (X_TYPE, Z_TYPE)
        self.seam = toric_seam_bits(code)
        m = code.m
        self.parent = np.empty(m, np.int64)
        self.active = np.empty(m, np.uint8)
        self.label = np.empty(m, np.int64)
        self.bx0 = np.empty(m, np.int64)
        self.by0 = np.empty(m, np.int64)
        self.bfull = np.empty(m, np.int64)
        self.vpos = np.full(m, -1, np.int64)
        self.stats = np.zeros(2, np.int64)

    def decode_sector(self, viol, sector):
        mem = np.flatnonzero(viol.astype(bool) & (self.types == self.sector_types[sector]))
        K = len(mem)
        occ = np.full((self.L, self.L), -1, np.int64)
        occ[self.cx[mem], self.cy[mem]] = mem
        self.vpos[mem] = np.arange(K)
        bits = cluster_sector(mem, K, self.cx, self.cy, self.L, occ, self.vpos,
                              self.seam[sector, 0], self.seam[sector, 1], self.parent,
                              self.active, self.label, self.bx0, self.by0, self.bfull,
                              self.stats)
        return int(bits), mem


def toric_seam_bits(code) -> np.ndarray:
    """Class bits flipped when a sector's correction string crosses a periodic seam.

    Row = sector (0: X-type checks, 1: Z-type checks), column = lattice axis.
    """
    from ..codes.base import KIND_X, KIND_Z, X_TYPE, Z_TYPE, class_bits
    from ..pauli import PauliOperator
    out = np.zeros((2, 2), np.int64)
    for s, (ctype, kind) in enumerate(((X_TYPE, KIND_Z), (Z_TYPE, KIND_X))):
        for d in range(2):
            q = seam_qubit(code, ctype, d)
            op = PauliOperator.single(code.n, q, "X" if kind == KIND_X else "Z")
            out[s, d] = class_bits(code, op)
    return out


def step_qubit_table(code, ctype, d) -> np.ndarray:
    """For each site, the qubit shared by the sector check there and the one at site+e_d."""
    L = code.L
    sites = code.geometry.check_sites
    ptr, chk, _ = code.qubit_to_checks
    owner = np.repeat(np.arange(code.n), np.diff(ptr))
    keep = code.check_type[chk] == ctype
    q, c = owner[keep], chk[keep]
    # every toric qubit touches exactly two checks of each sector
    order = np.argsort(q, kind="stable")
    q, c = q[order].reshape(-1, 2)[:, 0], c[order].reshape(-1, 2)
    table = np.full((L, L), -1, np.int64)
    for lo, hi in ((c[:, 0], c[:, 1]), (c[:, 1], c[:, 0])):
        a, b = sites[lo], sites[hi]
        step = a.copy()
        step[:, d] = (step[:, d] + 1) % L
        hit = (step == b).all(axis=1)
        table[a[hit, 0], a[hit, 1]] = q[hit]
    return table


def seam_qubit(code, ctype, d) -> int:
    L = code.L
    start = [0, 0]
    start[d] = L - 1
    return int(step_qubit_table(code, ctype, d)[start[0], start[1]])


class ToricFastDecoder:
    """Toric decoder returning explicit string corrections and class bits."""

    def __init__(self, code):
        from ..codes.base import X_TYPE, Z_TYPE
        if code.name != "toric2d" or code.L < 3:
            raise ValueError("toric fast path needs a toric code with L >= 3")
        self.ws = ToricDecoderWorkspace(code)
        self.code = code
        self.steps = {s: [step_qubit_table(code, t, d) for d in range(2)]
                      for s, t in enumerate((X_TYPE, Z_TYPE))}

    def _paths(self, sector, mem, K):
        ws = self.ws
        L = ws.L
        flips = np.zeros(self.code.n, np.uint8)
        boxes = []
        labels = ws.label[:K]
        for root in np.unique(labels):
            idx = np.flatnonzero(labels == root)
            x0, y0, full = ws.bx0[idx[0]], ws.by0[idx[0]], ws.bfull[idx[0]]
            cs = mem[idx]
            ux = ws.cx[cs].copy()
            uy = ws.cy[cs].copy()
            if not full & 1:
                ux = x0 + (ux - x0) % L
            if not full & 2:
                uy = y0 + (uy - y0) % L
            order = np.lexsort((uy, ux))
            for a, b in zip(order[0::2], order[1::2]):
                self._walk(flips, sector, ux[a], ux[b], uy[a], 0, L)
                self._walk(flips, sector, uy[a], uy[b], ux[b], 1, L)
            boxes.append((sector, int(x0), int(y0), int(full), np.sort(cs)))
        return flips, boxes

    def _walk(self, flips, sector, u_from, u_to, other, d, L):
        lo, hi = sorted((int(u_from), int(u_to)))
        table = self.steps[sector][d]
        for u in range(lo, hi):
            if d == 0:
                q = table[u % L, other % L]
            else:
                q = table[other % L, u % L]
            flips[q] ^= 1

    def decode(self, syndrome, error=None):
        from ..codes.base import classify_residual
        from ..pauli import PauliOperator, multiply
        from .cluster import DecoderResult, syndrome_bits
        bits = syndrome_bits(syndrome)
        fixes = []
        total = 0
        res = DecoderResult(PauliOperator.identity(self.code.n))
        for sector in (0, 1):
            cls, mem = self.ws.decode_sector(bits, sector)
            total ^= cls
            res.rounds = max(res.rounds, int(self.ws.stats[0]))
            res.final_radius = max(res.final_radius, int(self.ws.stats[1]))
            flips, boxes = self._paths(sector, mem, len(mem))
            res.boxes.extend(boxes)
            fixes.append(flips)
        # sector 0 (X-type checks) is fixed by Z, sector 1 by X
        res.correction = PauliOperator.from_bits(fixes[1], fixes[0])
        res.class_bits = total
        if error is not None:
            res.success = classify_residual(self.code, multiply(res.correction, error))
        return res
