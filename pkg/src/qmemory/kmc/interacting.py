"""Monte Carlo under interacting anyon energies.

Every event's omega can change after any flip, so rates are recomputed in
full each step from cached per-check pair sums ``phi`` and sampled with a
cumulative sum.  This is O(events) per step and meant for exploration on
small lattices.
"""

from __future__ import annotations

import numpy as np

from ..codes.base import StabilizerCode, class_bits, violated
from ..energy import EnergyModel, self_energy
from ..pauli import PauliOperator
from .engine import EVENT_SETS, EngineFault, EventTable
from .rates import InvalidParameter, gamma


class InteractingState:
    def __init__(self, code: StabilizerCode, beta: float, model: EnergyModel,
                 event_set="XYZ", error: PauliOperator | None = None,
                 forbid_creation: bool = False):
        if not beta > 0:
            raise InvalidParameter(f"beta must be positive, got {beta}")
        if code.geometry.dim == 0:
            raise InvalidParameter("interacting models need a lattice code")
        self.code = code
        self.model = model
        self.beta = float(beta)
        kinds = EVENT_SETS[event_set] if isinstance(event_set, str) else tuple(event_set)
        self.table = tb = EventTable(code, kinds)
        self.forbid_creation = forbid_creation
        self.own = self_energy(model, code)
        self.coef = model.pair_coefficient() if model.V != 0.0 else 0.0
        pos = code.geometry.check_positions
        self.types = code.check_type
        self.sector_idx = {int(t): np.flatnonzero(self.types == t) for t in np.unique(self.types)}
        self.pos = pos
        # padded flip table and in-event pair potentials
        md = tb.maxdeg
        self.flips = np.full((tb.n_events, md), -1, np.int64)
        for e in range(tb.n_events):
            cs = tb.ev_chk[tb.ev_ptr[e]:tb.ev_ptr[e + 1]]
            self.flips[e, :len(cs)] = cs
        self.pairU = np.zeros((tb.n_events, md, md))
        valid = self.flips >= 0
        for i in range(md):
            for j in range(md):
                if i == j:
                    continue
                ok = valid[:, i] & valid[:, j]
                a, b = self.flips[ok, i], self.flips[ok, j]
                same = self.types[a] == self.types[b]
                u = np.zeros(ok.sum())
                if same.any():
                    u[same] = self._potential(a[same], b[same])
                self.pairU[ok, i, j] = u
        self.viol = np.zeros(code.m, np.int64)
        self.phi = np.zeros(code.m)
        self.frame_x = np.zeros(code.n, np.uint8)
        self.frame_z = np.zeros(code.n, np.uint8)
        self.cls = 0
        self.t = 0.0
        self.n_events = 0
        if error is not None:
            self.frame_x[:] = error.x_bits
            self.frame_z[:] = error.z_bits
            self.cls = class_bits(code, error)
            for c in np.flatnonzero(violated(code, error)):
                self._toggle(c)

    def _potential(self, a, b):
        g = self.code.geometry
        d = g.min_image(self.pos[a] - self.pos[b])
        return self.model.potential_of(np.sqrt((d ** 2).sum(axis=-1)))

    def _toggle(self, c):
        s = 1 - 2 * self.viol[c]
        self.viol[c] ^= 1
        if self.coef:
            idx = self.sector_idx[int(self.types[c])]
            others = idx[idx != c]
            self.phi[others] += s * self._potential(np.full(len(others), c), others)

    @property
    def error(self) -> PauliOperator:
        return PauliOperator.from_bits(self.frame_x, self.frame_z)

    @property
    def energy(self) -> float:
        from ..energy import AnyonConfiguration, total_energy
        return total_energy(self.model, AnyonConfiguration.from_violated(self.code, self.viol))

    def event_omegas(self) -> np.ndarray:
        f = self.flips
        valid = f >= 0
        fc = np.where(valid, f, 0)
        n = np.where(valid, self.viol[fc], 0)
        s = np.where(valid, 1 - 2 * n, 0)
        de = (s * self.own[fc]).sum(axis=1)
        if self.coef:
            # phi excluding partners inside the flip set
            inner = np.einsum("eij,ej->ei", self.pairU, n)
            dp = (s * (self.phi[fc] - inner)).sum(axis=1)
            after = n ^ valid.astype(np.int64)
            change = after[:, :, None] * after[:, None, :] - n[:, :, None] * n[:, None, :]
            dp += 0.5 * (change * self.pairU).sum(axis=(1, 2))
            de = de + self.coef * dp
        return -de

    def rates(self) -> np.ndarray:
        w = self.event_omegas()
        r = np.asarray(gamma(w, self.beta), dtype=float).reshape(-1)
        if self.forbid_creation:
            r[w < 0] = 0.0
        return r

    def step(self, rng):
        r = self.rates()
        cum = np.cumsum(r)
        R = cum[-1]
        if not R > 0:
            raise EngineFault("total rate vanished")
        dt = -np.log(1.0 - rng.random()) / R
        e = int(np.searchsorted(cum, rng.random() * R, side="right"))
        e = min(e, len(r) - 1)
        self._apply(e)
        self.t += dt
        self.n_events += 1
        return self.table.event_name(e), dt

    def _apply(self, e):
        tb = self.table
        q, kd = tb.ev_q[e], tb.ev_kind[e]
        self.frame_x[q] ^= kd & 1
        self.frame_z[q] ^= kd >> 1
        self.cls ^= int(tb.ev_logmask[e])
        for c in tb.ev_chk[tb.ev_ptr[e]:tb.ev_ptr[e + 1]]:
            self._toggle(c)

    def advance(self, rng, t_stop=np.inf, max_events=np.iinfo(np.int64).max):
        done = 0
        while done < max_events:
            r = self.rates()
            cum = np.cumsum(r)
            R = cum[-1]
            if not R > 0:
                raise EngineFault("total rate vanished")
            dt = -np.log(1.0 - rng.random()) / R
            if self.t + dt >= t_stop:
                self.t = t_stop
                return "t_max"
            e = min(int(np.searchsorted(cum, rng.random() * R, side="right")), len(r) - 1)
            self._apply(e)
            self.t += dt
            self.n_events += 1
            done += 1
        return "max_events"

    def check_consistency(self) -> None:
        v = violated(self.code, self.error).astype(np.int64)
        if not np.array_equal(v, self.viol):
            raise EngineFault("violated set disagrees with error frame")
        if self.coef:
            for c in range(self.code.m):
                idx = self.sector_idx[int(self.types[c])]
                others = idx[(idx != c) & self.viol[idx].astype(bool)]
                want = self._potential(np.full(len(others), c), others).sum()
                if abs(want - self.phi[c]) > 1e-9 * max(1.0, abs(want)):
                    raise EngineFault("pair-sum cache is stale")
