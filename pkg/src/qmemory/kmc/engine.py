"""Python-facing state, stepping and run loop for the thermal Monte Carlo."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..codes.base import (KIND_NAMES, KIND_X, KIND_Y, KIND_Z, MIXED, X_TYPE,
                          StabilizerCode, anticommutes_kind, violated)
from ..energy import EnergyModel
from ..pauli import PauliOperator
from . import kernel as K
from .rates import InvalidParameter, gamma

EVENT_SETS = {"XYZ": (KIND_X, KIND_Y, KIND_Z), "XZ": (KIND_X, KIND_Z),
              "X": (KIND_X,), "Z": (KIND_Z,)}


class EngineFault(RuntimeError):
    pass


class EventTable:
    """Static event <-> check incidence for one code and event set."""

    def __init__(self, code: StabilizerCode, kinds=(KIND_X, KIND_Y, KIND_Z)):
        self.code = code
        self.kinds = tuple(kinds)
        nk = len(self.kinds)
        ptr, chk, ckind = code.qubit_to_checks
        n = code.n
        ev_ptr = [0]
        ev_chk = []
        per_q = np.diff(ptr)
        # events ordered qubit-major: e = q*nk + slot
        flips = []
        for kd in self.kinds:
            flips.append(anticommutes_kind(ckind, kd).astype(bool))
        for q in range(n):
            sl = slice(ptr[q], ptr[q + 1])
            for j in range(nk):
                cs = chk[sl][flips[j][sl]]
                ev_chk.extend(cs.tolist())
                ev_ptr.append(len(ev_chk))
        self.ev_ptr = np.asarray(ev_ptr, np.int64)
        self.ev_chk = np.asarray(ev_chk, np.int64)
        self.n_events = n * nk
        self.ev_q = np.repeat(np.arange(n, dtype=np.int64), nk)
        self.ev_kind = np.tile(np.asarray(self.kinds, np.int64), n)
        self.ev_deg = np.diff(self.ev_ptr)
        self.maxdeg = int(self.ev_deg.max()) if self.n_events else 0
        self.nb = 2 * self.maxdeg + 1
        # reverse map check -> events
        order = np.argsort(self.ev_chk, kind="stable")
        owner = np.repeat(np.arange(self.n_events, dtype=np.int64), self.ev_deg)
        counts = np.bincount(self.ev_chk, minlength=code.m)
        self.chk_ptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        self.chk_ev = owner[order]
        # logical class flips
        mask = np.zeros(self.n_events, np.int64)
        for i, g in enumerate(code.logical_generators):
            gk = (g.x_bits + 2 * g.z_bits)[self.ev_q]
            mask |= anticommutes_kind(self.ev_kind, gk).astype(np.int64) << i
        self.ev_logmask = mask
        del per_q

    def event_name(self, e: int) -> tuple[int, str]:
        return int(self.ev_q[e]), KIND_NAMES[int(self.ev_kind[e])]

    def event_index(self, qubit: int, kind: str) -> int:
        return qubit * len(self.kinds) + self.kinds.index({"X": KIND_X, "Y": KIND_Y, "Z": KIND_Z}[kind])


@dataclass
class KmcTrajectory:
    seed: object
    times: np.ndarray
    events: np.ndarray
    omegas: np.ndarray
    table: EventTable = field(repr=False)
    terminal: str = ""
    t_final: float = 0.0
    snapshots: list = field(default_factory=list)

    @property
    def qubits(self) -> np.ndarray:
        return self.table.ev_q[self.events]

    @property
    def kinds(self) -> list[str]:
        return [KIND_NAMES[int(k)] for k in self.table.ev_kind[self.events]]

    def digest(self) -> str:
        h = hashlib.sha256()
        for arr in (self.times, self.events, self.omegas):
            h.update(np.ascontiguousarray(arr).tobytes())
        h.update(self.terminal.encode())
        return h.hexdigest()

    def to_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write("t,qubit,kind,omega\n")
            for t, q, k, w in zip(self.times, self.qubits, self.kinds, self.omegas):
                fh.write(f"{t:.17g},{q},{k},{w:.17g}\n")


STATUS_NAMES = {K.ST_TIME: "t_max", K.ST_MAX_EVENTS: "max_events",
                K.ST_FAILURE: "decoder-failure", K.ST_SEPARATION: "separation-reached",
                K.ST_ANNIHILATED: "annihilated", K.ST_CHECKPOINT: "checkpoint"}


class SyndromeState:
    """Mutable thermal-evolution state for the stabilizer energy model."""

    def __init__(self, code: StabilizerCode, beta: float, model: EnergyModel | None = None,
                 event_set="XYZ", table: EventTable | None = None, error: PauliOperator | None = None,
                 forbid_creation: bool = False, track_pairs: bool | None = None):
        if not beta > 0:
            raise InvalidParameter(f"beta must be positive, got {beta}")
        model = model or EnergyModel()
        if model.kind != "stabilizer" and model.V != 0.0:
            raise InvalidParameter("use InteractingState for interacting energy models")
        self.code = code
        self.model = model
        self.beta = float(beta)
        kinds = EVENT_SETS[event_set] if isinstance(event_set, str) else tuple(event_set)
        self.table = table if table is not None else EventTable(code, kinds)
        tb = self.table
        self.unit = model.delta * code.mass
        u = np.arange(-tb.maxdeg, tb.maxdeg + 1)
        self.omega_b = -self.unit * u.astype(float)
        self.gam = np.asarray(gamma(self.omega_b, self.beta), dtype=float).reshape(-1)
        self.forbid_creation = forbid_creation
        if forbid_creation:
            self.gam[self.omega_b < 0] = 0.0
        m = code.m
        self.chk_sec = np.where(code.check_type == MIXED, 0, code.check_type).astype(np.int64)
        self.is_toric = code.name == "toric2d"
        self.track_pairs = self.is_toric if track_pairs is None else track_pairs
        L = code.L if self.is_toric else 0
        self.L = L
        if self.is_toric:
            sites = code.geometry.check_sites
            self.cx = np.ascontiguousarray(sites[:, 0], np.int64)
            self.cy = np.ascontiguousarray(sites[:, 1], np.int64)
        else:
            self.cx = np.zeros(m, np.int64)
            self.cy = np.zeros(m, np.int64)
        self.occ = np.full((2, L, L), -1, np.int64)
        self.vlist = np.zeros((2, m), np.int64)
        self.vcount = np.zeros(2, np.int64)
        self.vpos = np.full(m, -1, np.int64)
        self.partner = np.full(m, -1, np.int64)
        self.ctime = np.zeros(m)
        self.last_ctime = np.zeros(2)
        self.ints = np.zeros(5, np.int64)
        self.fl = np.zeros(2)
        self.viol = np.zeros(m, np.int64)
        self.frame_x = np.zeros(code.n, np.int64)
        self.frame_z = np.zeros(code.n, np.int64)
        self._dbuf = None
        self._init_from_error(error)

    def _init_from_error(self, error):
        code, tb = self.code, self.table
        if error is not None:
            self.frame_x[:] = error.x_bits
            self.frame_z[:] = error.z_bits
            v = violated(code, error).astype(np.int64)
            from ..codes.base import class_bits
            self.ints[K.I_CLS] = class_bits(code, error)
        else:
            v = np.zeros(code.m, np.int64)
        self.viol[:] = 0
        self.level = np.zeros(tb.n_events, np.int64)
        self.perm, self.pos, self.bstart = K.init_buckets(tb.ev_deg, self.level, tb.maxdeg, tb.nb)
        # toggle violated checks through the kernel path so all caches agree
        for c in np.flatnonzero(v):
            K._toggle_check(c, self.viol, self.level, self.perm, self.pos, self.bstart,
                            tb.chk_ptr, tb.chk_ev, tb.ev_deg, tb.maxdeg, self.chk_sec,
                            self.vlist, self.vcount, self.vpos, self.occ, self.cx, self.cy,
                            self.ints)
        if self.track_pairs:
            self._pair_violations_greedily()

    def _pair_violations_greedily(self):
        # initial anyons are paired in list order, stamped with creation time 0
        for s in range(2):
            members = self.vlist[s, :self.vcount[s]]
            for a, b in zip(members[0::2], members[1::2]):
                self.partner[a], self.partner[b] = b, a

    # views
    @property
    def t(self) -> float:
        return float(self.fl[K.F_T])

    @property
    def n_events(self) -> int:
        return int(self.ints[K.I_NEV])

    @property
    def n_violated(self) -> int:
        return int(self.ints[K.I_NVIOL])

    @property
    def class_bits(self) -> int:
        return int(self.ints[K.I_CLS])

    @property
    def violated(self) -> np.ndarray:
        return self.viol.astype(np.uint8)

    @property
    def error(self) -> PauliOperator:
        return PauliOperator.from_bits(self.frame_x, self.frame_z)

    @property
    def total_rate(self) -> float:
        return float(K.total_rate(self.gam, self.bstart))

    @property
    def energy(self) -> float:
        return self.unit * self.n_violated

    def event_omegas(self) -> np.ndarray:
        tb = self.table
        return -self.unit * (tb.ev_deg - 2 * self.level).astype(float)

    def enumerate_rates(self) -> dict:
        """Bucketed view: omega -> (event indices, per-event rate)."""
        out = {}
        for b in range(self.table.nb):
            lo, hi = self.bstart[b], self.bstart[b + 1]
            if hi > lo:
                out[float(self.omega_b[b])] = (np.sort(self.perm[lo:hi]), float(self.gam[b]))
        return out

    def check_consistency(self) -> None:
        """Compare every incremental cache with a from-scratch recomputation."""
        tb = self.table
        v_true = violated(self.code, self.error).astype(np.int64)
        if not np.array_equal(v_true, self.viol):
            raise EngineFault("violated set disagrees with error frame syndrome")
        lv = K.compute_levels(tb.ev_ptr, tb.ev_chk, self.viol)
        if not np.array_equal(lv, self.level):
            raise EngineFault("cached event levels are stale")
        bucket = tb.ev_deg - 2 * self.level + tb.maxdeg
        for b in range(tb.nb):
            members = self.perm[self.bstart[b]:self.bstart[b + 1]]
            if not (bucket[members] == b).all():
                raise EngineFault("bucket membership is stale")
        if not np.array_equal(self.perm[self.pos], np.arange(tb.n_events)):
            raise EngineFault("perm/pos mismatch")
        omegas = self.event_omegas()
        rates = np.asarray(gamma(omegas, self.beta)).reshape(-1)
        if self.forbid_creation:
            rates[omegas < 0] = 0.0
        direct = rates.sum()
        if abs(direct - self.total_rate) > 1e-9 * max(direct, 1e-300):
            raise EngineFault("total rate disagrees with direct sum")
        from ..codes.base import class_bits
        if class_bits(self.code, self.error) != self.class_bits:
            raise EngineFault("logical class cache is stale")
        if self.track_pairs:
            for s in range(2):
                for c in self.vlist[s, :self.vcount[s]]:
                    p = self.partner[c]
                    if p < 0 or self.partner[p] != c or not self.viol[p]:
                        raise EngineFault("pair bookkeeping broken")

    # pair statistics
    def pair_separations(self) -> np.ndarray:
        if not self.is_toric:
            return np.zeros(0)
        L = self.L
        seps = []
        for s in range(2):
            for c in self.vlist[s, :self.vcount[s]]:
                p = self.partner[c]
                if p > c:
                    dx = abs(self.cx[c] - self.cx[p])
                    dy = abs(self.cy[c] - self.cy[p])
                    dx, dy = min(dx, L - dx), min(dy, L - dy)
                    seps.append(np.hypot(dx, dy))
        return np.asarray(seps)

    def snapshot(self) -> dict:
        seps = self.pair_separations()
        return {"t": self.t, "n_anyons": self.n_violated, "energy": self.energy,
                "max_sep": float(seps.max()) if len(seps) else 0.0}

    # stepping
    def _decoder_buffers(self):
        if self._dbuf is None:
            m = self.code.m
            self._dbuf = (np.empty(m, np.int64), np.empty(m, np.uint8), np.empty(m, np.int64),
                          np.empty(m, np.int64), np.empty(m, np.int64), np.empty(m, np.int64),
                          np.zeros(2, np.int64))
        return self._dbuf

    def advance(self, rng, t_stop=np.inf, max_events=np.iinfo(np.int64).max,
                decoder=None, stop_separation=None, record=None, interval=0.0):
        """Run the compiled loop; returns the terminal reason string.

        ``decoder`` is None, an inline ``TableDecoder`` or ``ToricInline``.
        ``record`` is an optional ``EventRecorder``. A positive ``interval``
        returns "checkpoint" whenever a changed, excited state reaches a
        multiple of ``interval``; the caller decodes and calls again.
        """
        tb = self.table
        dec_mode, dec_table, seam, smask = 0, _EMPTY_I64, _EMPTY_SEAM, _ZERO2
        exposed = self.code.exposed_mask
        if decoder is not None:
            dec_mode, dec_table, seam, smask = decoder.kernel_args()
        sep2 = 0.0 if stop_separation is None else float(stop_separation) ** 2
        rec = record or _NO_RECORD
        rec.ints_slot(self.ints)
        st = K.run_events(tb.ev_ptr, tb.ev_chk, tb.chk_ptr, tb.chk_ev, tb.ev_q, tb.ev_kind,
                          tb.ev_deg, tb.ev_logmask, tb.maxdeg, self.gam, self.omega_b,
                          self.viol, self.level, self.perm, self.pos, self.bstart,
                          self.frame_x, self.frame_z, self.ints, self.fl,
                          self.chk_sec, self.vlist, self.vcount, self.vpos,
                          self.occ, self.cx, self.cy, self.L, seam, smask, exposed,
                          self.partner, self.ctime, self.track_pairs, self.last_ctime,
                          dec_mode, dec_table, sep2, *self._decoder_buffers(),
                          rec.t, rec.e, rec.w, float(t_stop), int(max_events), rng,
                          float(interval or 0.0))
        if st == K.ST_FAULT:
            raise EngineFault("total rate vanished")
        return STATUS_NAMES[st]

    def step(self, rng):
        """One event; returns ((qubit, kind), dt)."""
        rec = EventRecorder(1)
        t0 = self.t
        self.advance(rng, max_events=1, record=rec)
        e = int(rec.e[0])
        return self.table.event_name(e), self.t - t0

    @property
    def failure_ctime(self) -> float:
        return float(self.fl[K.F_FAIL_CTIME])


class EventRecorder:
    """Preallocated event log filled by the kernel."""

    def __init__(self, capacity: int):
        self.t = np.zeros(capacity)
        self.e = np.zeros(capacity, np.int64)
        self.w = np.zeros(capacity)
        self._ints = None
        self._base = 0

    def ints_slot(self, ints):
        # the kernel counts records in ints[I_NREC]; reset it per recorder
        if self._ints is not ints:
            self._ints = ints
            ints[K.I_NREC] = 0
        self._base = 0

    @property
    def count(self) -> int:
        return 0 if self._ints is None else int(self._ints[K.I_NREC])

    def trajectory(self, table, seed, terminal, t_final) -> KmcTrajectory:
        n = self.count
        return KmcTrajectory(seed, self.t[:n].copy(), self.e[:n].copy(), self.w[:n].copy(),
                             table, terminal, t_final)


_EMPTY_I64 = np.zeros(1, np.int64)
_EMPTY_SEAM = np.zeros((2, 2), np.int64)
_ZERO2 = np.zeros(2, np.int64)
_NO_RECORD = EventRecorder(0)


class TableDecoder:
    """Syndrome -> correction class lookup for codes with few checks."""

    def __init__(self, code: StabilizerCode, decode_fn=None):
        if code.m > 20:
            raise ValueError("lookup table limited to 20 checks")
        from ..decoders.cluster import cluster_decode
        from ..decoders.cluster import InvalidSyndrome
        from ..codes.base import class_bits
        decode_fn = decode_fn or cluster_decode
        table = np.full(1 << code.m, -1, np.int64)
        for idx in range(1 << code.m):
            bits = np.array([(idx >> c) & 1 for c in range(code.m)], np.uint8)
            try:
                res = decode_fn(code, bits)
            except InvalidSyndrome:
                continue
            table[idx] = class_bits(code, res.correction)
        self.table = table

    def kernel_args(self):
        return 1, self.table, _EMPTY_SEAM, _ZERO2


class ToricInline:
    """Inline toric clustering decoder evaluated after every event."""

    def __init__(self, code: StabilizerCode):
        from ..decoders.toric_fast import toric_seam_bits
        if code.name != "toric2d" or code.L < 3:
            raise ValueError("inline toric decoder needs a toric code with L >= 3")
        self.seam = toric_seam_bits(code)
        self.sector_mask = self.seam[:, 0] | self.seam[:, 1]

    def kernel_args(self):
        return 2, _EMPTY_I64, self.seam, self.sector_mask


def run(state: SyndromeState, rng, t_max=np.inf, max_events=None, cadence="none",
        decoder=None, interval=None, generic_decode=None, stop_separation=None,
        record_capacity=0, snapshot_every=None, seed=None) -> KmcTrajectory:
    """Evolve ``state`` until a stopping rule fires.

    cadence "every-event" needs an inline ``decoder``; "interval" calls
    ``generic_decode(state) -> bool`` (True = failure) on the grid
    k*``interval``, skipping grid points where nothing changed and settling
    states with no violated checks inside the compiled loop.
    """
    rec = EventRecorder(record_capacity)
    cap = np.iinfo(np.int64).max if max_events is None else int(max_events)
    snaps = []
    if cadence == "every-event":
        if decoder is None:
            raise InvalidParameter("every-event cadence requires an inline decoder")
        reason = state.advance(rng, t_stop=t_max, max_events=cap, decoder=decoder,
                               stop_separation=stop_separation, record=rec)
    elif cadence == "interval":
        if interval is None or generic_decode is None:
            raise InvalidParameter("interval cadence requires interval and decode function")
        while True:
            reason = state.advance(rng, t_stop=t_max, max_events=cap - state.n_events,
                                   stop_separation=stop_separation, record=rec,
                                   interval=interval)
            if reason != "checkpoint":
                break
            if generic_decode(state):
                reason = "decoder-failure"
                break
            if snapshot_every:
                snaps.append(state.snapshot())
    elif cadence == "none":
        reason = state.advance(rng, t_stop=t_max, max_events=cap,
                               stop_separation=stop_separation, record=rec)
    else:
        raise InvalidParameter(f"unknown cadence {cadence!r}")
    traj = rec.trajectory(state.table, seed, reason, state.t)
    snaps.append(state.snapshot())
    traj.snapshots = snaps
    return traj
