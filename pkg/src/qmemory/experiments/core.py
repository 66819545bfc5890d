"""Shared sample machinery: cached codes, decoders, failure runs, fan-out."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..codes import build_code, class_bits
from ..decoders.cluster import ClusterDecoder
from ..decoders.toric_fast import ToricDecoderWorkspace
from ..energy import EnergyModel
from ..io import stream_seed
from ..kmc.engine import EVENT_SETS, EventTable, SyndromeState, TableDecoder, ToricInline


class NoEstimate(RuntimeError):
    """Every sample was censored."""


@lru_cache(maxsize=32)
def get_code(name: str, L: int | None):
    return build_code(name, L)


@lru_cache(maxsize=32)
def get_table(name: str, L: int | None, event_set: str) -> EventTable:
    return EventTable(get_code(name, L), EVENT_SETS[event_set])


@lru_cache(maxsize=32)
def get_inline_decoder(name: str, L: int | None):
    code = get_code(name, L)
    if name == "toric2d" and L >= 3:
        return ToricInline(code)
    if code.m <= 20:
        return TableDecoder(code)
    return None


@lru_cache(maxsize=32)
def get_failure_check(name: str, L: int | None) -> "GenericFailureCheck":
    return GenericFailureCheck(get_code(name, L))


class GenericFailureCheck:
    """Decode the current state with the box decoder; True on logical failure."""

    def __init__(self, code):
        self.code = code
        self.toric = ToricDecoderWorkspace(code) if code.name == "toric2d" and code.L >= 3 else None
        self.decoder = None if self.toric else ClusterDecoder(code)
        self.last_bits = 0

    def correction_bits(self, viol) -> int:
        if self.toric is not None:
            return self.toric.decode_sector(viol, 0)[0] ^ self.toric.decode_sector(viol, 1)[0]
        res = self.decoder.decode(viol)
        return class_bits(self.code, res.correction)

    def __call__(self, state) -> bool:
        if state.n_violated == 0:
            self.last_bits = state.class_bits & self.code.exposed_mask
            return self.last_bits != 0
        diff = (self.correction_bits(state.viol) ^ state.class_bits) & self.code.exposed_mask
        self.last_bits = diff
        return diff != 0


@dataclass
class Outcome:
    tau: float
    censored: bool
    failure_class: int
    n_events: int
    n_anyons: int
    mean_sep: float
    max_sep: float
    ctime: float = float("nan")


def make_state(name, L, beta, event_set="XYZ", delta=1.0, **kw) -> SyndromeState:
    code = get_code(name, L)
    return SyndromeState(code, beta, EnergyModel(delta=delta), table=get_table(name, L, event_set), **kw)


def run_to_failure(name, L, beta, rng, t_max=math.inf, event_set="XYZ", delta=1.0,
                   cadence="every-event", interval=None, max_events=None) -> Outcome:
    """One thermal trajectory from the code space until the decoder first fails."""
    st = make_state(name, L, beta, event_set, delta)
    cap = np.iinfo(np.int64).max if max_events is None else int(max_events)
    fail_bits = 0
    if cadence == "every-event":
        dec = get_inline_decoder(name, L)
        if dec is None:
            raise ValueError(f"no inline decoder for {name}; use interval cadence")
        reason = st.advance(rng, t_stop=t_max, max_events=cap, decoder=dec)
        if reason == "decoder-failure":
            check = get_failure_check(name, L) if name == "toric2d" else None
            if check is not None:
                check(st)
                fail_bits = check.last_bits
            else:
                fail_bits = (dec.table[st.ints[3]] ^ st.class_bits) & st.code.exposed_mask
    elif cadence == "interval":
        check = get_failure_check(name, L)
        while True:
            reason = st.advance(rng, t_stop=t_max, max_events=cap - st.n_events, interval=interval)
            if reason == "decoder-failure":
                fail_bits = st.class_bits & st.code.exposed_mask
                break
            if reason != "checkpoint":
                break
            if check(st):
                reason = "decoder-failure"
                fail_bits = check.last_bits
                break
    else:
        raise ValueError(f"unknown cadence {cadence!r}")
    failed = reason == "decoder-failure"
    seps = st.pair_separations()
    return Outcome(st.t, not failed, int(fail_bits), st.n_events, st.n_violated,
                   float(seps.mean()) if len(seps) else 0.0,
                   float(seps.max()) if len(seps) else 0.0,
                   st.failure_ctime if failed else float("nan"))


def _chunk_worker(args):
    fn, payload, indices = args
    return [(i, fn(payload, i)) for i in indices]


def map_samples(fn, payload, n_samples: int, threads: int | None = None):
    """Evaluate fn(payload, i) for i < n_samples; results in index order.

    Samples are dealt to workers round-robin by index, so the assignment and
    every per-sample stream are independent of the worker count.
    """
    threads = threads or os.cpu_count() or 1
    if threads <= 1 or n_samples < 2:
        return [fn(payload, i) for i in range(n_samples)]
    jobs = [(fn, payload, list(range(w, n_samples, threads))) for w in range(threads)]
    out = [None] * n_samples
    with ProcessPoolExecutor(threads) as ex:
        for chunk in ex.map(_chunk_worker, jobs):
            for i, res in chunk:
                out[i] = res
    return out


def seeds_for(master: int, n: int, offset: int = 0) -> list[int]:
    return [stream_seed(master, offset + i) for i in range(n)]
