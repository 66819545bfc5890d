"""Coherence-time estimators.

Method 1 averages the first decoder-failure time. Method 2 decodes every
sample on a geometric grid of checkpoints and reports the earliest one at
which the success fraction drops below a threshold.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..io import stream_seed
from .core import (NoEstimate, Outcome, get_failure_check, make_state, map_samples,
                   run_to_failure)
from .toric import point_seed


@dataclass
class CoherenceEstimate:
    method: int
    tau: float
    stderr: float
    samples: int
    censored_fraction: float
    outcomes: list | None = None
    checkpoints: np.ndarray | None = None
    success: np.ndarray | None = None


def _m1_worker(payload, i):
    name, L, beta, seed, kw, thermal = payload
    if not thermal:
        # control: nothing acts on the memory, every sample runs out the clock
        return Outcome(kw["t_max"], True, 0, 0, 0, 0.0, 0.0)
    return run_to_failure(name, L, beta, np.random.default_rng(stream_seed(seed, i)), **kw)


def method1(name, L, beta, samples, seed, threads=1, thermal=True, **kw) -> CoherenceEstimate:
    ps = point_seed(seed, L or 0, beta)
    kw.setdefault("t_max", math.inf)
    outs = map_samples(_m1_worker, (name, L, beta, ps, kw, thermal), samples, threads)
    fails = np.array([o.tau for o in outs if not o.censored])
    cf = 1.0 - len(fails) / samples
    if len(fails) == 0:
        err = NoEstimate(f"all {samples} samples censored at t_max={kw['t_max']}")
        err.outcomes = outs
        raise err
    se = fails.std(ddof=1) / math.sqrt(len(fails)) if len(fails) > 1 else float("nan")
    return CoherenceEstimate(1, float(fails.mean()), float(se), samples, cf, outs)


def checkpoint_grid(t_first, t_last, n) -> np.ndarray:
    return np.geomspace(t_first, t_last, n)


def _m2_block(args):
    """Advance a block of samples through some checkpoints; states travel back."""
    (name, L, beta, seed, event_set), indices, states, times = args
    if states is None:
        states = [(make_state(name, L, beta, event_set), np.random.default_rng(stream_seed(seed, i)))
                  for i in indices]
    check = get_failure_check(name, L)
    ok = np.zeros((len(states), len(times)), bool)
    for j, (st, rng) in enumerate(states):
        for k, t in enumerate(times):
            st.advance(rng, t_stop=float(t))
            ok[j, k] = not check(st)
    return indices, states, ok


def method2(name, L, beta, samples, seed, grid, threshold=0.99, threads=1,
            event_set="XYZ", window=4) -> CoherenceEstimate:
    """Success fraction on ``grid``; stops at the first checkpoint below threshold.

    All samples move through the grid together, ``window`` checkpoints at a
    time, so no trajectory is simulated past the answer. Each sample keeps
    its own stream, so results do not depend on ``threads`` or ``window``.
    """
    grid = np.asarray(grid, float)
    payload = (name, L, beta, point_seed(seed, L or 0, beta), event_set)
    threads = threads or os.cpu_count() or 1
    blocks = [list(range(w, samples, threads)) for w in range(min(threads, samples))]
    states = [None] * len(blocks)
    fracs = []
    pool = ProcessPoolExecutor(len(blocks)) if len(blocks) > 1 else None
    try:
        for k0 in range(0, len(grid), window):
            times = grid[k0:k0 + window]
            jobs = [(payload, b, st, times) for b, st in zip(blocks, states)]
            done = pool.map(_m2_block, jobs) if pool else map(_m2_block, jobs)
            ok = np.zeros((samples, len(times)), bool)
            for w, (idx, st, rows) in enumerate(done):
                states[w] = st
                ok[idx] = rows
            fracs.extend(ok.mean(axis=0))
            if min(fracs[-len(times):]) < threshold:
                break
    finally:
        if pool:
            pool.shutdown()
    frac = np.asarray(fracs)
    below = np.flatnonzero(frac < threshold)
    if len(below) == 0:
        raise NoEstimate(f"success fraction stayed above {threshold} up to t={grid[-1]}")
    k = int(below[0])
    return CoherenceEstimate(2, float(grid[k]), float("nan"), samples, 0.0,
                             checkpoints=grid[:len(frac)], success=frac)


def coherence_time(name, L, beta, samples, seed, method=1, threads=1, **kw) -> CoherenceEstimate:
    if method == 1:
        return method1(name, L, beta, samples, seed, threads, **kw)
    if method == 2:
        return method2(name, L, beta, samples, seed, threads=threads, **kw)
    raise ValueError(f"unknown method {method}")
