"""Code-capacity threshold scans and majority-vote readout."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..codes.base import violated
from ..io import stream_seed
from ..pauli import PauliOperator
from .cluster import ClusterDecoder
from .toric_fast import ToricDecoderWorkspace


class WideIntervalWarning(UserWarning):
    pass


@dataclass
class ReadoutResult:
    bit: int
    tie: bool

    @property
    def failed(self) -> bool:
        return self.tie


def majority_readout(model, spins) -> ReadoutResult:
    """Sign of the magnetization; a zero sum is flagged as a tie."""
    total = int(np.sum(spins))
    if total == 0:
        return ReadoutResult(0, True)
    return ReadoutResult(1 if total > 0 else -1, False)


class BitFlipTrial:
    """Decode i.i.d. X errors on one code; reusable across samples."""

    def __init__(self, code):
        self.code = code
        self.mask = code.exposed_mask
        # X errors flip only the classes read by Z-bar logicals (odd bits)
        self.lz = np.stack([g.z_bits for g in code.logical_generators]).astype(np.int64)
        if code.name == "toric2d" and code.L >= 3:
            self.toric = ToricDecoderWorkspace(code)
            self.decoder = None
        else:
            self.toric = None
            self.decoder = ClusterDecoder(code)

    def _bits(self, x):
        v = self.lz @ x & 1
        return int(sum(int(b) << i for i, b in enumerate(v)))

    def __call__(self, p, rng) -> bool:
        code = self.code
        x = (rng.random(code.n) < p).astype(np.int64)
        if not x.any():
            return False
        viol = violated(code, PauliOperator.from_bits(x, np.zeros_like(x)))
        err_bits = self._bits(x)
        if self.toric is not None:
            corr_bits = self.toric.decode_sector(viol, 1)[0]
        else:
            res = self.decoder.decode(viol)
            corr_bits = self._bits(res.correction.x_bits.astype(np.int64))
        return ((err_bits ^ corr_bits) & self.mask) != 0


@dataclass
class ThresholdPoint:
    code: str
    L: int
    p: float
    samples: int
    failures: int

    @property
    def rate(self) -> float:
        return self.failures / self.samples

    @property
    def stderr(self) -> float:
        r = self.rate
        return math.sqrt(r * (1 - r) / self.samples)

    def row(self) -> dict:
        return {"code": self.code, "L": self.L, "p": self.p, "samples": self.samples,
                "failures": self.failures, "rate": self.rate, "stderr": self.stderr}


@dataclass
class ThresholdResult:
    points: list
    crossing: float | None
    pair_crossings: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        return [pt.row() for pt in self.points]


def _trial_worker(payload, i):
    name, L, p, seed = payload
    trial = _trial_cache(name, L)
    return trial(p, np.random.default_rng(stream_seed(seed, i)))


_TRIALS: dict = {}


def _trial_cache(name, L):
    key = (name, L)
    if key not in _TRIALS:
        from ..experiments.core import get_code
        _TRIALS[key] = BitFlipTrial(get_code(name, L))
    return _TRIALS[key]


def _line_crossing(p, a, b):
    """Intersection of least-squares lines through (p, a) and (p, b)."""
    ka, ca = np.polyfit(p, a, 1)
    kb, cb = np.polyfit(p, b, 1)
    if ka == kb:
        return None
    return (cb - ca) / (ka - kb)


def estimate_crossing(points) -> tuple[float | None, dict]:
    """Pairwise crossings of failure-rate curves, averaged over size pairs.

    For each pair of sizes the grid bracket where the curves swap order is
    widened by one point on each side, and straight lines fitted to each
    curve there are intersected.
    """
    sizes = sorted({pt.L for pt in points})
    grid = sorted({pt.p for pt in points})
    rate = {(pt.L, pt.p): pt.rate for pt in points}
    out = {}
    for la, lb in itertools.combinations(sizes, 2):
        ps = np.array(grid)
        a = np.array([rate[(la, p)] for p in grid])
        b = np.array([rate[(lb, p)] for p in grid])
        d = b - a
        # larger codes fail less below threshold: look for d turning positive
        idx = [i for i in range(len(d) - 1) if d[i] < 0 <= d[i + 1] or d[i] <= 0 < d[i + 1]]
        if idx:
            i = idx[0]
            lo, hi = max(i - 1, 0), min(i + 3, len(ps))
        else:
            lo, hi = 0, len(ps)
        if hi - lo < 2:
            continue
        x = _line_crossing(ps[lo:hi], a[lo:hi], b[lo:hi])
        if x is not None:
            out[(la, lb)] = float(x)
    if not out:
        return None, out
    return float(np.mean(list(out.values()))), out


def threshold_scan(name, p_grid, sizes, samples, seed, threads=1) -> ThresholdResult:
    from ..experiments.core import map_samples
    from ..experiments.toric import point_seed
    if samples < 100:
        warnings.warn(f"{samples} samples per point give wide error bars", WideIntervalWarning,
                      stacklevel=2)
    points = []
    for L in sizes:
        for p in p_grid:
            p = float(p)
            if p == 0.0:
                points.append(ThresholdPoint(name, L, p, samples, 0))
                continue
            ps = point_seed(seed, L, p)
            fails = map_samples(_trial_worker, (name, L, p, ps), samples, threads)
            points.append(ThresholdPoint(name, L, p, samples, int(sum(fails))))
    crossing, pairs = estimate_crossing(points)
    return ThresholdResult(points, crossing, pairs)
