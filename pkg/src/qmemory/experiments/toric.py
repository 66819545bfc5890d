"""Toric-code studies: pair survival, small- and large-size coherence suites."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..codes import toric_qubit
from ..io import ExperimentRecord, stream_seed
from ..pauli import PauliOperator
from .core import NoEstimate, Outcome, get_code, make_state, map_samples, run_to_failure


class RegimeWarning(UserWarning):
    pass


def expected_pairs(L: int, beta: float, delta: float = 1.0) -> float:
    """Equilibrium anyon pairs in one sector, (L^2/2) exp(-beta*delta)."""
    return 0.5 * L * L * math.exp(-beta * delta)


def point_seed(master: int, *key) -> int:
    """Seed of one (L, beta, ...) grid point, independent of grid order."""
    h = 0
    for k in key:
        h = stream_seed(h, int(round(float(k) * 1_000_000)))
    return stream_seed(master, h)


# pair survival

def _pair_worker(payload, i):
    L, beta, seed, cap = payload
    rng = np.random.default_rng(stream_seed(seed, i))
    code = get_code("toric2d", L)
    # one X on a vertical edge: two horizontally adjacent plaquette anyons.
    # With creation disabled, Y and Z events could only act by creating star
    # anyons, so the pair is driven by X events alone.
    err = PauliOperator.single(code.n, toric_qubit(L, 0, 0, 1), "X")
    st = make_state("toric2d", L, beta, "X", error=err, forbid_creation=True)
    reason = st.advance(rng, max_events=cap, stop_separation=L / 2)
    return reason == "separation-reached", st.n_events, reason


@dataclass
class PairSurvival:
    L: int
    beta: float
    samples: int
    survived: int
    capped: int = 0

    @property
    def pi(self) -> float:
        return self.survived / self.samples

    @property
    def stderr(self) -> float:
        p = self.pi
        return math.sqrt(max(p * (1 - p), 1e-300) / self.samples)


def pair_survival(L: int, beta: float, samples: int = 10_000, seed: int = 1,
                  threads: int = 1, max_events: int = 10**9) -> PairSurvival:
    """Fraction of freshly created pairs that separate to L/2 before annihilating."""
    ps = point_seed(seed, L, beta)
    res = map_samples(_pair_worker, (L, beta, ps, max_events), samples, threads)
    capped = sum(1 for r in res if r[2] == "max_events")
    return PairSurvival(L, beta, samples, sum(1 for r in res if r[0]), capped)


# failure-time suites

def _failure_worker(payload, i):
    name, L, beta, seed, kw = payload
    rng = np.random.default_rng(stream_seed(seed, i))
    return run_to_failure(name, L, beta, rng, **kw)


def failure_samples(name, L, beta, samples, seed, threads=1, **kw) -> tuple[int, list[Outcome]]:
    ps = point_seed(seed, L, beta)
    return ps, map_samples(_failure_worker, (name, L, beta, ps, kw), samples, threads)


def outcomes_to_records(exp_id, name, L, beta, pseed, outcomes) -> list[ExperimentRecord]:
    return [ExperimentRecord(exp_id, name, int(L or 0), float(beta), stream_seed(pseed, i), i,
                             o.tau, o.censored, o.failure_class, o.n_events, o.n_anyons,
                             o.mean_sep, o.max_sep)
            for i, o in enumerate(outcomes)]


@dataclass
class PointSummary:
    L: int
    beta: float
    samples: int
    failed: int
    tau: float
    tau_err: float
    censored_fraction: float
    extra: dict = field(default_factory=dict)


def summarize(L, beta, outcomes, max_censored=0.05) -> PointSummary:
    fails = [o for o in outcomes if not o.censored]
    if not fails:
        raise NoEstimate(f"all {len(outcomes)} samples censored at L={L}, beta={beta}")
    taus = np.array([o.tau for o in fails])
    cf = 1 - len(fails) / len(outcomes)
    if cf > max_censored:
        warnings.warn(f"censored fraction {cf:.3f} exceeds {max_censored} at L={L}, beta={beta}",
                      RegimeWarning, stacklevel=2)
    err = taus.std(ddof=1) / math.sqrt(len(taus)) if len(taus) > 1 else float("nan")
    return PointSummary(L, beta, len(outcomes), len(fails), float(taus.mean()), float(err), cf)


def small_limit_point(L, beta, samples, seed, threads=1, event_set="XYZ", t_max=math.inf):
    if expected_pairs(L, beta) > 1:
        warnings.warn(f"L={L}, beta={beta} is outside the low-density regime",
                      RegimeWarning, stacklevel=2)
    pseed, outs = failure_samples("toric2d", L, beta, samples, seed, threads,
                                  event_set=event_set, t_max=t_max)
    summ = summarize(L, beta, outs)
    fails = [o for o in outs if not o.censored]
    tc = np.array([o.ctime for o in fails])
    tm = np.array([o.tau - o.ctime for o in fails])
    n = len(fails)
    summ.extra = {
        "tau_c": float(tc.mean()), "tau_c_err": float(tc.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan"),
        "tau_m": float(tm.mean()), "tau_m_err": float(tm.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan"),
    }
    return pseed, outs, summ


def large_limit_point(L, beta, samples, seed, threads=1, event_set="XYZ", t_max=math.inf):
    if L <= math.exp(beta / 2):
        warnings.warn(f"L={L} is not much larger than exp(beta/2) at beta={beta}",
                      RegimeWarning, stacklevel=2)
    pseed, outs = failure_samples("toric2d", L, beta, samples, seed, threads,
                                  event_set=event_set, t_max=t_max)
    summ = summarize(L, beta, outs)
    fails = [o for o in outs if not o.censored]
    summ.extra = {
        "density_at_failure": float(np.mean([o.n_anyons for o in fails]) / (2 * L * L)),
        "mean_sep": float(np.mean([o.mean_sep for o in fails])),
        "max_sep": float(np.mean([o.max_sep for o in fails])),
    }
    return pseed, outs, summ


def equilibrium_pairs(L, beta, rng, t_burn, t_measure, event_set="XYZ", n_probe=200):
    """Time-averaged pairs per sector, sampled on a uniform probe grid."""
    st = make_state("toric2d", L, beta, event_set)
    st.advance(rng, t_stop=t_burn)
    counts = []
    for k in range(1, n_probe + 1):
        st.advance(rng, t_stop=t_burn + t_measure * k / n_probe)
        counts.append(st.n_violated / 4.0)  # two sectors, two anyons per pair
    return float(np.mean(counts))
