"""Cubic-code thermal suite: tau(L, beta), optimal size, and scaling-law fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..codes import InvalidSize, cubic_allowed
from .fitting import FitError, fit
from .toric import failure_samples, summarize


def decode_interval(beta: float, scale: float = 1e-10) -> float:
    return scale * math.exp(4 * beta)


@dataclass
class CubicSuite:
    betas: list
    sizes: list
    tau: dict                      # (L, beta) -> PointSummary
    outcomes: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    exponents: dict = field(default_factory=dict)   # beta -> FitResult
    exponent_line: object = None                    # exponent vs beta
    L_opt: dict = field(default_factory=dict)
    tau_opt: dict = field(default_factory=dict)
    tau_opt_fit: object = None
    L_opt_fit: object = None
    extracted: dict = field(default_factory=dict)


def cubic_point(L, beta, samples, seed, threads=1, event_set="XYZ", t_max=math.inf,
                interval_scale=1e-10):
    if not cubic_allowed(L):
        raise InvalidSize(f"L={L} is not an allowed cubic-code size")
    pseed, outs = failure_samples("cubic", L, beta, samples, seed, threads, event_set=event_set,
                                  t_max=t_max, cadence="interval",
                                  interval=decode_interval(beta, interval_scale))
    return pseed, outs, summarize(L, beta, outs)


def growing_sizes(sizes, taus):
    """Sizes up to and including the one with the largest tau."""
    k = int(np.argmax(taus))
    return sizes[:k + 1], taus[:k + 1]


def extract_constants(exponent_slope: float, quadratic: float) -> dict:
    """Barrier and scaling constant from the two partial-self-correction fits.

    ln tau ~ kappa*Delta*beta * ln L fixes kappa*Delta, and the optimum's
    ln tau ~ (kappa*Delta^2/3) beta^2 fixes kappa*Delta^2.
    """
    if exponent_slope <= 0:
        raise FitError("exponent slope must be positive to extract constants")
    delta = 3 * quadratic / exponent_slope
    return {"Delta": delta, "kappa": exponent_slope / delta if delta else float("nan")}


def analyse(suite: CubicSuite) -> CubicSuite:
    sizes = sorted(suite.sizes)
    for b in suite.betas:
        taus = np.array([suite.tau[(L, b)].tau for L in sizes])
        k = int(np.argmax(taus))
        suite.L_opt[b] = sizes[k]
        suite.tau_opt[b] = float(taus[k])
        gs, gt = growing_sizes(sizes, taus)
        if len(gs) >= 3:
            suite.exponents[b] = fit(gs, gt, "power-law-in-L")
    eb = sorted(suite.exponents)
    if len(eb) >= 3:
        suite.exponent_line = fit(eb, [suite.exponents[b]["exponent"] for b in eb], "linear")
    bs = sorted(suite.betas)
    if len(bs) >= 4:
        suite.tau_opt_fit = fit(bs, [suite.tau_opt[b] for b in bs], "psc-quadratic")
        suite.L_opt_fit = fit(bs, [suite.L_opt[b] for b in bs], "arrhenius")
    if suite.exponent_line is not None and suite.tau_opt_fit is not None:
        suite.extracted = extract_constants(suite.exponent_line["slope"],
                                            suite.tau_opt_fit["quadratic"])
    return suite


def cubic_suite(betas, sizes, samples, seed, threads=1, **kw) -> CubicSuite:
    suite = CubicSuite(list(betas), sorted(sizes), {})
    for b in suite.betas:
        for L in suite.sizes:
            ps, outs, summ = cubic_point(L, b, samples, seed, threads, **kw)
            suite.tau[(L, b)] = summ
            suite.outcomes[(L, b)] = outs
            suite.seeds[(L, b)] = ps
    return analyse(suite)
