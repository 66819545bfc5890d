"""Least-squares fits on linearising transforms, with bootstrap intervals."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

BOOTSTRAP_SEED = 0x5EED
BOOTSTRAP_ROUNDS = 400


class FitError(ValueError):
    pass


@dataclass
class FitResult:
    model: str
    params: dict
    residual_norm: float
    ci: dict = field(default_factory=dict)
    n_points: int = 0

    def __getitem__(self, key):
        return self.params[key]

    def report(self) -> str:
        lines = [f"model: {self.model}", f"points: {self.n_points}",
                 f"residual_norm: {self.residual_norm:.6g}"]
        for k, v in self.params.items():
            lo, hi = self.ci.get(k, (float("nan"), float("nan")))
            lines.append(f"{k}: {v:.6g}  [{lo:.6g}, {hi:.6g}]")
        return "\n".join(lines)


def _design(model, x):
    """(design matrix, transform of y, parameter names) for the linear models."""
    x = np.asarray(x, float)
    if model == "linear":
        return np.column_stack([x, np.ones_like(x)]), lambda y: y, ["slope", "intercept"]
    if model == "proportional":
        return x[:, None], lambda y: y, ["slope"]
    if model == "arrhenius":
        return np.column_stack([x, np.ones_like(x)]), np.log, ["exponent", "log_prefactor"]
    if model == "power-law-in-L":
        return np.column_stack([np.log(x), np.ones_like(x)]), np.log, ["exponent", "log_prefactor"]
    if model == "psc-quadratic":
        return np.column_stack([x ** 2, x, np.ones_like(x)]), np.log, ["quadratic", "linear", "constant"]
    if model == "arrhenius-power":
        # x columns: (beta, L); ln y = c + a beta + b ln L
        if x.ndim != 2 or x.shape[1] != 2:
            raise FitError("arrhenius-power needs two-column x = (beta, L)")
        return (np.column_stack([x[:, 0], np.log(x[:, 1]), np.ones(len(x))]), np.log,
                ["beta_exponent", "L_exponent", "log_prefactor"])
    raise FitError(f"unknown model {model!r}")


MODELS = ("linear", "proportional", "arrhenius", "power-law-in-L", "psc-quadratic", "arrhenius-power", "exp-poly")


def _linear_solve(a, b, w):
    aw = a * w[:, None]
    bw = b * w
    if np.linalg.matrix_rank(aw) < a.shape[1]:
        raise FitError("design matrix is rank deficient")
    coef, *_ = np.linalg.lstsq(aw, bw, rcond=None)
    return coef, float(np.linalg.norm(aw @ coef - bw))


def _exp_poly(x, y, w):
    # y = A exp(c x) (1 + r x + s x^2); linear in (A, Ar, As) once c is fixed,
    # so profile the relative residual over c
    if len(np.unique(x)) < 5:
        raise FitError("exp-poly needs at least five distinct x values")
    basis = np.column_stack([np.ones_like(x), x, x * x])
    ww = w / y

    def inner(c):
        a = basis * (np.exp(c * x) * ww)[:, None]
        coef, *_ = np.linalg.lstsq(a, y * ww, rcond=None)
        return coef, float(np.linalg.norm(a @ coef - y * ww))

    c0 = np.polyfit(x, np.log(y), 1)[0]
    grid = np.linspace(c0 - 3.0, c0 + 3.0, 121)
    vals = np.array([inner(c)[1] for c in grid])
    # the profile can have narrow wells, so refine every local grid minimum
    n = len(grid)
    cands = [k for k in range(n) if vals[k] <= vals[max(k - 1, 0)] and vals[k] <= vals[min(k + 1, n - 1)]]
    best = None
    for k in cands:
        res = minimize_scalar(lambda c: inner(c)[1], bounds=(grid[max(k - 1, 0)], grid[min(k + 1, n - 1)]),
                              method="bounded", options={"xatol": 1e-12})
        if best is None or res.fun < best.fun:
            best = res
    c = best.x
    coef, rn = inner(c)
    if np.linalg.matrix_rank(basis * ww[:, None]) < 3 or coef[0] == 0:
        raise FitError("exp-poly fit is rank deficient")
    return np.array([c, coef[0], coef[1] / coef[0], coef[2] / coef[0]]), rn


def _fit_once(model, x, y, w):
    if model == "exp-poly":
        return _exp_poly(np.asarray(x, float), y, w)
    a, tf, _ = _design(model, x)
    return _linear_solve(a, tf(y), w)


def param_names(model, x=None) -> list[str]:
    if model == "exp-poly":
        return ["exponent", "prefactor", "r", "s"]
    return _design(model, np.ones((1, 2)) if model == "arrhenius-power" else np.ones(1))[2]


def fit(x, y, model: str, sigma=None, bootstrap: int = BOOTSTRAP_ROUNDS,
        seed: int = BOOTSTRAP_SEED) -> FitResult:
    """Fit ``y`` against ``x`` under ``model``.

    ``sigma`` are absolute errors on y; log models convert them to relative
    errors. Confidence intervals are 2.5/97.5 percentiles of a case-resampling
    bootstrap drawn from a fixed seed, so refits are bit-identical.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    names = param_names(model)
    if len(y) < len(names) + 1:
        raise FitError(f"{model} needs at least {len(names) + 1} points, got {len(y)}")
    logy = model not in ("linear", "proportional")
    if logy and (y <= 0).any():
        raise FitError("log-transformed model needs positive y")
    if sigma is None:
        w = np.ones(len(y))
    else:
        s = np.asarray(sigma, float) / (y if logy else 1.0)
        if (s <= 0).any() or not np.isfinite(s).all():
            raise FitError("sigma must be positive and finite")
        w = 1.0 / s
    coef, rn = _fit_once(model, x, y, w)
    params = dict(zip(names, map(float, coef)))
    ci = {}
    if bootstrap:
        rng = np.random.default_rng(seed)
        draws = []
        for _ in range(bootstrap):
            idx = np.sort(rng.integers(0, len(y), len(y)))
            try:
                c, _ = _fit_once(model, x[idx], y[idx], w[idx])
            except (FitError, np.linalg.LinAlgError, ValueError):
                continue
            draws.append(c)
        if draws:
            d = np.array(draws)
            lo, hi = np.percentile(d, [2.5, 97.5], axis=0)
            ci = {k: (float(a), float(b)) for k, a, b in zip(names, lo, hi)}
    return FitResult(model, params, rn, ci, len(y))
