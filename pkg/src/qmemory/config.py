"""Experiment configuration: per-subcommand schemas, file loading, validation."""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Key:
    kind: str          # int, float, str, bool, ints, floats
    default: object
    help: str


COMMON = {
    "seed": Key("int", 1, "master seed; every sample stream derives from it"),
    "samples": Key("int", 1000, "trajectories (or decodes) per grid point"),
    "threads": Key("int", 0, "worker processes, 0 = all available cores"),
    "out": Key("str", "", "output directory (default from QMEMORY_OUT or ./results)"),
    "plot_data": Key("bool", False, "also write x/y series for plotting"),
}

EVENT = Key("str", "XYZ", "single-qubit event set: XYZ or XZ")

SCHEMAS = {
    "coherence": {
        "code": Key("str", "four_qubit", "four_qubit, toric2d or cubic"),
        "L": Key("int", 0, "side length (ignored for four_qubit)"),
        "beta": Key("floats", [3.0], "inverse temperatures"),
        "delta": Key("float", 1.0, "energy multiplier per violated check"),
        "event_set": EVENT,
        "method": Key("int", 1, "1: mean first-failure time, 2: checkpoint success fraction"),
        "cadence": Key("str", "every-event", "every-event or interval"),
        "interval": Key("float", 1.0, "decode spacing for interval cadence"),
        "t_max": Key("float", float("inf"), "simulated-time cap; unfailed samples are censored"),
        "checkpoints": Key("int", 40, "method 2: number of geometric checkpoints"),
        "t_first": Key("float", 1.0, "method 2: first checkpoint"),
        "t_last": Key("float", 1e6, "method 2: last checkpoint"),
        "threshold": Key("float", 0.99, "method 2: success fraction defining tau"),
        "thermal": Key("bool", True, "false runs the zero-noise control"),
    },
    "pair-survival": {
        "L": Key("ints", [50, 60, 70, 80, 90, 100], "side lengths"),
        "beta": Key("floats", [1.0, 2.0, 3.0, 4.0, 5.0, 6.0], "inverse temperatures"),
        "max_events": Key("int", 10**9, "per-trajectory event cap"),
    },
    "small-limit": {
        "L": Key("ints", [16, 24, 32, 40, 48], "side lengths"),
        "beta": Key("floats", [12.0, 14.0, 16.0, 18.0], "inverse temperatures"),
        "event_set": EVENT,
        "t_max": Key("float", float("inf"), "simulated-time cap"),
        "pi_samples": Key("int", 0, "pair-survival samples per point for the creation-time fit, 0 = samples"),
    },
    "large-limit": {
        "L": Key("ints", [100, 150, 200], "side lengths"),
        "beta": Key("floats", [2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0], "inverse temperatures"),
        "event_set": EVENT,
        "t_max": Key("float", float("inf"), "simulated-time cap"),
    },
    "cubic": {
        "L": Key("ints", [3, 5, 7, 9, 11], "allowed odd side lengths"),
        "beta": Key("floats", [9.2, 10.0, 10.8], "inverse temperatures"),
        "event_set": EVENT,
        "t_max": Key("float", float("inf"), "simulated-time cap"),
        "interval_scale": Key("float", 1e-10, "decode every interval_scale * exp(4 beta)"),
    },
    "threshold": {
        "code": Key("str", "toric2d", "toric2d or cubic"),
        "sizes": Key("ints", [8, 16, 32], "side lengths"),
        "p": Key("floats", [0.06, 0.07, 0.08, 0.09, 0.1], "bit-flip probabilities, list or start:stop:step"),
    },
    "barrier": {
        "code": Key("str", "toric2d", "four_qubit or toric2d (small instances)"),
        "L": Key("int", 3, "side length"),
        "sector": Key("str", "X", "X or Z errors"),
        "target": Key("int", -1, "class bits to reach, -1 = any nontrivial class"),
        "delta": Key("float", 1.0, "energy multiplier"),
    },
    "curie-weiss": {
        "n": Key("int", 100, "number of spins"),
        "delta": Key("float", 1.0, "coupling"),
        "beta": Key("floats", [0.25, 0.5, 1.0], "inverse temperatures"),
        "points": Key("int", 1001, "grid points in x"),
    },
    "peierls": {
        "beta": Key("floats", [1.5, 2.0, 2.5, 3.0], "inverse temperatures"),
        "L": Key("int", 32, "Ising lattice side for the sampled check, 0 to skip"),
        "sweeps": Key("int", 100000, "Metropolis sweeps per beta"),
    },
    "fit": {
        "input": Key("str", "", "CSV with the data columns"),
        "model": Key("str", "arrhenius", "linear, arrhenius, power-law-in-L, psc-quadratic, arrhenius-power, exp-poly"),
        "x": Key("str", "beta", "x column (two comma-separated columns for arrhenius-power)"),
        "y": Key("str", "tau", "y column"),
        "sigma": Key("str", "", "optional y-error column"),
        "group": Key("str", "", "aggregate rows by these comma-separated columns (mean of y)"),
    },
    "verify-code": {
        "code": Key("str", "toric2d", "four_qubit, toric2d, cubic or toric4d"),
        "L": Key("int", 8, "side length"),
    },
    "replay": {
        "manifest": Key("str", "", "manifest JSON written by an earlier run"),
    },
}


def schema(sub: str) -> dict:
    return {**COMMON, **SCHEMAS[sub]}


def parse_range(text: str) -> list[float]:
    """'a:b:s' inclusive of b, or comma-separated values."""
    text = text.strip()
    if ":" in text:
        a, b, s = (float(t) for t in text.split(":"))
        if s <= 0:
            raise ConfigError(f"range step must be positive: {text}")
        n = int(round((b - a) / s)) + 1
        return [round(a + i * s, 12) for i in range(n)]
    return [float(t) for t in text.split(",") if t.strip()]


def coerce(kind: str, value, name: str):
    try:
        if kind == "int":
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise ValueError
            return int(value)
        if kind == "float":
            return float(value)
        if kind == "str":
            if not isinstance(value, str):
                raise ValueError
            return value
        if kind == "bool":
            if isinstance(value, bool):
                return value
            if isinstance(value, str) and value.lower() in ("1", "true", "yes", "0", "false", "no"):
                return value.lower() in ("1", "true", "yes")
            raise ValueError
        if kind in ("ints", "floats"):
            if isinstance(value, str):
                vals = parse_range(value)
            elif isinstance(value, (list, tuple)):
                vals = [float(v) for v in value]
            else:
                vals = [float(value)]
            if kind == "ints":
                if any(not float(v).is_integer() for v in vals):
                    raise ValueError
                return [int(v) for v in vals]
            return vals
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: cannot read {value!r} as {kind}") from None
    raise ConfigError(f"{name}: unknown key type {kind}")


def load_file(path) -> dict:
    path = os.fspath(path)
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        raise ConfigError(f"{path}: {e.strerror}") from None
    try:
        if path.endswith(".json"):
            return json.loads(raw.decode())
        return tomllib.loads(raw.decode())
    except (ValueError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"{path}: {e}") from None


def resolve(sub: str, file_cfg: dict | None = None, overrides: dict | None = None,
            source: str = "<flags>") -> dict:
    """Defaults < config file < flag overrides; unknown keys are errors."""
    sch = schema(sub)
    cfg = {k: v.default for k, v in sch.items()}
    for where, layer in ((source, file_cfg or {}), ("<flags>", overrides or {})):
        for k, v in layer.items():
            key = k.replace("-", "_")
            if key not in sch:
                raise ConfigError(f"{where}: unknown key {k!r} for {sub}")
            if v is None:
                continue
            cfg[key] = coerce(sch[key].kind, v, f"{where}: {k}")
    return cfg


def describe(sub: str) -> str:
    lines = ["config keys:"]
    for k, v in schema(sub).items():
        lines.append(f"  {k} ({v.kind}, default {v.default!r}): {v.help}")
    return "\n".join(lines)
