"""Random streams, results CSV, and run manifests."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import platform
import socket
import time
from dataclasses import asdict, dataclass, fields

import numpy as np
from filelock import FileLock

from . import __version__

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One round of the SplitMix64 finaliser."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def stream_seed(master: int, index: int) -> int:
    """Seed of sample ``index``: splitmix64(splitmix64(master) ^ index)."""
    return splitmix64(splitmix64(int(master) & MASK64) ^ (int(index) & MASK64))


def sample_rng(master: int, index: int) -> np.random.Generator:
    return np.random.default_rng(stream_seed(master, index))


def config_hash(config: dict) -> str:
    text = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class ExperimentRecord:
    experiment_id: str
    code: str
    L: int
    beta: float
    seed: int
    sample: int
    tau: float
    censored: bool
    failure_class: int
    n_events: int
    n_anyons_at_failure: int
    mean_sep: float
    max_sep: float


RESULT_FIELDS = [f.name for f in fields(ExperimentRecord)]
THRESHOLD_FIELDS = ["code", "L", "p", "samples", "failures", "rate", "stderr"]


def fmt(value) -> str:
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def write_csv(rows, path, header) -> None:
    """Write dict rows (or dataclasses) under a per-file lock, LF newlines."""
    path = os.fspath(path)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with FileLock(path + ".lock"):
        tmp = path + ".tmp"
        with open(tmp, "w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                d = asdict(row) if hasattr(row, "__dataclass_fields__") else row
                fh.write(",".join(fmt(d[h]) for h in header) + "\n")
        os.replace(tmp, path)


def emit_results(records, path) -> None:
    write_csv(records, path, RESULT_FIELDS)


def read_results(path) -> list[ExperimentRecord]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(ExperimentRecord(
                row["experiment_id"], row["code"], int(row["L"]), float(row["beta"]),
                int(row["seed"]), int(row["sample"]), float(row["tau"]),
                row["censored"] == "1", int(row["failure_class"]), int(row["n_events"]),
                int(row["n_anyons_at_failure"]), float(row["mean_sep"]), float(row["max_sep"])))
    return out


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@dataclass
class RunManifest:
    tool_version: str
    subcommand: str
    config_hash: str
    master_seed: int
    start_time: float
    end_time: float
    host: dict
    parameters: dict
    outputs: list

    def write(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")

    @classmethod
    def read(cls, path) -> "RunManifest":
        with open(path) as fh:
            return cls(**json.load(fh))


def host_descriptor() -> dict:
    return {"hostname": socket.gethostname(), "platform": platform.platform(),
            "python": platform.python_version(), "cpus": os.cpu_count()}


def new_manifest(subcommand, parameters, master_seed) -> RunManifest:
    return RunManifest(__version__, subcommand, config_hash(parameters), int(master_seed),
                       time.time(), 0.0, host_descriptor(), parameters, [])
