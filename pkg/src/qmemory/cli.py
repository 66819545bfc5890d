"""Command-line front end.

Every subcommand reads an optional TOML/JSON config, applies flag
overrides, writes CSV results plus a manifest into the output directory and
prints a short report. Exit codes: 0 success, 2 configuration error,
3 runtime fault.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
import warnings
from dataclasses import asdict

import numpy as np

from . import __version__
from .config import SCHEMAS, ConfigError, coerce, describe, load_file, resolve, schema
from .io import RunManifest, config_hash, emit_results, new_manifest, write_csv

OUT_ENV = "QMEMORY_OUT"
# keys that change where or how fast a run goes, not what it computes
NON_RESULT_KEYS = ("threads", "out", "plot_data")


class RuntimeFault(RuntimeError):
    pass


class Run:
    """Output bookkeeping for one subcommand invocation."""

    def __init__(self, sub, cfg):
        self.sub = sub
        self.cfg = cfg
        self.params = {k: v for k, v in cfg.items() if k not in NON_RESULT_KEYS}
        self.hash = config_hash({"subcommand": sub, **self.params})
        self.exp_id = f"{sub}-{self.hash[:12]}"
        self.out = cfg["out"] or os.environ.get(OUT_ENV) or "results"
        self.outputs = []
        self.manifest = new_manifest(sub, self.params, cfg["seed"])
        self.threads = cfg["threads"] or os.cpu_count() or 1

    def path(self, name):
        return os.path.join(self.out, name)

    def csv(self, name, rows, header):
        write_csv(rows, self.path(name), header)
        self.outputs.append(name)

    def results(self, name, records):
        emit_results(records, self.path(name))
        self.outputs.append(name)

    def plot(self, name, rows, header):
        if self.cfg["plot_data"]:
            self.csv(os.path.join("plot_data", name), rows, header)

    def text(self, name, body):
        os.makedirs(self.out, exist_ok=True)
        with open(self.path(name), "w", newline="\n") as fh:
            fh.write(body if body.endswith("\n") else body + "\n")
        self.outputs.append(name)

    def finish(self):
        self.manifest.end_time = time.time()
        self.manifest.outputs = list(self.outputs)
        os.makedirs(self.out, exist_ok=True)
        self.manifest.write(self.path(f"{self.sub}.manifest.json"))


def _threshold_rows(rows):
    return [{k: r[k] for k in ("code", "L", "p", "samples", "failures", "rate", "stderr")} for r in rows]


# subcommands

def cmd_coherence(run: Run):
    from .experiments.coherence import NoEstimate, checkpoint_grid, coherence_time
    from .experiments.toric import outcomes_to_records
    cfg = run.cfg
    name = cfg["code"]
    L = None if name == "four_qubit" else cfg["L"]
    records, summary, curve = [], [], []
    no_estimate = []
    for beta in cfg["beta"]:
        kw = {"event_set": cfg["event_set"]}
        if cfg["method"] == 1:
            kw.update(t_max=cfg["t_max"], cadence=cfg["cadence"], thermal=cfg["thermal"],
                      delta=cfg["delta"])
            if cfg["cadence"] == "interval":
                kw["interval"] = cfg["interval"]
        else:
            kw.update(grid=checkpoint_grid(cfg["t_first"], cfg["t_last"], cfg["checkpoints"]),
                      threshold=cfg["threshold"])
        from .experiments.toric import point_seed
        try:
            est = coherence_time(name, L, beta, cfg["samples"], cfg["seed"], cfg["method"],
                                 run.threads, **kw)
            outs = est.outcomes
            row = {"beta": beta, "tau": est.tau, "stderr": est.stderr,
                   "censored_fraction": est.censored_fraction, "samples": est.samples}
            if est.success is not None:
                curve += [{"beta": beta, "t": t, "success_fraction": f}
                          for t, f in zip(est.checkpoints, est.success)]
        except NoEstimate as e:
            outs = getattr(e, "outcomes", None)
            no_estimate.append(f"beta={beta}: {e}")
            row = {"beta": beta, "tau": float("nan"), "stderr": float("nan"),
                   "censored_fraction": 1.0, "samples": cfg["samples"]}
        if outs is not None:
            records += outcomes_to_records(run.exp_id, name, L, beta,
                                           point_seed(cfg["seed"], L or 0, beta), outs)
        summary.append(row)
        print(f"beta={beta:g} tau={row['tau']:.6g} +- {row['stderr']:.3g} "
              f"censored={row['censored_fraction']:.3f}")
    if records:
        run.results("coherence.csv", records)
    hdr = ["beta", "tau", "stderr", "censored_fraction", "samples"]
    run.csv("coherence_summary.csv", summary, hdr)
    run.plot("coherence_time_vs_beta.csv", summary, ["beta", "tau", "stderr"])
    if curve:
        run.csv("success_fraction.csv", curve, ["beta", "t", "success_fraction"])
    good = [r for r in summary if math.isfinite(r["tau"])]
    if len(good) >= 3:
        from .experiments.fitting import fit
        f = fit([r["beta"] for r in good], [r["tau"] for r in good], "arrhenius")
        run.text("coherence_fit.txt", f.report())
        print(f"arrhenius exponent {f['exponent']:.4f}")
    if no_estimate:
        raise RuntimeFault("no estimate: " + "; ".join(no_estimate))


def cmd_pair_survival(run: Run):
    from .experiments.fitting import fit
    from .experiments.toric import pair_survival
    cfg = run.cfg
    rows = []
    for beta in cfg["beta"]:
        for L in cfg["L"]:
            r = pair_survival(L, beta, cfg["samples"], cfg["seed"], run.threads,
                              cfg["max_events"])
            rows.append({"L": L, "beta": beta, "samples": r.samples, "survived": r.survived,
                         "pi": r.pi, "stderr": r.stderr, "capped": r.capped})
            print(f"L={L} beta={beta:g} pi={r.pi:.5f} +- {r.stderr:.5f}")
    run.csv("pair_survival.csv", rows, ["L", "beta", "samples", "survived", "pi", "stderr", "capped"])
    run.plot("inverse_survival_vs_log_half_L.csv",
             [{"beta": r["beta"], "log_half_L": math.log(r["L"] / 2),
               "inverse_pi": 1 / r["pi"] if r["pi"] else float("inf")} for r in rows],
             ["beta", "log_half_L", "inverse_pi"])
    report = survival_fits(rows)
    if report:
        run.text("pair_survival_fit.txt", report)
        print(report)


def survival_fits(rows):
    """Per-beta slope of 1/Pi against ln(L/2), then that slope against beta."""
    from .experiments.fitting import FitError, fit
    slopes = []
    lines = []
    for beta in sorted({r["beta"] for r in rows}):
        pts = [r for r in rows if r["beta"] == beta and r["pi"] > 0]
        if len(pts) < 2:
            continue
        f = fit([math.log(r["L"] / 2) for r in pts], [1 / r["pi"] for r in pts], "proportional")
        slopes.append((beta, f["slope"]))
        lines.append(f"beta={beta:g}: 1/pi = {f['slope']:.5f} ln(L/2)")
    if len(slopes) >= 3:
        try:
            g = fit([b for b, _ in slopes], [s for _, s in slopes], "linear")
            lines.append(f"slope(beta) = {g['intercept']:.4f} + {g['slope']:.4f} beta")
        except FitError as e:
            lines.append(f"slope fit failed: {e}")
    return "\n".join(lines)


def _suite_points(run, point_fn, summary_keys):
    from .experiments.toric import outcomes_to_records
    cfg = run.cfg
    records, summary = [], []
    for beta in cfg["beta"]:
        for L in cfg["L"]:
            ps, outs, s = point_fn(L, beta, cfg["samples"], cfg["seed"], run.threads,
                                   event_set=cfg["event_set"], t_max=cfg["t_max"])
            records += outcomes_to_records(run.exp_id, "cubic" if run.sub == "cubic" else "toric2d",
                                           L, beta, ps, outs)
            row = {"L": L, "beta": beta, "samples": s.samples, "failed": s.failed, "tau": s.tau,
                   "tau_err": s.tau_err, "censored_fraction": s.censored_fraction, **s.extra}
            summary.append(row)
            print(" ".join(f"{k}={row[k]:.6g}" if isinstance(row[k], float) else f"{k}={row[k]}"
                           for k in ["L", "beta", "tau", "censored_fraction"] + summary_keys))
    return records, summary


def cmd_small_limit(run: Run):
    from .experiments.toric import pair_survival, small_limit_point
    cfg = run.cfg
    records, summary = _suite_points(run, small_limit_point, ["tau_c", "tau_m"])
    for row in summary:
        pi = pair_survival(row["L"], row["beta"], cfg["pi_samples"] or cfg["samples"], cfg["seed"],
                           run.threads)
        row["pi"] = pi.pi
    run.results("small_limit.csv", records)
    hdr = ["L", "beta", "samples", "failed", "tau", "tau_err", "censored_fraction",
           "tau_c", "tau_c_err", "tau_m", "tau_m_err", "pi"]
    run.csv("small_limit_summary.csv", summary, hdr)
    run.plot("creation_time_scaled.csv",
             [{"L": r["L"], "beta": r["beta"],
               "scaled_tau_c": r["tau_c"] * r["pi"] * r["L"] ** 2 * math.exp(-2 * r["beta"])}
              for r in summary], ["L", "beta", "scaled_tau_c"])
    run.plot("diffusion_time_scaled.csv",
             [{"L": r["L"], "beta": r["beta"], "scaled_tau_m": r["tau_m"] / (r["beta"] * r["L"] ** 2)}
              for r in summary], ["L", "beta", "scaled_tau_m"])
    report = small_limit_fits(summary)
    run.text("small_limit_fit.txt", report)
    print(report)


def small_limit_fits(summary):
    from .experiments.fitting import FitError, fit
    lines = []
    good = [r for r in summary if r["pi"] > 0 and r["tau_c"] > 0]
    try:
        f = fit([(r["beta"], r["L"]) for r in good], [r["tau_c"] * r["pi"] for r in good],
                "arrhenius-power")
        lines.append(f.report())
    except FitError as e:
        lines.append(f"tau_c fit failed: {e}")
    try:
        g = fit([r["beta"] * r["L"] ** 2 for r in summary], [r["tau_m"] for r in summary],
                "proportional")
        lines.append(g.report().replace("model: proportional", "model: tau_m = c beta L^2"))
    except FitError as e:
        lines.append(f"tau_m fit failed: {e}")
    return "\n".join(lines)


def cmd_large_limit(run: Run):
    from .experiments.toric import large_limit_point
    records, summary = _suite_points(run, large_limit_point, ["density_at_failure", "mean_sep"])
    run.results("large_limit.csv", records)
    hdr = ["L", "beta", "samples", "failed", "tau", "tau_err", "censored_fraction",
           "density_at_failure", "mean_sep", "max_sep"]
    run.csv("large_limit_summary.csv", summary, hdr)
    run.plot("large_size_tau_vs_beta.csv", summary, ["L", "beta", "tau", "tau_err"])
    run.plot("pair_separation_vs_beta.csv", summary, ["L", "beta", "mean_sep", "max_sep"])
    report = large_limit_fits(summary)
    run.text("large_limit_fit.txt", report)
    print(report)


def large_limit_fits(summary):
    from .experiments.fitting import FitError, fit
    lines = []
    exps = []
    for L in sorted({r["L"] for r in summary}):
        pts = sorted((r["beta"], r["tau"], r["tau_err"]) for r in summary if r["L"] == L)
        try:
            f = fit([p[0] for p in pts], [p[1] for p in pts], "exp-poly", sigma=[p[2] for p in pts])
            exps.append(f["exponent"])
            lo, hi = f.ci.get("exponent", (float("nan"),) * 2)
            lines.append(f"L={L}: " + ", ".join(f"{k}={v:.4g}" for k, v in f.params.items())
                         + f", exponent range [{lo:.3g}, {hi:.3g}]")
        except FitError as e:
            lines.append(f"L={L}: exp-poly fit failed: {e}")
    if exps:
        lines.append(f"mean exponent {np.mean(exps):.4f}")
    for beta in sorted({r["beta"] for r in summary}):
        pts = sorted((r["L"], r["tau"]) for r in summary if r["beta"] == beta)
        if len(pts) >= 3:
            f = fit([l for l, _ in pts], [t for _, t in pts], "power-law-in-L")
            lo, hi = f.ci.get("exponent", (float("nan"),) * 2)
            lines.append(f"beta={beta:g}: dlog tau/dlog L = {f['exponent']:.4f} [{lo:.4f}, {hi:.4f}]")
        elif len(pts) == 2:
            (l0, t0), (l1, t1) = pts
            lines.append(f"beta={beta:g}: dlog tau/dlog L = {math.log(t1 / t0) / math.log(l1 / l0):.4f} (two sizes)")
    return "\n".join(lines)


def cmd_cubic(run: Run):
    from .experiments.cubic import analyse, CubicSuite, cubic_point
    from .experiments.toric import outcomes_to_records
    cfg = run.cfg
    suite = CubicSuite(cfg["beta"], sorted(cfg["L"]), {})
    records, summary = [], []
    for beta in cfg["beta"]:
        for L in suite.sizes:
            ps, outs, s = cubic_point(L, beta, cfg["samples"], cfg["seed"], run.threads,
                                      event_set=cfg["event_set"], t_max=cfg["t_max"],
                                      interval_scale=cfg["interval_scale"])
            suite.tau[(L, beta)] = s
            records += outcomes_to_records(run.exp_id, "cubic", L, beta, ps, outs)
            summary.append({"L": L, "beta": beta, "samples": s.samples, "failed": s.failed,
                            "tau": s.tau, "tau_err": s.tau_err,
                            "censored_fraction": s.censored_fraction})
            print(f"L={L} beta={beta:g} ln tau={math.log(s.tau):.4f}")
    analyse(suite)
    run.results("cubic.csv", records)
    run.csv("cubic_summary.csv", summary,
            ["L", "beta", "samples", "failed", "tau", "tau_err", "censored_fraction"])
    run.plot("cubic_tau_vs_L.csv", summary, ["L", "beta", "tau", "tau_err"])
    run.plot("cubic_optimal_size.csv",
             [{"beta": b, "L_opt": suite.L_opt[b], "tau_opt": suite.tau_opt[b]} for b in suite.betas],
             ["beta", "L_opt", "tau_opt"])
    lines = [f"beta={b:g}: L exponent {f['exponent']:.4f}" for b, f in sorted(suite.exponents.items())]
    for label, f in (("exponent vs beta", suite.exponent_line), ("ln tau_opt", suite.tau_opt_fit),
                     ("ln L_opt", suite.L_opt_fit)):
        if f is not None:
            lines.append(f"{label}: " + ", ".join(f"{k}={v:.4g}" for k, v in f.params.items()))
    if suite.extracted:
        lines.append("extracted: " + ", ".join(f"{k}={v:.4g}" for k, v in suite.extracted.items()))
    report = "\n".join(lines)
    run.text("cubic_fit.txt", report)
    print(report)


def cmd_threshold(run: Run):
    from .decoders.threshold import threshold_scan
    cfg = run.cfg
    res = threshold_scan(cfg["code"], cfg["p"], cfg["sizes"], cfg["samples"], cfg["seed"],
                         run.threads)
    rows = res.rows()
    run.csv("threshold.csv", rows, ["code", "L", "p", "samples", "failures", "rate", "stderr"])
    run.plot("failure_rate_vs_p.csv", rows, ["L", "p", "rate", "stderr"])
    lines = [f"L={a},{b}: crossing {x:.5f}" for (a, b), x in sorted(res.pair_crossings.items())]
    lines.append(f"crossing estimate: {res.crossing:.5f}" if res.crossing is not None
                 else "crossing estimate: none")
    run.text("threshold_crossing.txt", "\n".join(lines))
    print("\n".join(lines))


def cmd_barrier(run: Run):
    from .codes import build_code
    from .experiments.barrier import energy_barrier
    cfg = run.cfg
    code = build_code(cfg["code"], None if cfg["code"] == "four_qubit" else cfg["L"])
    target = None if cfg["target"] < 0 else cfg["target"]
    eb = energy_barrier(code, target, cfg["sector"], cfg["delta"])
    run.csv("barrier.csv", [{"code": cfg["code"], "L": cfg["L"], "sector": cfg["sector"],
                             "target": cfg["target"], "barrier": eb}],
            ["code", "L", "sector", "target", "barrier"])
    print(f"{eb:g}")


def cmd_curie_weiss(run: Run):
    from .experiments.analytics import curie_weiss
    cfg = run.cfg
    curve_rows, summary = [], []
    for beta in cfg["beta"]:
        c = curie_weiss(cfg["n"], cfg["delta"], beta, cfg["points"])
        curve_rows += [{"beta": beta, "x": x, "free_energy": f} for x, f in zip(c.x, c.free_energy)]
        summary.append({"beta": beta, "double_well": c.double_well, "barrier": c.barrier,
                        "curvature_half": c.curvature_half,
                        "minima": " ".join(f"{m:.6g}" for m in c.minima)})
        print(f"beta={beta:g} double_well={c.double_well} barrier={c.barrier:.6g} "
              f"minima={summary[-1]['minima']}")
    run.csv("curie_weiss.csv", summary, ["beta", "double_well", "barrier", "curvature_half", "minima"])
    run.plot("free_energy_curves.csv", curve_rows, ["beta", "x", "free_energy"])


def cmd_peierls(run: Run):
    from .experiments.analytics import DomainError, ising_metropolis, peierls_bound
    from .io import sample_rng
    cfg = run.cfg
    rows = []
    for i, beta in enumerate(cfg["beta"]):
        try:
            b = peierls_bound(beta)
        except DomainError as e:
            raise ConfigError(str(e)) from None
        sampled = float("nan")
        if cfg["L"] > 0:
            sampled = ising_metropolis(cfg["L"], beta, cfg["sweeps"], sample_rng(cfg["seed"], i))
        rows.append({"beta": beta, "minority_density_bound": b.minority_density,
                     "magnetization_bound": b.magnetization, "sampled_magnetization": sampled})
        print(f"beta={beta:g} N-/V <= {b.minority_density:.6g}  |m| >= {b.magnetization:.6g}"
              f"  sampled {sampled:.6g}")
    run.csv("peierls.csv", rows, ["beta", "minority_density_bound", "magnetization_bound",
                                  "sampled_magnetization"])


def cmd_fit(run: Run):
    from .experiments.fitting import fit
    from .io import read_csv
    cfg = run.cfg
    if not cfg["input"]:
        raise ConfigError("fit needs input")
    rows = read_csv(cfg["input"])
    xcols = [c.strip() for c in cfg["x"].split(",")]
    need = xcols + [cfg["y"]] + ([cfg["sigma"]] if cfg["sigma"] else [])
    for c in need:
        if rows and c not in rows[0]:
            raise ConfigError(f"{cfg['input']}: no column {c!r}")
    if cfg["group"]:
        gcols = [c.strip() for c in cfg["group"].split(",")]
        groups = {}
        for r in rows:
            if r.get("censored") == "1":
                continue
            groups.setdefault(tuple(r[c] for c in gcols), []).append(r)
        agg = []
        for key in sorted(groups, key=lambda k: tuple(float(v) for v in k)):
            grp = groups[key]
            ys = np.array([float(r[cfg["y"]]) for r in grp])
            row = {c: grp[0][c] for c in xcols}
            row[cfg["y"]] = ys.mean()
            row["_sigma"] = ys.std(ddof=1) / math.sqrt(len(ys)) if len(ys) > 1 else float("nan")
            agg.append(row)
        rows = agg
    x = np.array([[float(r[c]) for c in xcols] for r in rows])
    x = x[:, 0] if len(xcols) == 1 else x
    y = np.array([float(r[cfg["y"]]) for r in rows])
    sigma = np.array([float(r[cfg["sigma"]]) for r in rows]) if cfg["sigma"] else None
    f = fit(x, y, cfg["model"], sigma)
    report = f.report()
    run.text("fit_report.txt", report)
    print(report)


def cmd_verify_code(run: Run):
    from .codes import (build_code, checks_commute, code_distance_bruteforce, encoded_qubits,
                        logical_algebra_ok, translation_covariant)
    cfg = run.cfg
    name = cfg["code"]
    code = build_code(name, None if name == "four_qubit" else cfg["L"])
    rows = [("n", code.n), ("checks", code.m), ("rank", code.stabilizer_rank),
            ("encoded_qubits", encoded_qubits(code)), ("logical_pairs", len(code.logical_pairs)),
            ("checks_commute", checks_commute(code)), ("logical_algebra", logical_algebra_ok(code)),
            ("locality_radius", code.locality_radius)]
    if code.geometry.dim > 0:
        rng = np.random.default_rng(cfg["seed"])
        rows.append(("translation_covariant",
                     all(translation_covariant(code, rng, a) for a in range(code.geometry.dim))))
    if code.n <= 24:
        rows.append(("distance", code_distance_bruteforce(code)))
    ok = all(v for k, v in rows if isinstance(v, bool))
    rows.append(("all_invariants_hold", ok))
    for k, v in rows:
        print(f"{k}: {v}")
    run.csv("verify_code.csv", [{"property": k, "value": v} for k, v in rows], ["property", "value"])
    if not ok:
        raise RuntimeFault("catalog invariants violated")


def cmd_replay(run: Run):
    """Re-run the manifest's subcommand into a scratch directory and compare bytes."""
    import filecmp
    src = run.cfg["manifest"]
    if not src:
        raise ConfigError("replay needs manifest")
    try:
        man = RunManifest.read(src)
    except (OSError, ValueError, TypeError) as e:
        raise ConfigError(f"{src}: {e}") from None
    base = os.path.dirname(os.path.abspath(src))
    out = run.cfg["out"] or os.path.join(base, "replay")
    params = dict(man.parameters)
    cfg = resolve(man.subcommand, params, {"out": out, "threads": run.cfg["threads"],
                                           "plot_data": any(o.startswith("plot_data") for o in man.outputs)},
                  source=src)
    inner = Run(man.subcommand, cfg)
    if inner.hash != man.config_hash and config_hash(params) != man.config_hash:
        print("warning: manifest hash does not match its parameters", file=sys.stderr)
    HANDLERS[man.subcommand](inner)
    inner.finish()
    same = True
    for name in man.outputs:
        a, b = os.path.join(base, name), os.path.join(out, name)
        eq = os.path.exists(b) and filecmp.cmp(a, b, shallow=False)
        same &= eq
        print(f"{name}: {'identical' if eq else 'DIFFERENT'}")
    if not same:
        raise RuntimeFault("replay differs from the recorded outputs")


HANDLERS = {
    "coherence": cmd_coherence, "pair-survival": cmd_pair_survival,
    "small-limit": cmd_small_limit, "large-limit": cmd_large_limit, "cubic": cmd_cubic,
    "threshold": cmd_threshold, "barrier": cmd_barrier, "curie-weiss": cmd_curie_weiss,
    "peierls": cmd_peierls, "fit": cmd_fit, "verify-code": cmd_verify_code, "replay": cmd_replay,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmemory", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    subs = p.add_subparsers(dest="sub", required=True)
    for sub in SCHEMAS:
        sp = subs.add_parser(sub, help=HANDLERS[sub].__doc__ or sub, epilog=describe(sub),
                             formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.add_argument("--config", help="TOML or JSON file with any of the keys below")
        for key, spec in schema(sub).items():
            flag = "--" + key.replace("_", "-")
            if key == "plot_data":
                sp.add_argument(flag, action="store_const", const=True, default=None,
                                help=spec.help)
            else:
                sp.add_argument(flag, dest=key, default=None, metavar=spec.kind.upper(),
                                help=spec.help)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    sub = args.sub
    where = args.config or "<flags>"
    try:
        file_cfg = load_file(args.config) if args.config else {}
        flags = {k: v for k, v in vars(args).items() if k not in ("sub", "config") and v is not None}
        cfg = resolve(sub, file_cfg, flags, source=where)
        run = Run(sub, cfg)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = _warn_to_stderr
            HANDLERS[sub](run)
        run.finish()
    except ConfigError as e:
        print(f"qmemory {sub}: config error ({where}): {e}", file=sys.stderr)
        return 2
    except (RuntimeFault, RuntimeError, ArithmeticError, OSError, ValueError) as e:
        kind = "config error" if _is_config_problem(e) else "runtime fault"
        print(f"qmemory {sub}: {kind} ({where}): {e}", file=sys.stderr)
        return 2 if kind == "config error" else 3
    return 0


def _is_config_problem(e) -> bool:
    from .codes.base import InvalidSize
    from .experiments.barrier import StateSpaceTooLarge
    from .kmc.rates import InvalidParameter
    return isinstance(e, (InvalidSize, InvalidParameter, StateSpaceTooLarge, KeyError))


def _warn_to_stderr(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
