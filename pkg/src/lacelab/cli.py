"""Configuration-driven experiment runner.

One experiment per invocation: a JSON config names a command and its
parameters; the runner writes deterministic CSV/JSON data files, renders the
matching figures next to them, and records a manifest (config hash, versions,
wall time).  报-path data files are byte-stable across reruns.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__, reporting
from .bootstrap import MODELS, gate_table, run_bootstrap
from .fields import export_csv
from .frackernel import FracKernel, conv_bound_check, kernel_fourier_identity
from .green import (asymptotics_report, counterexample_experiment,
                    green_heat_split, green_quadrature, green_series,
                    resolvent_residual)
from .diagrams import diagram_suite
from .percolation import perc_diagram_bridge, sample_two_point
from .saw import (enumerate_saw, estimate_pc, g_series_eval, lambda_check,
                  load_series, save_series, series_cache_path)
from .steps import CounterexampleParams, nn_step

CACHE_ENV = "LACELAB_CACHE_DIR"

COMMANDS = {}


class ConfigError(ValueError):
    pass


def _expect(params: dict, spec: dict, where: str):
    """Validate params against {name: (type, default-or-REQUIRED)}."""
    out = {}
    for key in params:
        if key not in spec:
            raise ConfigError(f"params.{key}: unknown key for {where}")
    for key, (typ, default) in spec.items():
        if key in params:
            val = params[key]
            if typ is float and isinstance(val, int):
                val = float(val)
            if typ is tuple and isinstance(val, list):
                val = tuple(val)
            if not isinstance(val, typ):
                raise ConfigError(
                    f"params.{key}: expected {getattr(typ, '__name__', typ)}, "
                    f"got {type(val).__name__}"
                )
            out[key] = val
        elif default is REQUIRED:
            raise ConfigError(f"params.{key}: required for {where}")
        else:
            out[key] = default
    return out


REQUIRED = object()


def command(name):
    def deco(fn):
        COMMANDS[name] = fn
        return fn
    return deco


def _axis_points(d, rmin, rmax):
    return [tuple([r] + [0] * (d - 1)) for r in range(rmin, rmax + 1)]


@command("green")
def cmd_green(params, ctx):
    p = _expect(params, {
        "d": (int, REQUIRED), "L": (int, 21), "M": (int, 64),
        "mode": (str, "box"), "rmax": (int, 8),
    }, "green")
    J = nn_step(p["d"])
    if p["mode"] == "box":
        res = green_quadrature(J, L=p["L"], M=p["M"])
        export_csv(res.field, ctx.out("green_field.csv"))
        rows = [(r, res.value((r,) + (0,) * (p["d"] - 1))) for r in range(0, p["rmax"] + 1)]
    elif p["mode"] == "points":
        pts = _axis_points(p["d"], 0, p["rmax"])
        res = green_quadrature(J, M=p["M"], points=pts)
        rows = [(r, res.value(x)) for r, x in enumerate(pts)]
    else:
        raise ConfigError("params.mode: must be 'box' or 'points'")
    reporting.write_csv(ctx.out("green_axis.csv"), ["absx", "C"], rows)
    reporting.write_json(ctx.out("green_diagnostics.json"), res.diagnostics)
    if ctx.figures:
        reporting.figure_green_decay(rows, ctx.out("green_decay.png"))
    return {"C0": rows[0][1], "diagnostics": res.diagnostics}


@command("asymptote")
def cmd_asymptote(params, ctx):
    p = _expect(params, {
        "d": (int, 5), "L": (int, 81), "M": (int, 128),
        "rmin": (int, 8), "rmax": (int, 20), "rho": (float, 2.0),
    }, "asymptote")
    J = nn_step(p["d"])
    pts = _axis_points(p["d"], p["rmin"], p["rmax"])
    res = green_quadrature(J, M=p["M"], points=pts)
    rep = asymptotics_report(res, J, rho=p["rho"], rmin=p["rmin"], rmax=p["rmax"])
    rows = [list(x) + [r, c, s, dev] for (x, r, c, s, dev) in rep.rows]
    header = [f"x{i+1}" for i in range(p["d"])] + ["absx", "C", "scaledC", "deviation"]
    reporting.write_csv(ctx.out("asymptote.csv"), header, rows)
    reporting.write_json(ctx.out("asymptote.json"), {
        "a_d": rep.a_d, "K1": rep.K1, "predicted_coeff": rep.predicted_coeff,
        "error_exponent_predicted": rep.error_exponent_predicted,
        "error_exponent_measured": rep.error_exponent_measured,
    })
    if ctx.figures:
        reporting.figure_asymptote(rep, ctx.out("asymptote.png"))
    return {"predicted": rep.predicted_coeff,
            "max_abs_deviation": max(abs(r[4]) for r in rep.rows)}


@command("crosscheck")
def cmd_crosscheck(params, ctx):
    p = _expect(params, {
        "d": (int, 3), "L": (int, 21), "M": (int, 96),
        "rmax": (int, 8), "n_max": (int, 1 << 20), "pad": (int, 96),
    }, "crosscheck")
    d = p["d"]
    J = nn_step(d)
    quad = green_quadrature(J, L=p["L"], M=p["M"])
    ser = green_series(J, L=p["L"], n_max=p["n_max"], pad_to=p["pad"],
                       extrapolate=True)
    rows = []
    worst = 0.0
    for r in range(2, p["rmax"] + 1):
        x = (r,) + (0,) * (d - 1)
        hs = green_heat_split(J, x, eps_split=max(0.05, 1.2 / r))
        vals = (quad.value(x), hs.total, ser.value(x))
        pair = max(abs(a - b) / max(abs(b), 1e-300)
                   for a in vals for b in vals)
        worst = max(worst, pair)
        rows.append((r, *vals, pair))
    reporting.write_csv(ctx.out("crosscheck.csv"),
                        ["absx", "quadrature", "heat_split", "series", "max_pairwise_rel"],
                        rows)
    summary = {
        "max_pairwise_rel": worst,
        "resolvent_residual_series": resolvent_residual(ser, J),
        "series_diagnostics": ser.diagnostics,
        "quad_diagnostics": quad.diagnostics,
    }
    reporting.write_json(ctx.out("crosscheck.json"), summary)
    if ctx.figures:
        reporting.figure_crosscheck(rows, ctx.out("crosscheck.png"))
    return summary


@command("counterexample")
def cmd_counterexample(params, ctx):
    p = _expect(params, {
        "d": (int, 5), "eps": (float, 0.03), "l_list": (tuple, (12, 24, 48)),
        "g_amp": (float, 2400.0), "g_pow": (float, 1.0),
    }, "counterexample")
    cp = CounterexampleParams(d=p["d"], eps=p["eps"],
                              l_list=tuple(p["l_list"]),
                              g_amp=p["g_amp"], g_pow=p["g_pow"])
    rep = counterexample_experiment(cp)
    reporting.write_csv(
        ctx.out("growth.csv"),
        ["l", "r", "C", "base", "bump", "g", "h", "gh4", "trend"],
        [[row["l"], row["r"], row["C"], row["base"], row["bump"],
          row["g"], row["h"], row["gh4"], row.get("trend", float("nan"))]
         for row in rep.rows],
    )
    reporting.write_json(ctx.out("growth.json"), {
        "rows": rep.rows, "verdict": rep.verdict, "diagnostics": rep.diagnostics,
    })
    if ctx.figures:
        reporting.figure_growth(rep, ctx.out("growth.png"))
    return {"verdict": rep.verdict, "r": [row["r"] for row in rep.rows]}


@command("kernels")
def cmd_kernels(params, ctx):
    p = _expect(params, {
        "eps_list": (tuple, (0.25, 0.5, 0.75)), "xmax": (int, 50),
    }, "kernels")
    rows = []
    reports = []
    for eps in p["eps_list"]:
        for parity in ("odd", "even"):
            kern = FracKernel(parity, float(eps))
            worst = 0.0
            for x in range(-p["xmax"], p["xmax"] + 1):
                if x == 0 and parity == "odd":
                    continue
                resid = kernel_fourier_identity(kern, x)
                worst = max(worst, resid)
                rows.append((eps, parity, x, resid))
            reports.append({"epsilon": eps, "parity": parity,
                            "max_residual": worst,
                            "grid": {"x_range": [-p["xmax"], p["xmax"]]}})
    margins = [conv_bound_check(rho, 0.5) for rho in (2.0, 3.0, 4.0)]
    reporting.write_csv(ctx.out("kernel_residuals.csv"),
                        ["eps", "parity", "x", "residual"], rows)
    reporting.write_json(ctx.out("kernels.json"),
                         {"identities": reports, "conv_margins": margins})
    if ctx.figures:
        reporting.figure_kernels([float(e) for e in p["eps_list"]],
                                 ctx.out("kernels.png"))
    return {"max_residual": max(r["max_residual"] for r in reports)}


@command("diagrams")
def cmd_diagrams(params, ctx):
    p = _expect(params, {
        "d": (int, 3), "N": (int, 8), "p_frac": (float, 0.9),
        "weights": (tuple, ((0.0, 0.0), (2.0, 0.0))),
        "dump_fields": (bool, False),
    }, "diagrams")
    series = _cached_series(ctx, p["d"], p["N"])
    pc = estimate_pc(series)
    pval = p["p_frac"] * pc.get("p_c", 1.0 / (2 * p["d"]))
    G, trunc = g_series_eval(series, pval)
    weights = tuple(tuple(float(w) for w in pair) for pair in p["weights"])
    ds = diagram_suite(G, weights=weights, h_betas=(0.0,),
                       h_samples=[(a, b) for a in range(3) for b in range(3)],
                       h_box=min(G.L, 9))
    lam = lambda_check(G)
    payload = {"p": pval, "truncation": trunc, "bars": ds.bars,
               "lambda_check": lam, "notes": ds.notes}
    reporting.write_json(ctx.out("diagrams.json"), payload)
    if p["dump_fields"]:
        export_csv(ds.B, ctx.out("bubble.csv"), skip_zeros=True)
    return payload


@command("saw")
def cmd_saw(params, ctx):
    p = _expect(params, {"d": (int, 3), "N": (int, 8)}, "saw")
    series = _cached_series(ctx, p["d"], p["N"])
    pc = estimate_pc(series)
    orders, pcs = [], []
    for n in range(3, p["N"] + 1):
        sub = _cached_series(ctx, p["d"], n)
        est = estimate_pc(sub)
        if est.get("p_c"):
            orders.append(n)
            pcs.append(est["p_c"])
    reporting.write_csv(ctx.out("saw_counts.csv"), ["n", "c_n"],
                        [(n, series.total(n)) for n in range(p["N"] + 1)])
    reporting.write_json(ctx.out("saw_pc.json"), {"final": pc, "orders": orders, "pcs": pcs})
    if ctx.figures and pcs:
        reporting.figure_pc(orders, pcs, ctx.out("saw_pc.png"))
    return {"c": [series.total(n) for n in range(p["N"] + 1)], "pc": pc}


@command("percolation")
def cmd_percolation(params, ctx):
    p = _expect(params, {
        "d": (int, 2), "L": (int, 3), "p": (float, 0.3),
        "n_samples": (int, 10000),
    }, "percolation")
    est = sample_two_point(p["d"], p["L"], p["p"], p["n_samples"], seed=ctx.seed)
    est.save(ctx.out("percolation_estimate.npz"))
    bridge = perc_diagram_bridge(est)
    reporting.write_json(ctx.out("percolation.json"), {
        "provenance": {"d": p["d"], "L": p["L"], "p": p["p"],
                       "n_samples": p["n_samples"], "seed": ctx.seed},
        "bars": bridge["bars"], "bars_lo": bridge["bars_lo"],
        "bars_hi": bridge["bars_hi"],
    })
    if ctx.figures:
        reporting.figure_percolation(est, ctx.out("percolation.png"))
    return {"mean_e1": est.mean.at((1,) + (0,) * (p["d"] - 1))}


@command("bootstrap")
def cmd_bootstrap(params, ctx):
    p = _expect(params, {
        "model": (str, "saw"), "d": (int, 7), "eps": (float, 0.01),
        "table": (bool, True),
    }, "bootstrap")
    if p["model"] not in MODELS:
        raise ConfigError(f"params.model: unknown model {p['model']!r}")
    trace = run_bootstrap(p["model"], p["d"], p["eps"])
    payload = {
        "model": trace.model, "d": trace.d, "eps": trace.eps,
        "steps": trace.steps, "terminal_alpha": trace.terminal_alpha,
        "threshold": trace.threshold, "verdict": trace.verdict,
        "rho": trace.rho, "warnings": trace.warnings,
    }
    if p["table"]:
        gates = gate_table(p["eps"])
        reporting.write_csv(ctx.out("bootstrap_gates.csv"),
                            ["model", "min_d"], sorted(gates.items()))
        payload["gates"] = gates
    reporting.write_json(ctx.out("bootstrap_trace.json"), payload)
    if ctx.figures:
        reporting.figure_bootstrap(trace, ctx.out("bootstrap.png"))
    return payload


def _cached_series(ctx, d, N):
    path = series_cache_path(ctx.cache_dir, d, N, __version__)
    if os.path.exists(path):
        return load_series(path)
    series = enumerate_saw(d, N)
    save_series(series, path)
    return series


class RunContext:
    def __init__(self, output_dir, cache_dir, seed, figures):
        self.output_dir = output_dir
        self.cache_dir = cache_dir
        self.seed = seed
        self.figures = figures

    def out(self, name):
        return os.path.join(self.output_dir, name)


def run_experiment(config: dict, output_dir: str, cache_dir: str,
                   figures: bool = True) -> dict:
    for key in config:
        if key not in ("command", "params", "seed", "output_dir"):
            raise ConfigError(f"{key}: unknown top-level config key")
    cmd = config.get("command")
    if cmd not in COMMANDS:
        raise ConfigError(
            f"command: expected one of {sorted(COMMANDS)}, got {cmd!r}"
        )
    params = config.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params: must be a mapping")
    seed = config.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed: must be an integer")
    reporting.ensure_dir(output_dir)
    reporting.ensure_dir(cache_dir)
    ctx = RunContext(output_dir, cache_dir, seed, figures)
    t0 = time.time()
    summary = COMMANDS[cmd](params, ctx)
    wall = time.time() - t0
    manifest = {
        "command": cmd,
        "config_sha256": hashlib.sha256(
            json.dumps(config, sort_keys=True).encode()
        ).hexdigest(),
        "package_version": __version__,
        "numpy_version": np.__version__,
        "wall_time_s": wall,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    reporting.write_json(os.path.join(output_dir, "manifest.json"), manifest)
    return summary


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="lacelab",
        description="Run one lattice-lab experiment from a JSON config.",
    )
    ap.add_argument("--config", required=True, help="path to the experiment JSON")
    ap.add_argument("--output", default=None, help="output directory")
    ap.add_argument("--cache-dir", default=None,
                    help=f"SAW cache directory (or ${CACHE_ENV})")
    ap.add_argument("--threads", type=int, default=None,
                    help="hint for array-backend threads (best effort)")
    ap.add_argument("--no-figures", action="store_true",
                    help="skip figure rendering, emit data files only")
    args = ap.parse_args(argv)

    if args.threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, str(args.threads))
    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config: cannot load {args.config}: {exc}", file=sys.stderr)
        return 2
    output = args.output or config.get("output_dir") or "lacelab-out"
    cache = (args.cache_dir or os.environ.get(CACHE_ENV)
             or os.path.join(os.path.expanduser("~"), ".cache", "lacelab"))
    try:
        summary = run_experiment(config, output, cache,
                                 figures=not args.no_figures)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # hard numeric/feasibility errors
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    json.dump(summary, sys.stdout, indent=2, sort_keys=True, default=str)
    print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
