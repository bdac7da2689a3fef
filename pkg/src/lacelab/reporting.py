"""Report writers: delimited data (CSV/JSON) plus the matplotlib figures the
CLI drops next to them.  Data files are deterministic; timestamps live only
in the run manifest."""

from __future__ import annotations

import csv
import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def write_json(path: str, payload) -> None:
    with open(path, "w") as fh:
        json.dump(_stringify_keys(payload), fh, indent=2, sort_keys=True,
                  default=_coerce)
        fh.write("\n")


def _stringify_keys(obj):
    """JSON cannot carry tuple keys (weight pairs); render them as 'a,b'."""
    if isinstance(obj, dict):
        return {
            ",".join(map(str, k)) if isinstance(k, tuple) else k:
                _stringify_keys(v)
            for k, v in obj.items()
        }
    if isinstance(obj, (list, tuple)):
        return [_stringify_keys(v) for v in obj]
    return obj


def _coerce(obj):
    if hasattr(obj, "item"):
        return obj.item()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj)}")


def write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _fmt(v):
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, float):
        return repr(v)
    return v


def _save(fig, path: str):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def figure_asymptote(report, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    rs = [row[1] for row in report.rows]
    sc = [row[3] for row in report.rows]
    ax.plot(rs, sc, "o-", label=r"$|x|^{d-2} C(x)$")
    ax.axhline(report.predicted_coeff, color="k", ls="--",
               label=f"a_d/K1 = {report.predicted_coeff:.6f}")
    ax.set_xlabel("|x|")
    ax.set_ylabel("scaled Green value")
    ax.legend()
    _save(fig, path)


def figure_green_decay(rows, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    rs = [r for r, _ in rows if r > 0]
    cs = [c for r, c in rows if r > 0 and c > 0]
    rs = rs[: len(cs)]
    ax.loglog(rs, cs, "o-")
    ax.set_xlabel("|x|")
    ax.set_ylabel("C(x)")
    _save(fig, path)


def figure_crosscheck(rows, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    rs = [row[0] for row in rows]
    for i, name in ((1, "quadrature"), (2, "heat-split"), (3, "series")):
        ax.plot(rs, [row[i] for row in rows], marker="o", ms=3, label=name)
    ax.set_yscale("log")
    ax.set_xlabel("|x|")
    ax.set_ylabel("C(x)")
    ax.legend()
    _save(fig, path)


def figure_growth(report, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ls = [row["l"] for row in report.rows]
    rs = [row["r"] for row in report.rows]
    ax.plot(ls, rs, "o-", label=r"$\ell^{d-2} C(\ell e_1)$")
    if all("trend" in row for row in report.rows):
        ax.plot(ls, [row["trend"] for row in report.rows], "s--",
                label="fitted g h^4 exp(-c' g h^d)")
    ax.set_xlabel("cluster scale")
    ax.set_ylabel("scaled Green value")
    ax.legend()
    ax.set_title(f"verdict: {report.verdict}")
    _save(fig, path)


def figure_kernels(eps_list, path: str) -> None:
    import numpy as np

    from .frackernel import FracKernel, kernel_eval

    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    ps = np.linspace(1e-3, np.pi, 400)
    for eps in eps_list:
        axes[0].plot(ps, np.abs(kernel_eval(FracKernel("odd", eps), ps)),
                     label=f"eps={eps}")
        axes[1].plot(ps, kernel_eval(FracKernel("even", eps), ps).real,
                     label=f"eps={eps}")
    axes[0].set_title("|odd kernel|")
    axes[1].set_title("even kernel")
    for ax in axes:
        ax.set_xlabel("p")
        ax.legend()
    _save(fig, path)


def figure_bootstrap(trace, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    steps = [s[0] for s in trace.steps]
    phis = [s[3] for s in trace.steps]
    ax.step(steps, phis, where="post", marker="o")
    ax.axhline(trace.threshold, color="r", ls="--",
               label=f"threshold {trace.threshold:.3f}")
    ax.set_xlabel("iteration")
    ax.set_ylabel("phi")
    ax.legend()
    ax.set_title(f"{trace.model} d={trace.d}: {trace.verdict}")
    _save(fig, path)


def figure_percolation(est, path: str) -> None:
    import numpy as np

    from .fields import axis_coords

    fig, ax = plt.subplots(figsize=(6, 4))
    coords = axis_coords(est.L)
    rs, ms, es = [], [], []
    for i, c in enumerate(coords):
        idx = (i,) + (0,) * (est.d - 1)
        rs.append(abs(int(c)))
        ms.append(est.mean.values[idx])
        es.append(est.stderr.values[idx])
    order = np.argsort(rs)
    rs = np.array(rs)[order]
    ax.errorbar(rs, np.array(ms)[order], yerr=np.array(es)[order], fmt="o")
    ax.set_xlabel("|x| (axis)")
    ax.set_ylabel("P(0 <-> x)")
    ax.set_title(f"d={est.d} L={est.L} p={est.p} n={est.n_samples}")
    _save(fig, path)


def figure_pc(orders, pcs, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(orders, pcs, "o-")
    ax.set_xlabel("truncation order")
    ax.set_ylabel("p_c estimate")
    _save(fig, path)


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path
