"""SVG line plots derived from a RunReport. Plots are never read back by checks."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .report import RunReport  # noqa: E402

# fixed ids and no timestamp keep the SVG bytes reproducible
matplotlib.rcParams["svg.hashsalt"] = "qmlab"
matplotlib.rcParams["svg.fonttype"] = "none"


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_x3p(series: dict, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(series["t"], series["quantum"], label="quantum <X^3/2 P X^3/2>", gid="quantum")
    ax.plot(series["t"], series["classical"], "--", label="classical x^3 p", gid="classical")
    ax.set_xlabel("t")
    ax.set_ylabel("x^3 p")
    ax.set_title(f"max gap {series['gap_bound']:.6g}")
    ax.legend()
    return _save(fig, path)


def plot_likelihoods(series: dict, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    order = np.argsort(series["phi"], kind="stable")
    phi = np.asarray(series["phi"])[order]
    for rec in ("up", "dn", "xx"):
        ax.plot(phi, np.asarray(series[rec])[order], marker=".", label=f"record {rec}", gid=rec)
    ax.set_xlabel("phi")
    ax.set_ylabel("likelihood")
    ax.legend()
    return _save(fig, path)


def plot_ratio(series: dict, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    notes = []
    for name, s in series.items():
        ax.loglog(s["m"], s["ratio"], marker="o", label=name, gid=name)
        notes.append(f"{name}: slope {s['slope']:.3f}")
    ax.annotate("\n".join(notes), xy=(0.02, 0.03), xycoords="axes fraction", fontsize=8)
    ax.set_xlabel("m")
    ax.set_ylabel("|<f|xg> - <xf|g>| / |<f|g>|")
    ax.legend()
    return _save(fig, path)


def plot_data(report: RunReport) -> dict:
    """The arrays each plot draws, keyed by plot file stem."""
    out = {}
    if report.series("oscillator"):
        out["x3p_quantum_vs_classical"] = report.series("oscillator")
    if report.series("measurement"):
        out["record_likelihoods"] = report.series("measurement")
    if report.series("relpos"):
        out["asymmetry_ratio"] = report.series("relpos")
    return out


_PLOTTERS = {
    "x3p_quantum_vs_classical": plot_x3p,
    "record_likelihoods": plot_likelihoods,
    "asymmetry_ratio": plot_ratio,
}


def emit_plots(report: RunReport, out_dir) -> list[Path]:
    out = Path(out_dir)
    paths = []
    for stem, series in plot_data(report).items():
        out.mkdir(parents=True, exist_ok=True)
        paths.append(_PLOTTERS[stem](series, out / f"{stem}.svg"))
    return paths
