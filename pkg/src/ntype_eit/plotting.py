"""Matplotlib figures for spectra and gamma_c scans."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.family": "serif",
    "axes.labelsize": 12,
    "axes.titlesize": 12,
    "xtick.labelsize": 10,
    "ytick.labelsize": 10,
    "legend.fontsize": 9,
    "legend.frameon": False,
    "lines.linewidth": 1.3,
    "figure.dpi": 150,
    "savefig.bbox": "tight",
}

AXIS_LABELS = {
    "delta_b": r"$\Delta_b/\gamma$",
    "gamma_c": r"$\gamma_c/\gamma$",
    "omega_c": r"$\Omega_c/\gamma$",
}


def figure(width=6.0, height=None):
    if not height:
        height = width * (math.sqrt(5) - 1.0) / 2.0
    return plt.subplots(figsize=(width, height))


def plot_spectra(series, path, *, title=None, mark_windows=True, logy=False):
    """One absorption curve per ``(label, Spectrum)`` pair, saved to ``path``."""
    with plt.rc_context(STYLE):
        fig, ax = figure()
        axis_name = None
        for label, spectrum in series:
            axis_name = spectrum.axis_name
            line, = ax.plot(spectrum.axis, spectrum.absorption, label=label)
            if mark_windows:
                for w in spectrum.windows:
                    ax.plot(w.location, w.value, "v", color=line.get_color(), ms=4)
        ax.set_xlabel(AXIS_LABELS.get(axis_name, axis_name or ""))
        ax.set_ylabel(r"Im $\rho_{23}$")
        if logy:
            ax.set_yscale("log")
        if title:
            ax.set_title(title)
        if len(series) > 1:
            ax.legend()
        fig.savefig(path)
        plt.close(fig)
    return Path(path)


def plot_gamma_scan(scan, path, *, title=None):
    with plt.rc_context(STYLE):
        fig, ax = figure()
        ax.plot(scan.gammas, scan.absorption, "o-", label="numeric")
        if scan.slope is not None:
            xs = scan.gammas[scan.fit_mask]
            ax.plot(xs, scan.slope * xs, "--", label=f"fit, slope {scan.slope:.4g}, $R^2$={scan.r_squared:.4f}")
            ax.legend()
        ax.set_xlabel(AXIS_LABELS["gamma_c"])
        ax.set_ylabel(rf"Im $\rho_{{23}}$ at $\delta_b$={scan.at_detuning:g}")
        if title:
            ax.set_title(title)
        fig.savefig(path)
        plt.close(fig)
    return Path(path)


SCRIPT_TEMPLATE = '''\
"""Re-plot {title} from the CSV files written next to this script."""
import csv
from pathlib import Path

import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent
FILES = {files!r}


def load(name):
    with open(HERE / name, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [float(r["axis"]) for r in rows], [float(r["im_rho23"]) for r in rows]


fig, ax = plt.subplots(figsize=(6, 3.7))
for label, name in FILES:
    x, y = load(name)
    ax.plot(x, y, {marker!r}, label=label)
ax.set_xlabel({xlabel!r})
ax.set_ylabel("Im rho_23")
if len(FILES) > 1:
    ax.legend()
fig.savefig(HERE / {png!r}, bbox_inches="tight", dpi=150)
'''


def plot_script(files, png_name, *, axis_name="delta_b", title="the spectra", marker="-") -> str:
    """Source of a standalone script that redraws the CSV outputs."""
    return SCRIPT_TEMPLATE.format(
        title=title,
        files=[(label, Path(f).name) for label, f in files],
        marker=marker,
        xlabel=f"{axis_name} / gamma",
        png=png_name,
    )
