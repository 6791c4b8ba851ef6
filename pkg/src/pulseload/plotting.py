"""PNG figures for the report: the same data as the CSV outputs, drawn.

Rendering uses the Agg backend with fixed rc settings and stripped PNG
metadata so identical inputs give byte-identical files.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "figure.figsize": (5.0, 3.4),
    "figure.dpi": 100,
    "savefig.dpi": 120,
}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, format="png", metadata={"Software": None})
    plt.close(fig)
    return path


def plot_scale_of_fluctuation(curves: dict, path) -> Path:
    """``curves`` maps a label to (windows, estimates)."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for label, (w, e) in curves.items():
            ax.plot(w, e, marker=".", ms=3, lw=1, label=label)
        ax.set_xlabel("averaging window T (samples)")
        ax.set_ylabel(r"$T\,\gamma(T)$")
        ax.legend()
        return _save(fig, Path(path))


def plot_theta_curve(q, theta_hat, fit, path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(q, theta_hat, "o", ms=4, mfc="none", label="runs estimate")
        qq = np.linspace(0.0, float(np.max(q)) * 1.05, 200)
        ax.plot(qq, fit.predict(qq), "-", lw=1, label=rf"fit, $\theta$ = {fit.theta:.3f}")
        ax.set_xlabel("exceedance probability q(u)")
        ax.set_ylabel(r"$\hat\theta$")
        ax.set_xlim(left=0.0)
        ax.legend()
        return _save(fig, Path(path))


def plot_cox_moments(t, mean, var, fit_mean, fit_var, path) -> Path:
    with plt.rc_context({**STYLE, "figure.figsize": (7.0, 3.0)}):
        fig, (a1, a2) = plt.subplots(1, 2)
        a1.plot(t, mean, "o", ms=3, mfc="none")
        a1.plot(t, fit_mean, "-", lw=1)
        a1.set_xlabel("t (h)")
        a1.set_ylabel(r"E[$M_t$]")
        a2.plot(t, var, "o", ms=3, mfc="none")
        a2.plot(t, fit_var, "-", lw=1)
        a2.set_xlabel("t (h)")
        a2.set_ylabel(r"var[$M_t$]")
        return _save(fig, Path(path))


def plot_intensity_paths(times, paths, path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for p in paths:
            ax.plot(times, p, lw=0.7)
        ax.set_xlabel("t (h)")
        ax.set_ylabel(r"$\Lambda(t)$ (events/h)")
        return _save(fig, Path(path))


def plot_probability_paper(levels, cdf, gumbel, frechet, path) -> Path:
    """Gumbel and Frechet probability plots side by side."""
    levels = np.asarray(levels, dtype=float)
    y = -np.log(-np.log(np.asarray(cdf, dtype=float)))
    with plt.rc_context({**STYLE, "figure.figsize": (7.0, 3.0)}):
        fig, (a1, a2) = plt.subplots(1, 2)
        a1.plot(levels, y, "o", ms=4, mfc="none")
        a1.plot(levels, gumbel.reduced_variate(levels), "-", lw=1)
        a1.set_xlabel("level")
        a1.set_ylabel("-ln(-ln F)")
        a1.set_title("Gumbel")
        a2.plot(np.log(levels), y, "o", ms=4, mfc="none")
        a2.plot(np.log(levels), frechet.reduced_variate(levels), "-", lw=1)
        a2.set_xlabel("ln(level)")
        a2.set_title("Frechet")
        return _save(fig, Path(path))
