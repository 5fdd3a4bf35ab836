"""Static line charts of simulated series, written next to the CSV output."""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .analysis import (  # noqa: E402
    ESD_ZERO_TOL, EsdInterval, MemsEvent, SweepSummary, TimeSeries, detect_esd_intervals,
)

# 800 x 400 user units in the SVG viewBox (matplotlib writes points).
FIGSIZE = (800 / 72.0, 400 / 72.0)
ESD_COLOR = "0.85"
LINESTYLES = ("-", "--", "-.", ":")

plt.rcParams.update({
    "svg.hashsalt": "chargequbits",
    "svg.fonttype": "path",
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
})


def series_column(series: TimeSeries, name: str):
    if name in ("p00", "p01", "p10", "p11"):
        return series.populations[:, ("p00", "p01", "p10", "p11").index(name)]
    if name in ("zeta", "concurrence", "purity", "deviation"):
        return getattr(series, name)
    raise KeyError(f"unknown column {name!r}")


def _shade(ax, intervals: Iterable[EsdInterval]):
    for iv in intervals:
        ax.axvspan(iv.t_start, iv.t_end, color=ESD_COLOR, lw=0, zorder=0)


def _save(fig, path):
    path = Path(path)
    fig.savefig(path, metadata={"Date": None} if path.suffix.lower() == ".svg" else None)
    plt.close(fig)
    return path


def plot_series(series: TimeSeries, columns: Sequence[str], path, esd: Sequence[EsdInterval] = (),
                events: Sequence[MemsEvent] = (), title: Optional[str] = None):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    _shade(ax, esd)
    for k, name in enumerate(columns):
        ax.plot(series.t, series_column(series, name), LINESTYLES[k % 4], lw=1.2, label=name)
    for ev in events:
        ax.axvline(ev.t, color="k", lw=0.6, alpha=0.5)
    ax.set_xlim(series.t[0], series.t[-1])
    ax.set_xlabel(r"$\lambda t$")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", ncol=len(columns))
    fig.tight_layout()
    return _save(fig, path)


def plot_sweep(summaries: Sequence[SweepSummary], path, zero_tol: Optional[float] = ESD_ZERO_TOL):
    """Concurrence of every swept value; ESD stretches shaded unless ``zero_tol`` is None."""
    fig, ax = plt.subplots(figsize=FIGSIZE)
    if zero_tol is not None:
        for s in summaries:
            _shade(ax, detect_esd_intervals(s.series, zero_tol))
    for k, s in enumerate(summaries):
        ax.plot(s.series.t, s.series.concurrence, LINESTYLES[k % 4], lw=1.2,
                label=f"{s.axis}={s.value:g}")
    t = summaries[0].series.t if summaries else [0, 1]
    ax.set_xlim(t[0], t[-1])
    ax.set_ylim(0, 1)
    ax.set_xlabel(r"$\lambda t$")
    ax.set_ylabel("concurrence")
    ax.legend(loc="upper right")
    fig.tight_layout()
    return _save(fig, path)
