"""Time series of populations and entanglement, and features found in them.

Features:

* MEMS events -- instants where the state has (approximately) populations
  1/2 on |00> and |11> with a single coherence ``zeta`` between them.
* Predicted MEMS times from the gap formula
  ``t_n = n pi / (sqrt((EJ1+EJ2)^2 + Em^2/4) - sqrt((EJ1-EJ2)^2 + Em^2/4))``.
* ESD intervals -- finite stretches where the concurrence is zero.

Event times and interval boundaries are refined against the exact
closed-form solution, not by interpolating the sampled series.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .circuit import CircuitParams, scaled_hamiltonian
from .dynamics import EvolutionPlan, evolve_closed_form, populations
from .entanglement import concurrence, mems_measure, purity
from .errors import DegenerateDenominatorError, InvalidAxisError, InvalidParameterError

MEMS_DEV_TOL = 0.05
MEMS_ZETA_MIN = 0.05
ESD_ZERO_TOL = 1e-6
SWEEP_AXES = ("ej1", "ej2", "em", "gamma")

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on the dimensionless scaled time."""

    t_start: float = 0.0
    t_end: float = 20.0
    n_points: int = 4001

    def __post_init__(self):
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_end)):
            raise InvalidParameterError("grid bounds must be finite")
        if self.t_start < 0:
            raise InvalidParameterError(f"t_start must be >= 0, got {self.t_start}")
        if not self.t_end > self.t_start:
            raise InvalidParameterError(
                f"t_end ({self.t_end}) must be greater than t_start ({self.t_start})"
            )
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise InvalidParameterError(f"n_points must be an integer >= 2, got {self.n_points}")

    @property
    def spacing(self) -> float:
        return (self.t_end - self.t_start) / (self.n_points - 1)

    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, int(self.n_points))


@dataclass(frozen=True)
class TimeSeries:
    grid: TimeGrid
    t: np.ndarray
    populations: np.ndarray
    zeta: np.ndarray
    deviation: np.ndarray
    concurrence: np.ndarray
    purity: np.ndarray
    plan: Optional[EvolutionPlan] = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.t)

    def records(self):
        """Iterate ``(t, p00, p01, p10, p11, zeta, concurrence, purity)``."""
        for i in range(len(self.t)):
            yield (self.t[i], *self.populations[i], self.zeta[i],
                   self.concurrence[i], self.purity[i])


@dataclass(frozen=True)
class MemsEvent:
    t: float
    zeta: float
    deviation: float


@dataclass(frozen=True)
class EsdInterval:
    t_start: float
    t_end: float

    @property
    def length(self) -> float:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class SweepSummary:
    axis: str
    value: float
    peak_concurrence: float
    t_first_peak: Optional[float]
    esd_total_length: float
    first_mems: Optional[MemsEvent]
    series: TimeSeries = field(repr=False, compare=False)


def make_plan(p: CircuitParams, rho0) -> EvolutionPlan:
    return EvolutionPlan.build(scaled_hamiltonian(p), rho0, p.gamma)


def series_from_states(grid: TimeGrid, t, rho, plan=None) -> TimeSeries:
    zeta, dev = mems_measure(rho)
    return TimeSeries(
        grid=grid,
        t=np.asarray(t, dtype=float),
        populations=populations(rho),
        zeta=np.asarray(zeta),
        deviation=np.asarray(dev),
        concurrence=np.asarray(concurrence(rho)),
        purity=np.asarray(purity(rho)),
        plan=plan,
    )


def simulate_series(p: CircuitParams, rho0, grid: TimeGrid) -> TimeSeries:
    """Evaluate the exact solution on every grid point."""
    plan = make_plan(p, rho0)
    t = grid.times()
    return series_from_states(grid, t, evolve_closed_form(plan, t), plan)


def mems_denominator(p: CircuitParams) -> float:
    s = math.hypot(p.ej1 + p.ej2, p.em / 2.0)
    d = math.hypot(p.ej1 - p.ej2, p.em / 2.0)
    return s - d


def predict_mems_times(p: CircuitParams, n_max: int) -> list[float]:
    """Predicted MEMS instants ``t_n`` for ``n = 1..n_max``, scaled time."""
    if p.ej1 * p.ej2 == 0:
        raise DegenerateDenominatorError(
            "MEMS time prediction needs both Josephson energies nonzero"
        )
    denom = mems_denominator(p) / p.time_scale
    if denom <= 0:
        raise DegenerateDenominatorError(f"MEMS time denominator is {denom}")
    t1 = math.pi / denom
    return [n * t1 for n in range(1, n_max + 1)]


def _golden_min(f, a, b, tol=1e-10, max_iter=200):
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def _local_minima(v) -> list[int]:
    n = len(v)
    out = []
    for i in range(n):
        left = v[i - 1] if i > 0 else np.inf
        right = v[i + 1] if i < n - 1 else np.inf
        if v[i] <= left and v[i] < right:
            out.append(i)
    return out


def local_maxima(v) -> list[int]:
    """Interior indices with ``v[i-1] < v[i] >= v[i+1]``."""
    v = np.asarray(v)
    return [i for i in range(1, len(v) - 1) if v[i] > v[i - 1] and v[i] >= v[i + 1]]


def concurrence_peaks(series: TimeSeries, floor: float = ESD_ZERO_TOL) -> list[tuple[float, float]]:
    """``(t, C)`` of the sampled local maxima of concurrence above ``floor``."""
    c = series.concurrence
    return [(float(series.t[i]), float(c[i])) for i in local_maxima(c) if c[i] > floor]


def detect_mems_events(series: TimeSeries, dev_tol: float = MEMS_DEV_TOL,
                       zeta_min: float = MEMS_ZETA_MIN) -> list[MemsEvent]:
    """Local minima of the MEMS deviation that fall within ``dev_tol``."""
    if dev_tol <= 0 or zeta_min < 0:
        raise InvalidParameterError("need dev_tol > 0 and zeta_min >= 0")
    t = series.t
    dev = series.deviation
    plan = series.plan
    events = []
    for i in _local_minima(dev):
        lo, hi = max(i - 1, 0), min(i + 1, len(t) - 1)
        if plan is not None and hi > lo:
            def f(x):
                return mems_measure(evolve_closed_form(plan, x))[1]
            t_best, _ = _golden_min(f, t[lo], t[hi])
            if f(t[i]) <= f(t_best):
                t_best = t[i]
            zeta, d = mems_measure(evolve_closed_form(plan, t_best))
        else:
            t_best, zeta, d = t[i], series.zeta[i], dev[i]
        if d <= dev_tol and zeta >= zeta_min:
            events.append(MemsEvent(float(t_best), float(zeta), float(d)))
    return events


def _refine_crossing(g, a, b, xtol=1e-10, points=32):
    """Sign change of ``g`` in ``[a, b]`` by multisection.

    Bisection generalised to ``points`` interior samples per round; ``g``
    takes an array of times so each round is a single batched evaluation.
    """
    ga, gb = g(np.array([a, b]))
    if ga == 0:
        return a
    if gb == 0:
        return b
    if ga * gb > 0:
        return a if abs(ga) < abs(gb) else b
    sa = ga > 0
    while b - a > xtol:
        x = np.linspace(a, b, points + 2)[1:-1]
        gx = g(x)
        flip = np.nonzero((gx > 0) != sa)[0]
        if len(flip) == 0:
            a = x[-1]
        else:
            k = flip[0]
            if gx[k] == 0:
                return float(x[k])
            b = x[k]
            if k > 0:
                a = x[k - 1]
    return 0.5 * (a + b)


def detect_esd_intervals(series: TimeSeries, zero_tol: float = ESD_ZERO_TOL) -> list[EsdInterval]:
    """Maximal runs (of at least two grid points) with concurrence below ``zero_tol``."""
    if zero_tol <= 0:
        raise InvalidParameterError("zero_tol must be positive")
    t = series.t
    below = series.concurrence < zero_tol
    plan = series.plan

    def g(x):
        return concurrence(evolve_closed_form(plan, x)) - zero_tol

    intervals = []
    n = len(t)
    i = 0
    while i < n:
        if not below[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and below[j + 1]:
            j += 1
        if j > i:
            start = t[i] if i == 0 or plan is None else _refine_crossing(g, t[i - 1], t[i])
            end = t[j] if j == n - 1 or plan is None else _refine_crossing(g, t[j], t[j + 1])
            intervals.append(EsdInterval(float(start), float(end)))
        i = j + 1
    return intervals


def summarize(series: TimeSeries, axis: str = "", value: float = float("nan"),
              dev_tol: float = MEMS_DEV_TOL, zeta_min: float = MEMS_ZETA_MIN,
              zero_tol: float = ESD_ZERO_TOL) -> SweepSummary:
    peaks = concurrence_peaks(series, zero_tol)
    esd = detect_esd_intervals(series, zero_tol)
    mems = detect_mems_events(series, dev_tol, zeta_min)
    return SweepSummary(
        axis=axis,
        value=value,
        peak_concurrence=float(np.max(series.concurrence)),
        t_first_peak=peaks[0][0] if peaks else None,
        esd_total_length=float(sum(iv.length for iv in esd)),
        first_mems=mems[0] if mems else None,
        series=series,
    )


def sweep(base: CircuitParams, axis: str, values: Sequence[float], rho0, grid: TimeGrid,
          dev_tol: float = MEMS_DEV_TOL, zeta_min: float = MEMS_ZETA_MIN,
          zero_tol: float = ESD_ZERO_TOL) -> list[SweepSummary]:
    """One summary per value of ``axis``, in input order."""
    if axis not in SWEEP_AXES:
        raise InvalidAxisError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    out = []
    for v in values:
        v = float(v)
        if not math.isfinite(v):
            raise InvalidParameterError(f"sweep value {v} is not finite")
        series = simulate_series(base.with_(**{axis: v}), rho0, grid)
        out.append(summarize(series, axis, v, dev_tol, zeta_min, zero_tol))
    return out
