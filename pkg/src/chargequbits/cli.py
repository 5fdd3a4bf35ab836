"""Command-line front end.

    chargequbits simulate [flags]   per-point series CSV
    chargequbits sweep    [flags]   one summary row per swept value
    chargequbits mems     [flags]   predicted vs detected MEMS times
    chargequbits esd      [flags]   ESD intervals of a series

Settings come from flags and an optional ``--config`` file of ``key=value``
lines (flags win).  Data goes to ``--out`` or stdout; diagnostics go to
stderr.  ``--svg`` additionally renders a figure.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import analysis
from .analysis import (
    ESD_ZERO_TOL,
    MEMS_DEV_TOL,
    MEMS_ZETA_MIN,
    SWEEP_AXES,
    TimeGrid,
)
from .circuit import BASIS_LABELS, CircuitParams
from .dynamics import basis_state, density_matrix
from .errors import ChargeQubitError, ConfigError, DegenerateDenominatorError

log = logging.getLogger("chargequbits")

SERIES_HEADER = ["t", "p00", "p01", "p10", "p11", "zeta", "concurrence", "purity"]
SWEEP_HEADER = ["axis_value", "peak_concurrence", "t_first_peak", "esd_total_length",
                "first_mems_t", "first_mems_zeta"]
MEMS_HEADER = ["n", "predicted_t", "detected_t", "zeta", "deviation"]
ESD_HEADER = ["t_start", "t_end", "length"]

# key -> (parser, default); keys double as config-file keys.
_PARAM_KEYS = {f.name: f.default for f in fields(CircuitParams)}
_KEYS = {
    **{k: (float, v) for k, v in _PARAM_KEYS.items()},
    "initial_state": (str, "00"),
    "t_start": (float, 0.0),
    "t_end": (float, 20.0),
    "points": (int, 4001),
    "axis": (str, None),
    "values": (str, None),
    "dev_tol": (float, MEMS_DEV_TOL),
    "zeta_min": (float, MEMS_ZETA_MIN),
    "zero_tol": (float, ESD_ZERO_TOL),
    "n_max": (int, None),
    "columns": (str, "p00,p01,p10,p11"),
    "out": (str, None),
    "svg": (str, None),
    "series_dir": (str, None),
}


@dataclass
class RunConfig:
    params: CircuitParams
    initial_state: str
    grid: TimeGrid
    axis: Optional[str] = None
    values: tuple = ()
    dev_tol: float = MEMS_DEV_TOL
    zeta_min: float = MEMS_ZETA_MIN
    zero_tol: float = ESD_ZERO_TOL
    n_max: Optional[int] = None
    columns: tuple = ("p00", "p01", "p10", "p11")
    out: Optional[str] = None
    svg: Optional[str] = None
    series_dir: Optional[str] = None

    def rho0(self) -> np.ndarray:
        if self.initial_state in BASIS_LABELS:
            return basis_state(self.initial_state)
        path = Path(self.initial_state)
        if not path.is_file():
            raise ConfigError(
                f"initial_state: {self.initial_state!r} is neither a basis label "
                f"{BASIS_LABELS} nor a readable matrix file"
            )
        try:
            text = path.read_text(encoding="utf-8").replace(",", " ")
            m = np.loadtxt(io.StringIO(text), dtype=complex)
        except ValueError as exc:
            raise ConfigError(f"initial_state: cannot parse {path}: {exc}") from None
        try:
            return density_matrix(m)
        except ChargeQubitError as exc:
            raise ConfigError(f"initial_state: {exc}") from None


def read_config_file(path) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _KEYS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _convert(key, raw):
    conv, _ = _KEYS[key]
    if raw is None or not isinstance(raw, str):
        return raw
    try:
        value = conv(raw)
    except ValueError:
        raise ConfigError(f"{key}: invalid value {raw!r}") from None
    if conv is float and not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite, got {raw!r}")
    return value


def resolve_config(args: argparse.Namespace) -> RunConfig:
    file_values = read_config_file(args.config) if args.config else {}
    merged = {}
    for key, (_, default) in _KEYS.items():
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = _convert(key, flag)
        elif key in file_values:
            merged[key] = _convert(key, file_values[key])
        else:
            merged[key] = default

    def build(key, fn):
        try:
            return fn()
        except ChargeQubitError as exc:
            raise ConfigError(f"{key}: {exc}") from None

    params = build("circuit", lambda: CircuitParams(**{k: merged[k] for k in _PARAM_KEYS}))
    grid = build("grid", lambda: TimeGrid(merged["t_start"], merged["t_end"], merged["points"]))
    values = ()
    if merged["values"] is not None:
        try:
            values = tuple(float(v) for v in str(merged["values"]).split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"values: invalid list {merged['values']!r}") from None
    columns = tuple(c.strip() for c in str(merged["columns"]).split(",") if c.strip())
    for c in columns:
        if c not in SERIES_HEADER[1:] + ["deviation"]:
            raise ConfigError(f"columns: unknown column {c!r}")
    cfg = RunConfig(
        params=params,
        initial_state=str(merged["initial_state"]),
        grid=grid,
        axis=merged["axis"],
        values=values,
        dev_tol=merged["dev_tol"],
        zeta_min=merged["zeta_min"],
        zero_tol=merged["zero_tol"],
        n_max=merged["n_max"],
        columns=columns,
        out=merged["out"],
        svg=merged["svg"],
        series_dir=merged["series_dir"],
    )
    if cfg.dev_tol <= 0:
        raise ConfigError("dev_tol: must be > 0")
    if cfg.zeta_min < 0:
        raise ConfigError("zeta_min: must be >= 0")
    if cfg.zero_tol <= 0:
        raise ConfigError("zero_tol: must be > 0")
    if cfg.n_max is not None and cfg.n_max < 1:
        raise ConfigError("n_max: must be >= 1")
    return cfg


def fmt(x) -> str:
    """12 significant digits; empty string for missing values."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    return "%.12g" % (x + 0.0)


def _write_rows(header, rows, out: Optional[str], comments=()):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for line in comments:
        buf.write(f"# {line}\n")
    for row in rows:
        w.writerow(row)
    text = buf.getvalue()
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def series_rows(series):
    for rec in series.records():
        yield [fmt(v) for v in rec]


def write_series_csv(series, out):
    _write_rows(SERIES_HEADER, series_rows(series), out)


def read_series_csv(path) -> dict:
    """Columns of a series CSV as float arrays keyed by header name."""
    data = np.genfromtxt(path, delimiter=",", names=True, dtype=float, encoding="utf-8")
    return {name: np.atleast_1d(data[name]) for name in data.dtype.names}


def cmd_simulate(cfg: RunConfig) -> int:
    series = analysis.simulate_series(cfg.params, cfg.rho0(), cfg.grid)
    write_series_csv(series, cfg.out)
    if cfg.svg:
        from .plotting import plot_series
        plot_series(series, cfg.columns, cfg.svg)
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.axis is None:
        raise ConfigError("axis: required for sweep")
    if cfg.axis not in SWEEP_AXES:
        raise ConfigError(f"axis: invalid axis {cfg.axis!r}; expected one of {SWEEP_AXES}")
    if not cfg.values:
        raise ConfigError("values: required for sweep")
    base = cfg.params
    try:
        for v in cfg.values:
            base.with_(**{cfg.axis: v})
    except ChargeQubitError as exc:
        raise ConfigError(f"values: {exc}") from None
    summaries = analysis.sweep(base, cfg.axis, cfg.values, cfg.rho0(), cfg.grid,
                               cfg.dev_tol, cfg.zeta_min, cfg.zero_tol)
    rows = []
    for s in summaries:
        ev = s.first_mems
        rows.append([fmt(s.value), fmt(s.peak_concurrence), fmt(s.t_first_peak),
                     fmt(s.esd_total_length), fmt(ev.t if ev else None),
                     fmt(ev.zeta if ev else None)])
    _write_rows(SWEEP_HEADER, rows, cfg.out)
    if cfg.series_dir:
        d = Path(cfg.series_dir)
        d.mkdir(parents=True, exist_ok=True)
        for s in summaries:
            write_series_csv(s.series, d / f"{cfg.axis}_{fmt(s.value)}.csv")
    if cfg.svg:
        from .plotting import plot_sweep
        plot_sweep(summaries, cfg.svg, cfg.zero_tol)
    return 0


def mems_table(cfg: RunConfig):
    """Rows matching each predicted time to the nearest detected event.

    Returns ``(rows, notes, series, events)``.
    """
    series = analysis.simulate_series(cfg.params, cfg.rho0(), cfg.grid)
    events = analysis.detect_mems_events(series, cfg.dev_tol, cfg.zeta_min)
    notes = []
    rows = []
    try:
        t1 = analysis.predict_mems_times(cfg.params, 1)[0]
    except DegenerateDenominatorError:
        notes.append("prediction degenerate")
        log.warning("MEMS time prediction degenerate; reporting detected events only")
        for ev in events:
            rows.append(["", "", fmt(ev.t), fmt(ev.zeta), fmt(ev.deviation)])
        return rows, notes, series, events
    n_max = cfg.n_max or max(1, int(math.floor(cfg.grid.t_end / t1)))
    for n, tp in enumerate(analysis.predict_mems_times(cfg.params, n_max), 1):
        near = [ev for ev in events if abs(ev.t - tp) <= 0.5 * t1]
        if near:
            ev = min(near, key=lambda e: (abs(e.t - tp), e.t))
            rows.append([str(n), fmt(tp), fmt(ev.t), fmt(ev.zeta), fmt(ev.deviation)])
        else:
            rows.append([str(n), fmt(tp), "", "", ""])
    return rows, notes, series, events


def cmd_mems(cfg: RunConfig) -> int:
    rows, notes, series, events = mems_table(cfg)
    _write_rows(MEMS_HEADER, rows, cfg.out, comments=notes)
    if cfg.svg:
        from .plotting import plot_series
        plot_series(series, ("p00", "p11", "zeta"), cfg.svg, events=events)
    return 0


def cmd_esd(cfg: RunConfig) -> int:
    series = analysis.simulate_series(cfg.params, cfg.rho0(), cfg.grid)
    intervals = analysis.detect_esd_intervals(series, cfg.zero_tol)
    rows = [[fmt(iv.t_start), fmt(iv.t_end), fmt(iv.length)] for iv in intervals]
    _write_rows(ESD_HEADER, rows, cfg.out)
    if cfg.svg:
        from .plotting import plot_series
        plot_series(series, ("concurrence",), cfg.svg, esd=intervals)
    return 0


COMMANDS = {"simulate": cmd_simulate, "sweep": cmd_sweep, "mems": cmd_mems, "esd": cmd_esd}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("circuit")
    for key in _PARAM_KEYS:
        g.add_argument("--" + key.replace("_", "-"), dest=key, default=None, metavar="X")
    g = common.add_argument_group("run")
    g.add_argument("--initial-state", dest="initial_state", default=None,
                   help="basis label 00/01/10/11 or path to a 4x4 matrix file")
    g.add_argument("--t-start", dest="t_start", default=None)
    g.add_argument("--t-end", dest="t_end", default=None)
    g.add_argument("--points", default=None)
    g.add_argument("--axis", default=None, help=f"sweep axis, one of {', '.join(SWEEP_AXES)}")
    g.add_argument("--values", default=None, help="comma-separated sweep values")
    g.add_argument("--dev-tol", dest="dev_tol", default=None)
    g.add_argument("--zeta-min", dest="zeta_min", default=None)
    g.add_argument("--zero-tol", dest="zero_tol", default=None)
    g.add_argument("--n-max", dest="n_max", default=None, help="number of predicted MEMS times")
    g.add_argument("--columns", default=None, help="series columns drawn by --svg")
    g.add_argument("--out", default=None, help="output CSV (default: stdout)")
    g.add_argument("--svg", default=None, help="also render a figure to this path")
    g.add_argument("--series-dir", dest="series_dir", default=None,
                   help="sweep: write one series CSV per value here")
    g.add_argument("--config", default=None, help="key=value file; flags override it")

    parser = argparse.ArgumentParser(prog="chargequbits", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"chargequbits: config error: {exc}", file=sys.stderr)
        return 2
    except ChargeQubitError as exc:
        print(f"chargequbits: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"chargequbits: cannot write output: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
