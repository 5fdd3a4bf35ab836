import math

import numpy as np
import pytest

from chargequbits.analysis import (
    TimeGrid,
    concurrence_peaks,
    detect_esd_intervals,
    detect_mems_events,
    make_plan,
    predict_mems_times,
    series_from_states,
    simulate_series,
    summarize,
    sweep,
)
from chargequbits.circuit import CircuitParams
from chargequbits.dynamics import basis_state, evolve_closed_form
from chargequbits.entanglement import concurrence, mems_template
from chargequbits.errors import DegenerateDenominatorError, InvalidAxisError, InvalidParameterError

RHO00 = basis_state("00")
GRID = TimeGrid(0.0, 20.0, 4001)


@pytest.fixture(scope="module")
def sym_series():
    return simulate_series(CircuitParams(ej1=30, ej2=30, em=6), RHO00, TimeGrid(0, 10, 2001))


def test_grid_validation():
    with pytest.raises(InvalidParameterError):
        TimeGrid(0, 0, 10)
    with pytest.raises(InvalidParameterError):
        TimeGrid(-1, 1, 10)
    with pytest.raises(InvalidParameterError):
        TimeGrid(0, 1, 1)
    assert TimeGrid(0, 1, 11).spacing == pytest.approx(0.1)


def test_series_shape_and_invariants(sym_series):
    s = sym_series
    assert len(s) == 2001 and len(list(s.records())) == 2001
    np.testing.assert_allclose(s.populations.sum(axis=1), 1.0, atol=1e-10)
    np.testing.assert_allclose(s.purity, 1.0, atol=1e-9)


def test_symmetric_population_swing(sym_series):
    p = sym_series.populations
    # |00> and |11> swing fully; exchange symmetry pins p01 == p10 <= 1/2
    for k in (0, 3):
        assert p[:, k].max() > 0.9 and p[:, k].min() < 0.1
    np.testing.assert_allclose(p[:, 1], p[:, 2], atol=1e-12)
    assert p[:, 1].max() < 0.5 and p[:, 1].max() < p[:, 0].max()


def test_uncoupled_has_no_entanglement():
    s = simulate_series(CircuitParams(ej1=30, ej2=5, em=0), RHO00, GRID)
    assert np.max(s.concurrence) < 1e-12


def test_predict_mems_times_value():
    expected = math.pi / (math.sqrt(1234) - math.sqrt(634))
    t = predict_mems_times(CircuitParams(ej1=30, ej2=5, em=6), 3)
    assert t[0] == pytest.approx(expected, rel=1e-12)
    assert t[0] == pytest.approx(0.31578, abs=2e-5)
    assert t == [n * t[0] for n in (1, 2, 3)]


def test_predict_mems_symmetric_uncoupled():
    t = predict_mems_times(CircuitParams(ej1=12, ej2=12, em=0), 1)
    assert t[0] == pytest.approx(math.pi / 24, rel=1e-14)


def test_predict_uses_time_scale():
    a = predict_mems_times(CircuitParams(ej1=30, ej2=5, em=6), 1)[0]
    b = predict_mems_times(CircuitParams(ej1=30, ej2=5, em=6, time_scale=2.0), 1)[0]
    assert b == pytest.approx(2 * a)


def test_predict_degenerate():
    with pytest.raises(DegenerateDenominatorError):
        predict_mems_times(CircuitParams(ej1=30, ej2=0, em=6), 1)


def test_no_mems_for_stationary_state():
    s = simulate_series(CircuitParams(ej1=0, ej2=0, em=6), RHO00, TimeGrid(0, 5, 201))
    assert detect_mems_events(s) == []


def test_mems_events_symmetric(sym_series):
    events = detect_mems_events(sym_series)
    assert events, "symmetric weakly coupled circuit passes through Bell-like states"
    plan = sym_series.plan
    for ev in events:
        rho = evolve_closed_form(plan, ev.t)
        p = np.real(np.diag(rho))
        assert abs(p[0] - 0.5) <= 0.05 and abs(p[3] - 0.5) <= 0.05
        assert abs(concurrence(rho) - 2 * ev.zeta) <= 2 * 0.05
        assert ev.deviation <= 0.05 and ev.zeta >= 0.05
    # refinement improves on the sampled minimum
    i = int(np.argmin(sym_series.deviation))
    assert min(e.deviation for e in events) <= sym_series.deviation[i]


def test_mems_detection_on_static_template():
    grid = TimeGrid(0, 1, 11)
    rho = np.stack([mems_template(0.2)] * 11)
    rho[5] = mems_template(0.3)
    rho[:5] = 0.5 * rho[:5] + 0.5 * np.eye(4) / 4
    rho[6:] = 0.5 * rho[6:] + 0.5 * np.eye(4) / 4
    s = series_from_states(grid, grid.times(), rho)
    ev = detect_mems_events(s)
    assert len(ev) == 1 and ev[0].t == 0.5 and ev[0].zeta == pytest.approx(0.3)


def test_esd_all_zero():
    s = simulate_series(CircuitParams(ej1=30, ej2=2, em=0), RHO00, TimeGrid(0, 20, 401))
    iv = detect_esd_intervals(s)
    assert len(iv) == 1 and iv[0].t_start == 0 and iv[0].t_end == 20


def test_esd_none_when_entangled():
    grid = TimeGrid(0, 1, 11)
    rho = np.stack([mems_template(0.1 + 0.03 * k) for k in range(11)])
    s = series_from_states(grid, grid.times(), rho)
    assert np.all(s.concurrence >= 0.1 - 1e-12)
    assert detect_esd_intervals(s) == []


def test_esd_under_strong_decoherence():
    s = simulate_series(CircuitParams(ej1=30, ej2=5, em=200, gamma=0.8), RHO00, GRID)
    ivs = detect_esd_intervals(s)
    assert ivs and ivs[-1].t_end == 20
    starts = [iv.t_start for iv in ivs]
    assert starts == sorted(starts)
    for a, b in zip(ivs, ivs[1:]):
        assert a.t_end < b.t_start
    # refined boundaries sit on the threshold crossing
    for iv in ivs:
        if iv.t_start > 0:
            c = concurrence(evolve_closed_form(s.plan, iv.t_start))
            assert c == pytest.approx(1e-6, abs=1e-9)
    # covered grid points are exactly the below-threshold ones in runs of >= 2
    covered = np.zeros(len(s), bool)
    for iv in ivs:
        covered |= (s.t >= iv.t_start) & (s.t <= iv.t_end)
    assert np.all(s.concurrence[covered] < 1e-6)


def test_periodic_when_gaps_commensurate():
    p = CircuitParams(ej1=30, ej2=0, em=0, gamma=0)
    plan = make_plan(p, RHO00)
    period = 2 * math.pi / 30
    t = np.linspace(0, 3, 31)
    a = evolve_closed_form(plan, t)
    b = evolve_closed_form(plan, t + period)
    assert np.max(np.abs(a - b)) < 1e-9


def test_sweep_coupling_peak_ordering():
    out = sweep(CircuitParams(ej1=30, ej2=2), "em", (200, 60, 5), RHO00, GRID)
    assert [s.value for s in out] == [200, 60, 5]
    peaks = [s.peak_concurrence for s in out]
    assert peaks[0] >= peaks[1] >= peaks[2]


def test_sweep_decoherence_third_maximum():
    out = sweep(CircuitParams(ej1=30, ej2=5, em=200), "gamma", (0.01, 0.1, 0.8), RHO00, GRID)

    def third(s):
        pk = concurrence_peaks(s.series)
        return pk[2][1] if len(pk) >= 3 else 0.0

    assert third(out[2]) < third(out[0])


def test_single_value_sweep_matches_summary():
    base = CircuitParams(ej1=30, ej2=5, em=60)
    grid = TimeGrid(0, 5, 501)
    (s,) = sweep(base, "em", [60], RHO00, grid)
    ref = summarize(simulate_series(base, RHO00, grid), "em", 60.0)
    assert s == ref


def test_sweep_invalid_axis():
    with pytest.raises(InvalidAxisError):
        sweep(CircuitParams(), "ec1", [1.0], RHO00, TimeGrid(0, 1, 3))
