import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chargequbits.dynamics import basis_state, pure_state
from chargequbits.entanglement import (
    SIGMA_YY,
    concurrence,
    entanglement_record,
    mems_measure,
    mems_template,
    purity,
    spin_flip,
    wootters_lambdas,
)
from chargequbits.errors import NotPSDError

from conftest import random_density, random_unitary

BELL = pure_state([1, 0, 0, 1])


def x_state_concurrence(rho):
    """Closed form for matrices with only diagonal and anti-diagonal entries."""
    r = np.asarray(rho)
    a = abs(r[0, 3]) - np.sqrt(r[1, 1].real * r[2, 2].real)
    b = abs(r[1, 2]) - np.sqrt(r[0, 0].real * r[3, 3].real)
    return max(0.0, 2 * a, 2 * b)


def werner(p):
    return p * BELL + (1 - p) * np.eye(4) / 4


def nonhermitian_concurrence(rho):
    """Textbook route: eigenvalues of rho * rho_tilde with a general solver."""
    ev = np.linalg.eigvals(rho @ spin_flip(rho))
    lam = np.sort(np.sqrt(np.abs(ev)))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def test_sigma_yy_entries():
    expected = np.array([
        [0, 0, 0, -1],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [-1, 0, 0, 0],
    ])
    np.testing.assert_array_equal(SIGMA_YY, expected)


def test_bell_and_product():
    assert concurrence(BELL) == pytest.approx(1.0, abs=1e-10)
    assert concurrence(basis_state("00")) == 0.0


def test_x_state_eq7_value():
    rho = mems_template(0.13)
    assert x_state_concurrence(rho) == pytest.approx(0.26, abs=1e-15)
    assert concurrence(rho) == pytest.approx(0.26, abs=1e-10)


@pytest.mark.parametrize("p", [0.0, 0.2, 1 / 3, 0.5, 1.0])
def test_werner(p):
    assert concurrence(werner(p)) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-9)


def test_mems_family_grid():
    for z in np.linspace(0, 0.5, 51):
        assert concurrence(mems_template(z, np.exp(1j * 7 * z))) == pytest.approx(2 * z, abs=1e-10)


def test_local_unitary_invariance():
    rng = np.random.default_rng(100)
    for _ in range(100):
        rho = random_density(rng, rank=rng.integers(1, 5))
        u = np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
        assert concurrence(u @ rho @ u.conj().T) == pytest.approx(concurrence(rho), abs=1e-9)


def test_matches_nonhermitian_route():
    rng = np.random.default_rng(101)
    rhos = np.stack([random_density(rng, rank=rng.integers(1, 5)) for _ in range(200)])
    ours = concurrence(rhos)
    ref = np.array([nonhermitian_concurrence(r) for r in rhos])
    np.testing.assert_allclose(ours, ref, atol=1e-6)
    assert np.all((ours >= 0) & (ours <= 1))


def test_batch_equals_single():
    rng = np.random.default_rng(102)
    rhos = np.stack([random_density(rng) for _ in range(5)])
    batch = concurrence(rhos)
    for k in range(5):
        assert concurrence(rhos[k]) == batch[k]


def test_lambdas_descending():
    lam = wootters_lambdas(werner(0.7))
    assert np.all(np.diff(lam) <= 0)


def test_not_psd_propagates():
    with pytest.raises(NotPSDError):
        concurrence(np.diag([1.1, -0.1, 0, 0]))


def test_purity_examples():
    assert purity(pure_state([0.3, 1j, 2, -1])) == pytest.approx(1.0, abs=1e-14)
    assert purity(np.eye(4) / 4) == 0.25
    assert purity(mems_template(0.13)) == pytest.approx(0.5338, abs=1e-15)


def test_mems_measure_examples():
    z, d = mems_measure(mems_template(0.19, 1j))
    assert z == pytest.approx(0.19, abs=1e-15) and d == 0
    z, d = mems_measure(basis_state("00"))
    assert z == 0 and d == pytest.approx(np.sqrt(0.5), abs=1e-15)
    z, d = mems_measure(np.eye(4) / 4)
    assert z == 0 and d == pytest.approx(0.5, abs=1e-15)


def test_record_fields():
    r = entanglement_record(mems_template(0.2))
    assert r.concurrence == pytest.approx(0.4, abs=1e-10)
    assert r.purity == pytest.approx(0.5 + 2 * 0.2 ** 2)
    assert r.zeta == pytest.approx(0.2) and r.mems_deviation == 0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=8, max_size=8).filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_pure_states_near_half_half_have_large_zeta(v):
    # populations within d of 1/2 on |00>,|11> force |psi_00 psi_11| >= 1/2 - d
    psi = np.array(v[:4]) + 1j * np.array(v[4:])
    zeta, dev = mems_measure(pure_state(psi))
    assert zeta >= 0.5 - dev - 1e-12
