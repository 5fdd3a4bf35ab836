import numpy as np
import pytest

from chargequbits.circuit import CircuitParams

# (label, params) for the reference parameter sets.
REFERENCE_PARAMS = [
    ("sym_em6", CircuitParams(ej1=30, ej2=30, em=6)),
    ("ej2_5_em6", CircuitParams(ej1=30, ej2=5, em=6)),
    ("ej2_1_em60", CircuitParams(ej1=30, ej2=1, em=60)),
    ("ej2_6_em60", CircuitParams(ej1=30, ej2=6, em=60)),
    ("ej2_2_em200", CircuitParams(ej1=30, ej2=2, em=200)),
    ("ej2_2_em60", CircuitParams(ej1=30, ej2=2, em=60)),
    ("ej2_2_em5", CircuitParams(ej1=30, ej2=2, em=5)),
    ("ej2_5_em200", CircuitParams(ej1=30, ej2=5, em=200)),
    ("ej2_5_em60", CircuitParams(ej1=30, ej2=5, em=60)),
    ("ej2_5_em5", CircuitParams(ej1=30, ej2=5, em=5)),
    ("ej2_5_em200_g0.01", CircuitParams(ej1=30, ej2=5, em=200, gamma=0.01)),
    ("ej2_5_em200_g0.1", CircuitParams(ej1=30, ej2=5, em=200, gamma=0.1)),
    ("ej2_5_em200_g0.8", CircuitParams(ej1=30, ej2=5, em=200, gamma=0.8)),
]


def random_hermitian(rng, n=4, scale=1.0):
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (x + x.conj().T)


def random_density(rng, rank=4):
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, n):
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


@pytest.fixture
def rng():
    return np.random.default_rng(20080101)


# -- acceptance reporting ---------------------------------------------------

_ACCEPTANCE = {}
_REGRESSION_LOG = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    n, title = marker.args
    ok = call.excinfo is None
    prev = _ACCEPTANCE.get(n, (title, True))
    _ACCEPTANCE[n] = (title, prev[1] and ok)


@pytest.fixture
def regression_log(request):
    """Append free-form notes that are echoed in the terminal summary."""
    def note(msg):
        _REGRESSION_LOG.append(f"{request.node.name}: {msg}")
    return note


def pytest_terminal_summary(terminalreporter):
    if _REGRESSION_LOG:
        terminalreporter.section("regression log")
        for line in _REGRESSION_LOG:
            terminalreporter.write_line(line)
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:>2}. {title}")
