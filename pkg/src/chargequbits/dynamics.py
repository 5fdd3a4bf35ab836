"""Density-matrix evolution under intrinsic (phase) decoherence.

The master equation is

    d rho / dt = -i [H, rho] - (gamma / 2) [H, [H, rho]]        (hbar = 1)

with ``t`` the dimensionless scaled time and ``H`` expressed in units of the
circuit time scale.  Three engines solve it:

* ``evolve_closed_form`` -- exact; coherences between eigenstates k, l pick
  up ``exp(-i w t - gamma w^2 t / 2)`` with ``w = E_k - E_l``.
* ``evolve_kraus`` -- truncated Kraus sum
  ``sum_m (gamma t)^m / m! M_m rho M_m^H`` with
  ``M_m = H^m exp(-i H t) exp(-gamma t H^2 / 2)``.
* ``evolve_integrator`` -- fixed-step classical RK4 on the equation above.

The first two share one eigendecomposition of ``H``; the integrator never
diagonalizes anything and serves as the independent check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .circuit import BASIS_LABELS
from .errors import (
    NegativeTimeError,
    NotDensityMatrixError,
    StepTooLargeError,
    TruncationError,
)
from .spectral import Spectrum, adjoint, eig_hermitian, eigh, hermitian

DENSITY_HERMITIAN_TOL = 1e-10
DENSITY_TRACE_TOL = 1e-10
DENSITY_PSD_TOL = 1e-9

KRAUS_DEFAULT_ORDER = 40
KRAUS_TAIL_TOL = 1e-12
RK4_STABILITY_LIMIT = 0.1


def density_matrix(a) -> np.ndarray:
    """Validate ``a`` as a density matrix; returns a Hermitian complex copy."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (4, 4):
        raise NotDensityMatrixError(f"expected a 4x4 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotDensityMatrixError("density matrix has non-finite entries")
    herm_err = np.max(np.abs(a - a.conj().T))
    if herm_err > DENSITY_HERMITIAN_TOL:
        raise NotDensityMatrixError(f"not Hermitian (deviation {herm_err:.3e})")
    rho = 0.5 * (a + a.conj().T)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > DENSITY_TRACE_TOL:
        raise NotDensityMatrixError(f"trace is {tr!r}, expected 1")
    w, _ = eigh(rho)
    if w[0] < -DENSITY_PSD_TOL:
        raise NotDensityMatrixError(f"negative eigenvalue {w[0]:.3e}")
    return rho


def basis_state(label: str) -> np.ndarray:
    """Projector onto one of the charge basis states ``"00"``..``"11"``."""
    try:
        i = BASIS_LABELS.index(label)
    except ValueError:
        raise NotDensityMatrixError(
            f"unknown basis label {label!r}; expected one of {BASIS_LABELS}"
        ) from None
    rho = np.zeros((4, 4), dtype=complex)
    rho[i, i] = 1.0
    return rho


def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def populations(rho) -> np.ndarray:
    """Occupation probabilities of |00>, |01>, |10>, |11> (works on stacks)."""
    d = np.diagonal(np.asarray(rho), axis1=-2, axis2=-1)
    imag = np.max(np.abs(d.imag)) if d.size else 0.0
    if imag >= 1e-12:
        raise NotDensityMatrixError(f"diagonal has imaginary part {imag:.3e}")
    return d.real.copy()


def _check_time(t):
    if np.any(np.asarray(t) < 0):
        raise NegativeTimeError(f"time must be non-negative, got {t}")


@dataclass(frozen=True)
class EvolutionPlan:
    """Everything needed to evaluate the exact solution at any time.

    ``spectrum`` is that of the traceless part ``H - energy_offset * I``.
    Only energy gaps enter the dynamics, and removing the offset keeps the
    phases ``w t`` free of roundoff from a large common energy.

    Immutable; one plan may serve any number of concurrent evaluations.
    """

    spectrum: Spectrum
    energy_offset: float
    rho0: np.ndarray
    rho0_eigenbasis: np.ndarray
    gamma: float

    @classmethod
    def build(cls, h, rho0, gamma: float) -> "EvolutionPlan":
        if gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {gamma}")
        rho0 = density_matrix(rho0)
        h = hermitian(h)
        offset = float(np.trace(h).real) / h.shape[0]
        spec = eig_hermitian(h - offset * np.eye(h.shape[0]))
        u = spec.eigenvectors
        rho_e = u.conj().T @ rho0 @ u
        rho_e = 0.5 * (rho_e + rho_e.conj().T)
        rho0.setflags(write=False)
        rho_e.setflags(write=False)
        return cls(spec, offset, rho0, rho_e, float(gamma))

    @property
    def gaps(self) -> np.ndarray:
        e = self.spectrum.eigenvalues
        return e[:, None] - e[None, :]

    def coherence_factors(self, t) -> np.ndarray:
        """``exp(-i w_kl t - gamma w_kl^2 t / 2)`` for scalar or 1-D ``t``."""
        t = np.asarray(t, dtype=float)
        w = self.gaps
        tt = t[..., None, None]
        return np.exp(-1j * w * tt - 0.5 * self.gamma * w * w * tt)

    def eigenbasis_state(self, t) -> np.ndarray:
        _check_time(t)
        return self.rho0_eigenbasis * self.coherence_factors(t)


def evolve_closed_form(plan: EvolutionPlan, t) -> np.ndarray:
    """Exact rho(t) in the charge basis.

    ``t`` may be a scalar or a 1-D array (returns a stack).  At ``t = 0``
    the initial matrix is returned unchanged.
    """
    _check_time(t)
    u = plan.spectrum.eigenvectors
    rho = u @ plan.eigenbasis_state(t) @ u.conj().T
    rho = 0.5 * (rho + adjoint(rho))
    zero = np.asarray(t) == 0
    if np.any(zero):
        rho[zero] = plan.rho0
    return rho


def kraus_tail_bound(x: float, m_max: int) -> float:
    """Poisson tail ``sum_{m > m_max} e^-x x^m / m!``."""
    if x <= 0:
        return 0.0
    return float(poisson.sf(m_max, x))


def kraus_order(x: float, tol: float = KRAUS_TAIL_TOL) -> int:
    """Smallest truncation order whose Poisson tail at ``x`` is below ``tol``."""
    m = 0
    while kraus_tail_bound(x, m) >= tol:
        m += 1
    return m


def evolve_kraus(h, rho0, gamma: float, t: float, m_max: int = KRAUS_DEFAULT_ORDER,
                 tail_tol: float = KRAUS_TAIL_TOL) -> np.ndarray:
    """Truncated Kraus sum ``sum_{m<=m_max} (gamma t)^m/m! M_m rho0 M_m^H``.

    Matrix functions of ``H`` come from its spectrum.  Each term is formed
    in the eigenbasis with the weight ``(gamma t)^m E^m exp(-gamma t E^2/2)
    / sqrt(m!)`` evaluated in log space, which keeps large orders finite.
    Raises :class:`TruncationError` when the Poisson tail bound at
    ``x = gamma t max E^2`` is not below ``tail_tol``.
    """
    _check_time(t)
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    rho0 = density_matrix(rho0)
    if t == 0:
        return rho0.copy()
    spec = eig_hermitian(h)
    e, u = spec.eigenvalues, spec.eigenvectors
    x = gamma * t * float(np.max(e * e))
    tail = kraus_tail_bound(x, m_max)
    if tail >= tail_tol:
        raise TruncationError(
            f"Kraus tail bound {tail:.3e} at x={x:.4g} exceeds {tail_tol:g} "
            f"with m_max={m_max}; need m_max >= {kraus_order(x, tail_tol)}"
        )
    rho_e = u.conj().T @ rho0 @ u
    unitary = np.exp(-1j * e * t)
    gt = gamma * t
    acc = np.zeros((4, 4), dtype=complex)
    for m in range(m_max + 1):
        if m == 0:
            amp = np.exp(-0.5 * gt * e * e)
        else:
            if gt == 0:
                break
            # sqrt((gt)^m / m!) * E^m * exp(-gt E^2 / 2), sign carried by E^m
            with np.errstate(divide="ignore"):
                log_abs = 0.5 * (m * math.log(gt) - gammaln(m + 1)) \
                    + m * np.log(np.abs(e)) - 0.5 * gt * e * e
            amp = np.where(e == 0, 0.0, np.exp(log_abs) * np.sign(e) ** m)
        k = amp * unitary
        acc += k[:, None] * rho_e * k.conj()[None, :]
    rho = u @ acc @ u.conj().T
    return 0.5 * (rho + rho.conj().T)


def liouvillian(h, gamma: float) -> np.ndarray:
    """16x16 generator acting on row-major ``vec(rho)``.

    Uses ``vec(A rho B) = (A kron B^T) vec(rho)``.
    """
    h = np.asarray(h, dtype=complex)
    eye = np.eye(h.shape[0])
    ht = h.T
    comm = np.kron(h, eye) - np.kron(eye, ht)
    return -1j * comm - 0.5 * gamma * (comm @ comm)


def master_rhs(h, rho, gamma: float) -> np.ndarray:
    """Right-hand side of the master equation in commutator form."""
    c = h @ rho - rho @ h
    return -1j * c - 0.5 * gamma * (h @ c - c @ h)


def evolve_integrator(h, rho0, gamma: float, t: float, dt: float) -> np.ndarray:
    """Fixed-step RK4 integration up to ``t``; last step shortened to land on ``t``.

    The state is re-Hermitized after every step.  Raises
    :class:`StepTooLargeError` if ``dt * ||H||_F > 0.1``.
    """
    _check_time(t)
    h = hermitian(h)
    rho = density_matrix(rho0)
    if t == 0:
        return rho
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    hnorm = float(np.linalg.norm(h))
    if dt * hnorm > RK4_STABILITY_LIMIT:
        raise StepTooLargeError(
            f"dt*||H|| = {dt * hnorm:.3g} exceeds {RK4_STABILITY_LIMIT}"
        )
    n = h.shape[0]
    gen = liouvillian(h, gamma)
    v = rho.reshape(-1).copy()
    n_full = int(math.floor(t / dt))
    remainder = t - n_full * dt
    if remainder <= 1e-12 * t:
        remainder = 0.0
    steps = [dt] * n_full + ([remainder] if remainder > 0 else [])
    if not steps:
        steps = [t]
    for step in steps:
        k1 = gen @ v
        k2 = gen @ (v + 0.5 * step * k1)
        k3 = gen @ (v + 0.5 * step * k2)
        k4 = gen @ (v + step * k3)
        v = v + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        r = v.reshape(n, n)
        v = (0.5 * (r + r.conj().T)).reshape(-1)
    return v.reshape(n, n)
