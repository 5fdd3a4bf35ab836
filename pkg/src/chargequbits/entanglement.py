"""Concurrence, purity and distance to the half-half coherent mixture.

All functions accept a single 4x4 density matrix or a stack of them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotDensityMatrixError
from .spectral import TOL, adjoint, eigh, sqrt_psd

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
# sigma_y (x) sigma_y in the (|00>, |01>, |10>, |11>) order: real anti-diagonal.
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)


@dataclass(frozen=True)
class EntanglementRecord:
    concurrence: float
    purity: float
    zeta: float
    mems_deviation: float


def spin_flip(rho) -> np.ndarray:
    """``(sigma_y x sigma_y) rho* (sigma_y x sigma_y)``, conjugation in the charge basis."""
    return SIGMA_YY @ np.conj(rho) @ SIGMA_YY


def wootters_lambdas(rho) -> np.ndarray:
    """Square roots of the eigenvalues of ``rho * spin_flip(rho)``, descending.

    These equal the singular values of ``A = sqrt(rho) Y sqrt(rho)*`` since
    ``A A^H = sqrt(rho) spin_flip(rho) sqrt(rho)``.  The singular values are
    read off the Hermitian dilation ``[[0, A], [A^H, 0]]`` whose spectrum is
    ``+-sigma``; this avoids squaring and keeps near-zero values accurate.
    """
    rho = np.asarray(rho, dtype=complex)
    s = sqrt_psd(rho)
    a = s @ SIGMA_YY @ np.conj(s)
    lead = a.shape[:-2]
    dil = np.zeros(lead + (8, 8), dtype=complex)
    dil[..., :4, 4:] = a
    dil[..., 4:, :4] = adjoint(a)
    w, _ = eigh(dil)
    top = w[..., 4:][..., ::-1]
    low = np.min(top) if top.size else 0.0
    if low < -TOL.psd_clamp:
        raise NotDensityMatrixError(f"negative singular value {low:.3e}")
    return np.clip(top, 0.0, None)


def concurrence(rho):
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``."""
    lam = wootters_lambdas(rho)
    c = lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3]
    c = np.clip(c, 0.0, 1.0) + 0.0
    return float(c) if c.ndim == 0 else c


def purity(rho):
    rho = np.asarray(rho)
    p = np.einsum("...ij,...ji->...", rho, rho)
    imag = np.max(np.abs(p.imag)) if p.size else 0.0
    if imag >= 1e-12:
        raise NotDensityMatrixError(f"Tr(rho^2) has imaginary part {imag:.3e}")
    p = p.real
    return float(p) if p.ndim == 0 else p


def mems_template(zeta: float, phase: complex = 1.0) -> np.ndarray:
    """Half |00>, half |11>, coherence ``zeta * phase`` between them."""
    t = np.zeros((4, 4), dtype=complex)
    t[0, 0] = t[3, 3] = 0.5
    t[0, 3] = zeta * phase
    t[3, 0] = np.conj(zeta * phase)
    return t


def mems_measure(rho):
    """Return ``(zeta, deviation)``.

    ``zeta = |rho_{00,11}|``; ``deviation`` is the Frobenius distance from
    ``rho`` to the template with the same corner coherence and populations
    (1/2, 0, 0, 1/2).  It vanishes exactly when ``rho`` has that form.
    """
    rho = np.asarray(rho, dtype=complex)
    corner = rho[..., 0, 3]
    zeta = np.abs(corner)
    diff = rho.copy()
    diff[..., 0, 0] -= 0.5
    diff[..., 3, 3] -= 0.5
    diff[..., 0, 3] = 0.0
    diff[..., 3, 0] = rho[..., 3, 0] - np.conj(corner)
    dev = np.sqrt(np.sum(np.abs(diff) ** 2, axis=(-2, -1)))
    if zeta.ndim == 0:
        return float(zeta), float(dev)
    return zeta, dev


def entanglement_record(rho) -> EntanglementRecord:
    zeta, dev = mems_measure(rho)
    return EntanglementRecord(
        concurrence=concurrence(rho),
        purity=purity(rho),
        zeta=zeta,
        mems_deviation=dev,
    )
