"""Small dense complex matrix kernel.

Hermitian eigendecomposition by cyclic complex Jacobi rotations, a
positive-semidefinite square root built on it, and a handful of thin
arithmetic helpers.  Every routine accepts a single ``(n, n)`` matrix or a
stack ``(..., n, n)``; stacks are processed element-wise so the result for
one matrix never depends on what else is in the batch.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotConvergedError, NotHermitianError, NotPSDError


@dataclass(frozen=True)
class Tolerances:
    hermitian_reject: float = 1e-9
    jacobi_rel: float = 1e-13
    jacobi_max_sweeps: int = 100
    psd_clamp: float = 1e-10


TOL = Tolerances()


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def hermitian(a, tol: float = TOL.hermitian_reject) -> np.ndarray:
    """Validate ``a`` as Hermitian and return its symmetrized copy."""
    a = np.asarray(a, dtype=complex)
    if a.shape[-1] != a.shape[-2]:
        raise NotHermitianError(f"matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotHermitianError("matrix has non-finite entries")
    ah = adjoint(a)
    err = np.max(np.abs(a - ah)) if a.size else 0.0
    if err > tol:
        raise NotHermitianError(f"matrix deviates from Hermitian by {err:.3e}")
    return 0.5 * (a + ah)


def _rotate(a, v, p, q, thresh, live):
    apq = a[:, p, q]
    b = np.abs(apq)
    active = live & (b > thresh)
    if not active.any():
        return
    safe_b = np.where(active, b, 1.0)
    phase = np.where(active, apq / safe_b, 1.0)
    zeta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe_b)
    sign = np.where(zeta >= 0, 1.0, -1.0)
    t = sign / (np.abs(zeta) + np.hypot(1.0, zeta))
    c = 1.0 / np.hypot(1.0, t)
    s = t * c
    c = np.where(active, c, 1.0)
    s = np.where(active, s, 0.0)
    # J = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on the (p, q) plane; A <- J^H A J.
    sp = (s * phase)[:, None]
    sm = (s * phase.conj())[:, None]
    cc = c[:, None]
    col_p = a[:, :, p].copy()
    col_q = a[:, :, q].copy()
    a[:, :, p] = cc * col_p - sm * col_q
    a[:, :, q] = sp * col_p + cc * col_q
    row_p = a[:, p, :].copy()
    row_q = a[:, q, :].copy()
    a[:, p, :] = cc * row_p - sp * row_q
    a[:, q, :] = sm * row_p + cc * row_q
    a[active, p, q] = 0.0
    a[active, q, p] = 0.0
    a[:, p, p] = a[:, p, p].real
    a[:, q, q] = a[:, q, q].real
    vp = v[:, :, p].copy()
    vq = v[:, :, q].copy()
    v[:, :, p] = cc * vp - sm * vq
    v[:, :, q] = sp * vp + cc * vq


def _off_norm(a):
    n = a.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sqrt(np.sum(np.abs(a[:, mask]) ** 2, axis=-1))


def eigh(a, tol: Tolerances = TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of Hermitian ``a`` (single matrix or stack).

    Returns ``(w, u)`` with ``w`` ascending and the columns of ``u`` the
    matching orthonormal eigenvectors.  In each eigenvector the entry of
    largest magnitude (lowest index on exact ties) is real and positive.
    """
    a = hermitian(a, tol.hermitian_reject)
    shape = a.shape
    n = shape[-1]
    work = a.reshape(-1, n, n).copy()
    batch = work.shape[0]
    v = np.broadcast_to(np.eye(n, dtype=complex), (batch, n, n)).copy()

    norm = np.sqrt(np.sum(np.abs(work) ** 2, axis=(-2, -1)))
    target = tol.jacobi_rel * norm
    # Per-element skip threshold: if every element is below it the off-norm
    # is already below target, so skipped matrices count as converged.
    thresh = target / n
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    for _ in range(tol.jacobi_max_sweeps):
        # converged matrices are frozen so batching never changes a result
        live = _off_norm(work) > target
        if not live.any():
            break
        for p, q in pairs:
            _rotate(work, v, p, q, thresh, live)
    else:
        if not np.all(_off_norm(work) <= target):
            raise NotConvergedError(
                f"Jacobi did not converge in {tol.jacobi_max_sweeps} sweeps"
            )

    w = np.real(np.diagonal(work, axis1=-2, axis2=-1)).copy()
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)

    # Phase convention: largest-magnitude entry of each column real positive.
    idx = np.argmax(np.abs(v), axis=-2)
    pivot = np.take_along_axis(v, idx[:, None, :], axis=-2)[:, 0, :]
    mag = np.abs(pivot)
    v = v * (pivot.conj() / np.where(mag > 0, mag, 1.0))[:, None, :]
    np.put_along_axis(v, idx[:, None, :], mag[:, None, :].astype(complex), axis=-2)

    return w.reshape(shape[:-1]), v.reshape(shape)


def eig_hermitian(h, tol: Tolerances = TOL) -> Spectrum:
    w, u = eigh(h, tol)
    return Spectrum(w, u)


def sqrt_psd(m, tol: Tolerances = TOL) -> np.ndarray:
    """Principal square root of a positive-semidefinite Hermitian matrix.

    Eigenvalues down to ``-tol.psd_clamp`` are treated as roundoff and
    clamped to zero; anything more negative raises :class:`NotPSDError`.
    """
    w, u = eigh(m, tol)
    low = np.min(w) if w.size else 0.0
    if low < -tol.psd_clamp:
        raise NotPSDError(f"matrix has eigenvalue {low:.3e} < -{tol.psd_clamp:g}")
    root = np.sqrt(np.clip(w, 0.0, None))
    r = (u * root[..., None, :]) @ adjoint(u)
    return 0.5 * (r + adjoint(r))


def add(a, b):
    return np.asarray(a) + np.asarray(b)


def scale(a, c):
    return c * np.asarray(a)


def multiply(a, b):
    return np.asarray(a) @ np.asarray(b)


def adjoint(a):
    return np.conj(np.swapaxes(np.asarray(a), -1, -2))


def trace(a):
    return np.trace(np.asarray(a), axis1=-2, axis2=-1)


def frobenius_distance(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))
