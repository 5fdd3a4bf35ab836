"""Two capacitively coupled Cooper pair boxes in the four-level charge basis.

Basis order is fixed to (|00>, |01>, |10>, |11>) with |n1 n2> labelling the
number of excess Cooper pairs on box 1 and box 2.  Every other module in the
package relies on this order.

Energies are in micro-electronvolts.  Time is the dimensionless product
``time_scale * t`` (hbar = 1), so the Hamiltonian fed to the evolution
engines is ``build_hamiltonian(p) / p.time_scale``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .errors import DegenerateDenominatorError, InvalidParameterError

BASIS_LABELS = ("00", "01", "10", "11")
BASIS_CHARGES = ((0, 0), (0, 1), (1, 0), (1, 1))

# 4e^2 expressed in ueV * aF, so that 4e^2 / C[aF] gives ueV.
ELEMENTARY_CHARGE = 1.602176634e-19
FOUR_E2_UEV_AF = 4.0 * ELEMENTARY_CHARGE * 1e24


@dataclass(frozen=True)
class CircuitParams:
    """Physical knobs of the coupled-box circuit.

    Defaults reproduce the symmetric, weakly coupled configuration
    (E_J1 = E_J2 = 30, E_m = 6) at the co-degeneracy point n_g = 0.5.
    The charging energies only enter through an identity shift there, so
    their value does not change any observable.

    ``gamma`` is measured in units of ``1 / time_scale``.
    """

    ej1: float = 30.0
    ej2: float = 30.0
    em: float = 6.0
    ec1: float = 100.0
    ec2: float = 100.0
    ng1: float = 0.5
    ng2: float = 0.5
    gamma: float = 0.0
    time_scale: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise InvalidParameterError(f"{f.name} must be finite, got {value!r}")
        for name in ("ej1", "ej2", "em", "gamma"):
            if getattr(self, name) < 0:
                raise InvalidParameterError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("ec1", "ec2", "time_scale"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in ("ng1", "ng2"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise InvalidParameterError(f"{name} must lie in [0, 1], got {getattr(self, name)}")

    def with_(self, **changes) -> "CircuitParams":
        return replace(self, **changes)

    def swapped(self) -> "CircuitParams":
        """Same circuit with the two boxes relabelled."""
        return replace(
            self,
            ej1=self.ej2, ej2=self.ej1,
            ec1=self.ec2, ec2=self.ec1,
            ng1=self.ng2, ng2=self.ng1,
        )


@dataclass(frozen=True)
class Capacitances:
    """Total box capacitances and the coupling capacitance (aF).

    ``charge_unit`` is the 4e^2 prefactor; the default makes the derived
    energies come out in ueV.
    """

    csum1: float
    csum2: float
    cm: float
    charge_unit: float = FOUR_E2_UEV_AF

    def __post_init__(self):
        if not (self.csum1 > 0 and self.csum2 > 0):
            raise InvalidParameterError("total capacitances must be > 0")
        if self.cm < 0:
            raise InvalidParameterError("coupling capacitance must be >= 0")


def energies_from_capacitances(c: Capacitances) -> tuple[float, float, float]:
    """Return ``(ec1, ec2, em)`` for the given capacitance network."""
    det = c.csum1 * c.csum2 - c.cm ** 2
    if det <= 0:
        raise DegenerateDenominatorError(
            f"csum1*csum2 - cm^2 = {det} must be positive"
        )
    q = c.charge_unit
    ec1 = q * c.csum2 / (2.0 * det)
    ec2 = q * c.csum1 / (2.0 * det)
    em = q * c.cm / det
    return ec1, ec2, em


def charging_offset(p: CircuitParams, n1: int, n2: int) -> float:
    d1 = p.ng1 - n1
    d2 = p.ng2 - n2
    return p.ec1 * d1 * d1 + p.ec2 * d2 * d2 + p.em * d1 * d2


def build_hamiltonian(p: CircuitParams) -> np.ndarray:
    """Real-symmetric 4x4 Hamiltonian in ueV.

    Diagonal: electrostatic energy of each charge configuration.  Josephson
    tunnelling of box 1 couples states differing in n1 (|00>-|10>,
    |01>-|11>), tunnelling of box 2 couples states differing in n2.
    """
    h = np.zeros((4, 4), dtype=complex)
    for i, (n1, n2) in enumerate(BASIS_CHARGES):
        h[i, i] = charging_offset(p, n1, n2)
    for i, (a1, a2) in enumerate(BASIS_CHARGES):
        for j, (b1, b2) in enumerate(BASIS_CHARGES):
            if a2 == b2 and a1 != b1:
                h[i, j] = -p.ej1 / 2.0
            elif a1 == b1 and a2 != b2:
                h[i, j] = -p.ej2 / 2.0
    return h


def scaled_hamiltonian(p: CircuitParams) -> np.ndarray:
    """Hamiltonian in units of ``time_scale``, the generator of lambda*t evolution."""
    return build_hamiltonian(p) / p.time_scale
