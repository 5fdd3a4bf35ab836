"""Two coupled Cooper-pair-box charge qubits under intrinsic decoherence."""
from .analysis import (
    EsdInterval,
    MemsEvent,
    SweepSummary,
    TimeGrid,
    TimeSeries,
    detect_esd_intervals,
    detect_mems_events,
    predict_mems_times,
    simulate_series,
    sweep,
)
from .circuit import (
    Capacitances,
    CircuitParams,
    build_hamiltonian,
    charging_offset,
    energies_from_capacitances,
    scaled_hamiltonian,
)
from .dynamics import (
    EvolutionPlan,
    basis_state,
    density_matrix,
    evolve_closed_form,
    evolve_integrator,
    evolve_kraus,
    populations,
)
from .entanglement import concurrence, mems_measure, purity
from .spectral import Spectrum, eig_hermitian, sqrt_psd

__version__ = "0.1.0"
