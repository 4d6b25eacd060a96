"""Coherent-spin-state projector bases: Gram diagnostics, reconstruction, repair."""

from .constellation import (
    Constellation,
    FormatError,
    distance,
    fibonacci_constellation,
    random_constellation,
    regular_hedgehog,
    replace_vector,
)
from .flow import (
    FlowState,
    RepairFailed,
    RepairReport,
    grad_hamiltonian,
    hamiltonian,
    integrate_flow,
    repair,
)
from .gram import FrameDiagnostics, GramMatrix, SingularGram, diagnostics, gram, gram_via_traces, solve
from .spin import (
    SpinLabel,
    coherent_state,
    overlap_probability,
    projector,
    q_symbol,
    spin_matrices,
    unit_vector,
)
from .tomography import QSample, dual_frame, reconstruct, round_trip_error, sample_q

__version__ = "0.1.0"
