"""scatchan: scattering-network assembly and the quantum channels it induces.

Compose local scattering matrices of a quantum graph into the global one
via the Redheffer star product, derive the port-to-port state-dependent
erasure channel, and bound its quantum capacity.
"""

from .capacity import (
    CapacityBounds,
    capacity_bounds,
    check_data_processing,
    detect_superactivation,
    erasure_capacity,
    singular_probabilities,
)
from .channel import ErasureChannel, transmission_operator
from .composer import (
    Wiring,
    kernel_decoupling_check,
    loop_matrix,
    pad_to_homogeneous,
    star,
    star_via_series,
)
from .errors import (
    ConversionUnavailableError,
    DecouplingViolationError,
    InternalConsistencyError,
    InvalidInputError,
    NonUnitaryError,
    ScatchanError,
    SeriesDivergentError,
)
from .graph import QuantumGraph, contract, validate
from .physics import (
    BarrierParams,
    SpinChannelPair,
    barrier_smatrix,
    double_barrier_m,
    energy_sweep,
    loss_smatrix,
    single_barrier_m,
    translated_barrier,
)
from .smatrix import (
    PortSpec,
    ScatteringMatrix,
    TransferMatrix,
    new_scattering,
    s_to_t,
    t_to_s,
)

__version__ = "0.1.0"

__all__ = [
    "BarrierParams",
    "CapacityBounds",
    "ConversionUnavailableError",
    "DecouplingViolationError",
    "ErasureChannel",
    "InternalConsistencyError",
    "InvalidInputError",
    "NonUnitaryError",
    "PortSpec",
    "QuantumGraph",
    "ScatchanError",
    "ScatteringMatrix",
    "SeriesDivergentError",
    "SpinChannelPair",
    "TransferMatrix",
    "Wiring",
    "barrier_smatrix",
    "capacity_bounds",
    "check_data_processing",
    "contract",
    "detect_superactivation",
    "double_barrier_m",
    "energy_sweep",
    "erasure_capacity",
    "kernel_decoupling_check",
    "loop_matrix",
    "loss_smatrix",
    "new_scattering",
    "pad_to_homogeneous",
    "s_to_t",
    "single_barrier_m",
    "singular_probabilities",
    "star",
    "star_via_series",
    "t_to_s",
    "transmission_operator",
    "translated_barrier",
    "validate",
]
