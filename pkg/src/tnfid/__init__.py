"""Subsystem (Uhlmann) fidelities between tensor-network states.

Matrix product states and binary tree tensor networks, the subsystem
fidelities natural to each (half-system cuts, contiguous windows, single-cut
tree branches, and the disjoint window variant), an exact brute-force oracle
for verification at small sizes, and the transverse-field Ising experiments
built on top of them.
"""

from .errors import (
    CapacityError,
    DegenerateStateError,
    DimensionError,
    LoadError,
    NotPositiveSemidefiniteError,
    NumericError,
    StateError,
    ValidationError,
)
from .fidelity import (
    FidelityReport,
    Region,
    disjoint_window_fidelity,
    half_system_fidelity,
    region_fidelity,
    window_fidelity,
)
from .mps import (
    EvolutionConfig,
    MatrixProductState,
    apply_two_site_gate,
    canonicalize,
    correlation_length,
    expect_local,
    overlap,
    product_mps,
    random_mps,
    tebd_evolve,
)
from .serialization import load_network, save_network
from .tensor import (
    NO_TRUNCATION,
    SvdResult,
    TruncationSpec,
    contract,
    hermitian_decompose,
    optimal_isometry,
    psd_factor,
    svd_truncate,
    trace_norm,
)
from .ttn import (
    Branch,
    TreeTensorNetwork,
    branch_environment,
    branch_fidelity,
    branch_regions,
    optimize_ground_state,
    random_ttn,
    ttn_energy,
)

__version__ = "0.1.0"
