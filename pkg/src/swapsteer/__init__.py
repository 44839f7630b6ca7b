"""Swap-steering witnesses for bipartite entangled states.

Construction and evaluation of no-input network-steering witnesses (the
partial-transpose, realignment, and tomographic families), Born-rule
simulation of the two-source scenario, and numerical certification of the
hidden-state bounds.
"""

__version__ = "0.1.0"

from .criteria import (
    AlignedCoefficients,
    CcnReport,
    PptReport,
    aligned_state,
    ccn_test,
    npt_entanglement_witness,
    ppt_test,
    verify_ccn_aligned,
)
from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    PreconditionError,
    ResourceGuardError,
    SwapSteerError,
    ValidationError,
)
from .network import (
    Scenario,
    correlations,
    ideal_strategy,
    permute_to_scenario,
    separable_source_check,
    swap_postselect,
)
from .qlinalg import (
    HermEig,
    OperatorSchmidt,
    SchmidtResult,
    hermitian_eig,
    hw_basis,
    hw_expand,
    hw_reconstruct,
    kron,
    operator_schmidt,
    partial_trace,
    partial_transpose,
    schmidt,
    svd,
)
from .sohs import (
    BoundResult,
    ProductStrategy,
    ccn_saturating_value,
    grid_bound,
    seesaw_bound,
    sohs_value,
)
from .states import (
    DensityMatrix,
    Ket,
    Povm,
    bell_basis,
    gen_pauli_x,
    gen_pauli_z,
    isotropic,
    load_state,
    max_entangled,
    random_density,
    random_pure,
    random_separable,
    random_unitary,
    save_state,
    werner_qubit,
)
from .witnesses import (
    CorrelationTable,
    WitnessSpec,
    build_ccn_witness,
    build_npt_witness,
    build_universal_witness,
    eval_witness,
    load_spec,
    save_spec,
)
