"""Local-realism tests for two-setting correlation experiments on N qubits.

Evaluates the single general Bell inequality (equivalent to the whole
family of sign-function inequalities), builds explicit local hidden-variable
models when it holds, and decides violation directly from a state's
correlation tensor.
"""

from genbell.bellcore import (
    CorrelationTable,
    SignFunction,
    enumerate_sign_functions,
    family_lhs,
    mabk_sign_function,
    zb_lhs,
)
from genbell.corrtensor import (
    CorrelationTensor,
    LocalFrame,
    MeasurementSettings,
    compute_tensor,
    correlation_table,
    quantum_correlation,
    rotate_frame,
)
from genbell.criterion import (
    CVector,
    ViolationCertificate,
    horodecki_2qubit,
    max_tmod,
    sum_squares_max,
    tmod_value,
    werner_threshold,
)
from genbell.kernels import BACKEND
from genbell.lhvmodel import (
    DeterministicStrategy,
    LhvModel,
    NoLocalModelError,
    build_lhv,
    lhv_exists_bruteforce,
    reconstruct,
)
from genbell.optimizer import (
    BlockObjective,
    OptimizeOptions,
    maximize_quantum_value,
    multistart_maximize,
)
from genbell.qstate import (
    DensityMatrix,
    InvalidStateError,
    PureState,
    make_ghz,
    make_pure,
    mix_with_noise,
    validate,
    werner,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BlockObjective", "CVector", "CorrelationTable", "CorrelationTensor",
    "DensityMatrix", "DeterministicStrategy", "InvalidStateError", "LhvModel",
    "LocalFrame", "MeasurementSettings", "NoLocalModelError", "OptimizeOptions",
    "PureState", "SignFunction", "ViolationCertificate", "build_lhv", "compute_tensor",
    "correlation_table", "enumerate_sign_functions", "family_lhs", "horodecki_2qubit",
    "lhv_exists_bruteforce", "mabk_sign_function", "make_ghz", "make_pure",
    "max_tmod", "maximize_quantum_value", "mix_with_noise", "multistart_maximize",
    "quantum_correlation", "reconstruct", "rotate_frame", "sum_squares_max",
    "tmod_value", "validate", "werner", "werner_threshold", "zb_lhs",
]
