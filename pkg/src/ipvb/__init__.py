"""Recovery of nonnegative sparse signals sensed through binary LDPC matrices.

Three iterative message-passing decoders over the sensing graph (interval
passing, node-based verification, and their combination), matrix and
signal tooling, a Monte Carlo benchmark harness, and a brute-force
minimum-support oracle for tiny instances.
"""

from .backend import available_backends, backend_name, set_backend
from .decoders import (
    DecodeError,
    DecodeResult,
    IpMessages,
    VerificationState,
    decode,
    decode_ip,
    decode_vb,
    decode_vbip,
    ip_check_update,
    ip_variable_update,
    vb_check_update,
    vb_variable_update,
)
from .experiment import (
    SweepConfig,
    SweepPoint,
    emit_results,
    run_trial,
    sweep,
)
from .graph import (
    AlistError,
    GirthError,
    GraphError,
    SensingMatrix,
    count_4cycles,
    expand_qc,
    generate_regular,
    load_alist,
    measure,
    parse_alist,
    save_alist,
    write_alist,
)
from .oracle import SparsestSolution, brute_force_sparsest
from .signals import (
    SignalError,
    SparseSignal,
    generate_signal,
    reconstruction_success,
)

__version__ = "0.1.0"

__all__ = [
    "AlistError",
    "DecodeError",
    "DecodeResult",
    "GirthError",
    "GraphError",
    "IpMessages",
    "SensingMatrix",
    "SignalError",
    "SparseSignal",
    "SparsestSolution",
    "SweepConfig",
    "SweepPoint",
    "VerificationState",
    "available_backends",
    "backend_name",
    "brute_force_sparsest",
    "count_4cycles",
    "decode",
    "decode_ip",
    "decode_vb",
    "decode_vbip",
    "emit_results",
    "expand_qc",
    "generate_regular",
    "generate_signal",
    "ip_check_update",
    "ip_variable_update",
    "load_alist",
    "measure",
    "parse_alist",
    "reconstruction_success",
    "run_trial",
    "save_alist",
    "set_backend",
    "sweep",
    "vb_check_update",
    "vb_variable_update",
    "write_alist",
]
