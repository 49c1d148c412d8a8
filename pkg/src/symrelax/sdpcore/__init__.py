"""SDP model, interior-point solver, SDPA I/O and SOS tools."""

from .moments import (
    MomentRelaxation,
    RelaxationOrderError,
    RelaxationResult,
    dense_relaxation,
    localizing_matrix,
    minimal_order,
    moment_matrix,
    pmi_localizing_blocks,
    riesz,
)
from .problem import LinearForm, PsdBlock, SdpError, SdpProblem, SdpSolution, lower_to_sdp
from .sdpa import export_sdpa, parse_sdpa, read_sdpa, write_sdpa
from .solver import SolverOptions, solve
from .sos import NOT_SOS_MESSAGE, GramCertificate, SosResult, is_sos

__all__ = [
    "GramCertificate",
    "LinearForm",
    "MomentRelaxation",
    "NOT_SOS_MESSAGE",
    "PsdBlock",
    "RelaxationOrderError",
    "RelaxationResult",
    "SdpError",
    "SdpProblem",
    "SdpSolution",
    "SolverOptions",
    "SosResult",
    "dense_relaxation",
    "export_sdpa",
    "is_sos",
    "localizing_matrix",
    "lower_to_sdp",
    "minimal_order",
    "moment_matrix",
    "parse_sdpa",
    "pmi_localizing_blocks",
    "read_sdpa",
    "riesz",
    "solve",
    "write_sdpa",
]
