"""Spectral gaps and design-error measures of random-circuit second-moment operators."""

from .arch import (
    Architecture,
    ArchitectureError,
    Gate,
    brickwork1d,
    brickwork3,
    build_named,
    builder_names,
    censor,
    cyclic_shift,
    hide_seek_C,
    hide_seek_Cprime,
    parse,
    path_sequence,
    serialize,
)
from .channel import (
    ChannelHandle,
    MultErrorResult,
    apply_haar_twirl,
    apply_moment,
    lemma2_check,
    mult_error,
)
from .closedform import brickwork3_lambda, depth_threshold, lambda_C, lambda_Cprime
from .graphs import SiteGraph, graph_gap, graph_operator, lollipop, path
from .pigment import PigmentState, mix
from .search import SearchConfig, Violation, sample_architecture, scan
from .transfer import (
    SpectrumResult,
    TransferOperator,
    circuit_spectrum,
    dense_moment_oracle,
    gate_transfer,
    gram_entry,
)

__version__ = "0.1.0"

__all__ = [
    "Architecture",
    "ArchitectureError",
    "ChannelHandle",
    "Gate",
    "MultErrorResult",
    "PigmentState",
    "SearchConfig",
    "SiteGraph",
    "SpectrumResult",
    "TransferOperator",
    "Violation",
    "apply_haar_twirl",
    "apply_moment",
    "brickwork1d",
    "brickwork3",
    "brickwork3_lambda",
    "build_named",
    "builder_names",
    "censor",
    "circuit_spectrum",
    "cyclic_shift",
    "dense_moment_oracle",
    "depth_threshold",
    "gate_transfer",
    "graph_gap",
    "graph_operator",
    "gram_entry",
    "hide_seek_C",
    "hide_seek_Cprime",
    "lambda_C",
    "lambda_Cprime",
    "lemma2_check",
    "lollipop",
    "mix",
    "mult_error",
    "parse",
    "path",
    "path_sequence",
    "sample_architecture",
    "scan",
    "serialize",
]
