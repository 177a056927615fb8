from .matrix import (
    CheckGraph,
    CodeError,
    ParityCheckMatrix,
    build_check_graph,
    compute_layers,
)
from .alist import AlistParseError, parse_alist
from .qc import QcDescription, QcValidationError, expand_qc, parse_qc, scale_qc
from .randomgen import random_code
from .standards import available_codes, load_code

__all__ = [
    "AlistParseError",
    "CheckGraph",
    "CodeError",
    "ParityCheckMatrix",
    "QcDescription",
    "QcValidationError",
    "available_codes",
    "build_check_graph",
    "compute_layers",
    "expand_qc",
    "load_code",
    "parse_alist",
    "parse_qc",
    "random_code",
    "scale_qc",
]
