"""Stabilizer codes, fault-tolerant gadgets and noise simulation for qubits."""

from importlib import resources

from .codes import (
    BoundReport,
    bound_report,
    concatenate,
    css_code,
    encoded_css_basis_description,
    five_qubit_code,
    gv_rate,
    hamming_code,
    hamming_rate,
    read_pcm,
    repetition_code,
    shor_code,
    singleton_check,
    steane_code,
    write_pcm,
)
from .pauli import PauliOperator, commutes, format_pauli, multiply, parse_pauli, weight
from .stabilizer import (
    Cap,
    CodeValidationError,
    StabilizerCode,
    build_decoder,
    decode,
    distance,
    in_normalizer,
    in_stabilizer,
    read_stab,
    syndrome,
    validate,
    write_stab,
)

__version__ = "0.1.0"


def data_path(name: str):
    """Path of a bundled fixture (five_qubit.stab, steane.stab, hamming.pcm)."""
    return resources.files(__name__) / "data" / name


__all__ = [
    "BoundReport",
    "Cap",
    "CodeValidationError",
    "PauliOperator",
    "StabilizerCode",
    "bound_report",
    "build_decoder",
    "commutes",
    "concatenate",
    "css_code",
    "data_path",
    "decode",
    "distance",
    "encoded_css_basis_description",
    "five_qubit_code",
    "format_pauli",
    "gv_rate",
    "hamming_code",
    "hamming_rate",
    "in_normalizer",
    "in_stabilizer",
    "multiply",
    "parse_pauli",
    "read_pcm",
    "read_stab",
    "repetition_code",
    "shor_code",
    "singleton_check",
    "steane_code",
    "syndrome",
    "validate",
    "weight",
    "write_pcm",
    "write_stab",
]
