"""Sparse quantum state preparation circuit synthesis."""

from .core_model import (
    Circuit,
    CircuitBuilder,
    Control,
    ExpandPolicy,
    Gate,
    GateCountReport,
    GateKind,
    SparseStateSpec,
    count_gates,
    validate_spec,
)
from .sqsp_ancilla import synth_auto, synth_with_ancilla
from .sqsp_core import synth_no_ancilla

__version__ = "1.0.0"

__all__ = [
    "Circuit",
    "CircuitBuilder",
    "Control",
    "ExpandPolicy",
    "Gate",
    "GateCountReport",
    "GateKind",
    "SparseStateSpec",
    "count_gates",
    "synth_auto",
    "synth_no_ancilla",
    "synth_with_ancilla",
    "validate_spec",
]
