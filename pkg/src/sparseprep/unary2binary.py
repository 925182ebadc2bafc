"""
Unary to Binary Conversion

Fixed classical circuit taking |e_i>|0^w> to |0^(2^w)>|i> for every
0 <= i < 2**w. Row i copies the set bits of i into the binary register
under unary qubit i, then clears unary qubit i conditioned on the binary
register reading i. Row 0 runs last: its all-negative condition would
otherwise fire on every input whose binary register is still empty.

Inputs whose unary register is not one-hot are outside the contract.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from .core_model import Circuit, Control, Gate, controlled_x, cx
from .errors import BadBlockSize, BadWidth, OverlappingQubits

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConversionLayout:
    w: int
    unary_reg: tuple[int, ...]
    binary_reg: tuple[int, ...]

    def __post_init__(self):
        if self.w < 1:
            raise BadBlockSize(f"conversion width must be at least 1, got {self.w}")
        object.__setattr__(self, 'unary_reg', tuple(int(q) for q in self.unary_reg))
        object.__setattr__(self, 'binary_reg', tuple(int(q) for q in self.binary_reg))
        if len(self.unary_reg) != 1 << self.w or len(self.binary_reg) != self.w:
            raise BadBlockSize(f"w={self.w} needs {1 << self.w} unary and {self.w} binary qubits")
        qubits = self.qubits
        if len(set(qubits)) != len(qubits):
            raise OverlappingQubits(f"unary and binary registers overlap: {qubits}")

    @classmethod
    def default(cls, w: int) -> 'ConversionLayout':
        """Unary register on qubits [0, 2**w), binary register right after."""
        if w < 1:
            raise BadBlockSize(f"conversion width must be at least 1, got {w}")
        size = 1 << w
        return cls(w, tuple(range(size)), tuple(range(size, size + w)))

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.unary_reg + self.binary_reg


def _row(layout: ConversionLayout, i: int) -> list[Gate]:
    u = layout.unary_reg[i]
    gates = [cx(u, layout.binary_reg[b]) for b in range(layout.w) if (i >> b) & 1]
    pattern = [Control(layout.binary_reg[b], bool((i >> b) & 1)) for b in range(layout.w)]
    gates.append(controlled_x(pattern, u))
    return gates


def conversion_gates(layout: ConversionLayout) -> list[Gate]:
    order = list(range(1, 1 << layout.w)) + [0]
    return [gate for i in order for gate in _row(layout, i)]


def synth_unary_to_binary(w: int, layout: Optional[ConversionLayout] = None,
                          free_qubits: Sequence[int] = (), width: Optional[int] = None) -> Circuit:
    """
    Conversion circuit. `free_qubits` are extra qubits the MCX gates may
    borrow at expansion; they widen the circuit but are never touched here.
    """
    layout = ConversionLayout.default(w) if layout is None else layout
    if layout.w != w:
        raise BadBlockSize(f"layout is for w={layout.w}, not {w}")
    free = tuple(int(q) for q in free_qubits)
    if set(free) & set(layout.qubits):
        raise OverlappingQubits(f"free qubits {free} overlap the conversion registers")
    needed = max(layout.qubits + free) + 1
    width = needed if width is None else width
    if width < needed:
        raise BadWidth(f"width {width} cannot hold qubit {needed - 1}")
    gates = conversion_gates(layout)
    logger.debug("unary to binary conversion w=%d: %d gates", w, len(gates))
    return Circuit(width, tuple(gates), layout={'unary': layout.unary_reg, 'binary': layout.binary_reg})
