"""
Unary-Encoded Sparse Preparation

The (n, r)-unary code splits an n-bit value into blocks of r bits (the
last block may be shorter) and stores each block one-hot over 2**r
qubits. Block j holds bits [j*r, j*r + r_j) and occupies the qubits
[offset_j, offset_j + 2**r_j). Printed codewords put the most significant
block first and offset 0 first inside each block.

synth_nr_unary writes sum_i alpha_i |code(q_i)> into the block register,
driven by a flag qubit that starts at |1> and ends at |0>.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core_model import Circuit, CircuitBuilder, SparseStateSpec, cx, g, g_gate_matrix, mcu, validate_spec, x
from .errors import BadBlockSize, BadWidth, DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NrCode:
    n: int
    r: int

    def __post_init__(self):
        if self.n < 1:
            raise BadWidth(f"code width must be positive, got {self.n}")
        if not 1 <= self.r <= self.n:
            raise BadBlockSize(f"block size {self.r} must lie in [1, {self.n}]")

    @property
    def block_count(self) -> int:
        return -(-self.n // self.r)

    @property
    def block_widths(self) -> tuple[int, ...]:
        widths = [self.r] * (self.block_count - 1)
        widths.append(self.n - self.r * (self.block_count - 1))
        return tuple(widths)

    @property
    def offsets(self) -> tuple[int, ...]:
        out = []
        total = 0
        for width in self.block_widths:
            out.append(total)
            total += 1 << width
        return tuple(out)

    @property
    def size(self) -> int:
        """Qubits in the block register."""
        return sum(1 << w for w in self.block_widths)

    @property
    def layout(self) -> tuple[range, ...]:
        """Qubit range of every block."""
        return tuple(range(o, o + (1 << w)) for o, w in zip(self.offsets, self.block_widths))

    def block_value(self, value: int, j: int) -> int:
        return (value >> (j * self.r)) & ((1 << self.block_widths[j]) - 1)

    def encode_positions(self, value: int) -> tuple[int, ...]:
        """The set qubit of every block for `value`."""
        if value < 0 or value >> self.n:
            raise BadWidth(f"value {value} does not fit in {self.n} bits")
        return tuple(o + self.block_value(value, j) for j, o in enumerate(self.offsets))

    def encode_index(self, value: int) -> int:
        """Basis index of the codeword inside the block register."""
        return sum(1 << p for p in self.encode_positions(value))


def nr_encode(value: int, n: int, r: int) -> str:
    code = NrCode(n, r)
    positions = set(code.encode_positions(value))
    blocks = []
    for block in code.layout:
        blocks.append(''.join('1' if q in positions else '0' for q in block))
    return ' '.join(reversed(blocks))


def nr_decode(bits: str, n: int, r: int) -> int:
    code = NrCode(n, r)
    fields = bits.split()
    if len(fields) == 1 and code.block_count > 1:
        flat = fields[0]
        fields = []
        for width in reversed(code.block_widths):
            fields.append(flat[:1 << width])
            flat = flat[1 << width:]
    expected = [1 << w for w in reversed(code.block_widths)]
    if [len(f) for f in fields] != expected:
        raise BadBlockSize(f"codeword {bits!r} does not have blocks of sizes {expected}")

    value = 0
    for j, block in enumerate(reversed(fields)):
        if block.count('1') != 1 or set(block) - {'0', '1'}:
            raise DomainError(f"block {block!r} is not one-hot")
        value |= block.index('1') << (j * r)
    return value


@dataclass(frozen=True)
class GGate:
    alpha: complex
    beta: float

    def __post_init__(self):
        if not 0.0 < self.beta <= 1.0 + 1e-9:
            raise DomainError(f"beta must lie in (0, 1], got {self.beta!r}")
        if abs(self.alpha) > self.beta * (1.0 + 1e-12) + 1e-15:
            raise DomainError(f"|alpha|={abs(self.alpha)!r} exceeds beta={self.beta!r}")

    def matrix(self) -> np.ndarray:
        return g_gate_matrix(complex(self.alpha), float(self.beta))


def g_matrix(gate: GGate) -> np.ndarray:
    """Unitary sending |1> to (alpha|0> + sqrt(beta^2 - |alpha|^2)|1>) / beta."""
    return gate.matrix()


def remaining_weights(amplitudes) -> np.ndarray:
    """beta_i = sqrt(sum_{k >= i} |alpha_k|^2), summed from the tail."""
    weights = np.abs(np.asarray(amplitudes, dtype=complex)) ** 2
    tails = np.cumsum(weights[::-1])[::-1]
    betas = np.sqrt(tails)
    if betas.size:
        betas[-1] = abs(amplitudes[-1])
    return betas


def _iteration(code: NrCode, flag: int, amp: complex, beta: float, q: int) -> list:
    positions = code.encode_positions(q)
    fan = [cx(flag, p) for p in positions]
    beta = max(beta, abs(amp))
    return fan + [mcu(g(amp, beta, flag), positions)] + fan


def synth_nr_unary(spec: SparseStateSpec, r: int, prepare_flag: bool = False) -> Circuit:
    """
    Unary-encoded preparation on code.size + 1 qubits, flag last.

    The flag is assumed to start at |1>; with `prepare_flag` an X gate is
    prepended so the circuit runs from |0...0>.
    """
    spec = validate_spec(spec, spec.n)
    code = NrCode(spec.n, r)
    flag = code.size
    builder = CircuitBuilder(code.size + 1)
    if prepare_flag:
        builder.append(x(flag))
    betas = remaining_weights(spec.amplitudes)
    for (amp, q), beta in zip(spec.entries, betas):
        if amp == 0:
            continue
        builder.extend(_iteration(code, flag, amp, float(beta), q))
    logger.debug("unary preparation n=%d r=%d d=%d: %d gates on %d qubits",
                 spec.n, r, spec.d, len(builder), code.size + 1)
    return builder.build(layout={'M': tuple(range(code.size)), 'flag': (flag,)})


def iteration_prefixes(spec: SparseStateSpec, r: int) -> Iterator[Circuit]:
    """Circuit from |0...0> up to the end of each loop iteration, flag prepared."""
    spec = validate_spec(spec, spec.n)
    code = NrCode(spec.n, r)
    flag = code.size
    betas = remaining_weights(spec.amplitudes)
    gates = [x(flag)]
    for (amp, q), beta in zip(spec.entries, betas):
        if amp != 0:
            gates.extend(_iteration(code, flag, amp, float(beta), q))
        yield Circuit(code.size + 1, tuple(gates))


def unary_target_state(spec: SparseStateSpec, r: int) -> np.ndarray:
    """Dense vector of sum_i alpha_i |code(q_i)> with the flag at |0>."""
    code = NrCode(spec.n, r)
    vec = np.zeros(1 << (code.size + 1), dtype=complex)
    for amp, q in spec.entries:
        vec[code.encode_index(q)] = amp
    return vec


def unary_partial_state(spec: SparseStateSpec, r: int, done: int) -> np.ndarray:
    """
    Expected state after `done` iterations: accepted codewords with the flag
    at |0>, plus the remaining weight on |1>_flag |0...0>.
    """
    code = NrCode(spec.n, r)
    vec = np.zeros(1 << (code.size + 1), dtype=complex)
    for amp, q in spec.entries[:done]:
        vec[code.encode_index(q)] = amp
    rest = math.fsum(abs(a) ** 2 for a, _ in spec.entries[done:])
    vec[1 << code.size] = math.sqrt(rest)
    return vec
