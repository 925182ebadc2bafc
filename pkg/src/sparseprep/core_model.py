"""
Core Model

Shared domain types: sparse state specifications, gates, circuits and
gate-count accounting.

Qubit 0 is the least significant bit of every basis index. Bitstrings in
files and examples are written most significant bit first and converted on
entry.
"""

import cmath
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np

from .constants import AMPLITUDE_TOL, TOFFOLI_CNOT, TOFFOLI_SINGLE
from .errors import (
    BadWidth,
    CircuitError,
    DomainError,
    DuplicateBasis,
    NotClassical,
    NotNormalized,
    OverlappingQubits,
    WidthMismatch,
)


# ---------------------------------------------------------------------------
# State specifications
# ---------------------------------------------------------------------------

def parse_bitstring(q: Union[str, int], n: int) -> int:
    """Convert an MSB-first bitstring (or an int) to a basis index."""
    if isinstance(q, str):
        bits = q.replace(' ', '').replace('_', '')
        if len(bits) != n or any(ch not in '01' for ch in bits):
            raise BadWidth(f"basis string {q!r} is not a {n}-bit string")
        return int(bits, 2)
    if isinstance(q, (int, np.integer)) and not isinstance(q, bool):
        value = int(q)
        if value < 0 or value >> n:
            raise BadWidth(f"basis index {value} does not fit in {n} bits")
        return value
    raise BadWidth(f"unsupported basis label {q!r}")


def format_bitstring(q: int, n: int) -> str:
    """MSB-first bitstring of a basis index."""
    return format(q, f'0{n}b') if n else ''


@dataclass(frozen=True)
class SparseStateSpec:
    """A validated d-sparse n-qubit state: pairs (amplitude, basis index)."""
    n: int
    entries: tuple[tuple[complex, int], ...]

    @property
    def d(self) -> int:
        return len(self.entries)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([a for a, _ in self.entries], dtype=complex)

    @property
    def points(self) -> tuple[int, ...]:
        return tuple(q for _, q in self.entries)

    def sorted_entries(self) -> list[tuple[complex, int]]:
        return sorted(self.entries, key=lambda e: e[1])

    def to_statevector(self, width: Optional[int] = None) -> np.ndarray:
        """Dense amplitude vector, optionally embedded in a wider register."""
        width = self.n if width is None else width
        if width < self.n:
            raise WidthMismatch(f"cannot embed {self.n} qubits into {width}")
        vec = np.zeros(1 << width, dtype=complex)
        for amp, q in self.entries:
            vec[q] = amp
        return vec

    @classmethod
    def from_pairs(cls, pairs, n: int) -> 'SparseStateSpec':
        return validate_spec(pairs, n)


def validate_spec(raw_entries, n: int) -> SparseStateSpec:
    """Validate (amplitude, q) pairs; q is an MSB-first bitstring or an index."""
    if isinstance(raw_entries, SparseStateSpec):
        raw_entries = raw_entries.entries
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise BadWidth(f"qubit count must be a positive integer, got {n!r}")
    n = int(n)

    entries = []
    seen = set()
    for raw in raw_entries:
        try:
            amp, q = raw
        except (TypeError, ValueError):
            raise BadWidth(f"entry {raw!r} is not an (amplitude, basis) pair")
        index = parse_bitstring(q, n)
        if index in seen:
            raise DuplicateBasis(f"basis state {format_bitstring(index, n)} appears twice")
        seen.add(index)
        entries.append((complex(amp), index))

    if not entries:
        raise BadWidth("a state specification needs at least one entry")

    norm = math.fsum(abs(a) ** 2 for a, _ in entries)
    if abs(norm - 1.0) > AMPLITUDE_TOL:
        raise NotNormalized(f"sum of squared amplitudes is {norm!r}, expected 1")

    return SparseStateSpec(n, tuple(entries))


# ---------------------------------------------------------------------------
# Gates
# ---------------------------------------------------------------------------

class GateKind(Enum):
    X = 'x'
    CNOT = 'cx'
    SWAP = 'swap'
    RY = 'ry'
    RZ = 'rz'
    RX = 'rx'
    G = 'g'
    MCX = 'mcx'
    MCU = 'mcu'


SINGLE_QUBIT_KINDS = frozenset({GateKind.X, GateKind.RY, GateKind.RZ, GateKind.RX, GateKind.G})
CLASSICAL_KINDS = frozenset({GateKind.X, GateKind.CNOT, GateKind.SWAP, GateKind.MCX})
ROTATION_KINDS = frozenset({GateKind.RY, GateKind.RZ, GateKind.RX})


class Control(NamedTuple):
    """A control qubit; negative controls fire on |0>."""
    qubit: int
    positive: bool = True


def as_controls(controls: Iterable[Union[Control, int]]) -> tuple[Control, ...]:
    out = []
    for c in controls:
        if isinstance(c, Control):
            out.append(c)
        else:
            out.append(Control(int(c), True))
    return tuple(out)


def g_gate_matrix(alpha: complex, beta: float) -> np.ndarray:
    """(1/beta) [[s, alpha], [-conj(alpha), s]] with s = sqrt(beta^2 - |alpha|^2)."""
    s = math.sqrt(max(beta * beta - abs(alpha) ** 2, 0.0))
    return np.array([[s, alpha], [-np.conj(alpha), s]], dtype=complex) / beta


def rotation_matrix(kind: GateKind, theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind is GateKind.RZ:
        return np.array([[cmath.exp(-0.5j * theta), 0], [0, cmath.exp(0.5j * theta)]], dtype=complex)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    raise CircuitError(f"{kind.name} is not a rotation")


_X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    """
    One gate. SWAP has two targets, everything else one.

    params: rotation angle for Ry/Rz/Rx; (re(alpha), im(alpha), beta) for G.
    base: the single-qubit gate an MCU applies (same target).
    """
    kind: GateKind
    targets: tuple[int, ...]
    controls: tuple[Control, ...] = ()
    params: tuple[float, ...] = ()
    base: Optional['Gate'] = None

    def __post_init__(self):
        expected = 2 if self.kind is GateKind.SWAP else 1
        if len(self.targets) != expected:
            raise CircuitError(f"{self.kind.name} takes {expected} target(s), got {self.targets}")
        qubits = list(self.targets) + [c.qubit for c in self.controls]
        if any(q < 0 for q in qubits):
            raise CircuitError(f"negative qubit index in {self.kind.name} gate")
        if len(set(qubits)) != len(qubits):
            raise OverlappingQubits(f"{self.kind.name} gate reuses a qubit: {qubits}")

        if self.kind in SINGLE_QUBIT_KINDS or self.kind is GateKind.SWAP:
            if self.controls:
                raise CircuitError(f"{self.kind.name} takes no controls")
        if self.kind is GateKind.CNOT:
            if len(self.controls) != 1 or not self.controls[0].positive:
                raise CircuitError("CNOT takes exactly one positive control")
        if self.kind in ROTATION_KINDS and len(self.params) != 1:
            raise CircuitError(f"{self.kind.name} takes one angle")
        if self.kind is GateKind.G:
            if len(self.params) != 3:
                raise CircuitError("G takes (re(alpha), im(alpha), beta)")
            alpha, beta = complex(self.params[0], self.params[1]), self.params[2]
            if not 0.0 < beta <= 1.0 + 1e-9:
                raise DomainError(f"G beta must lie in (0, 1], got {beta!r}")
            if abs(alpha) > beta * (1.0 + 1e-12) + 1e-15:
                raise DomainError(f"G needs |alpha| <= beta, got |alpha|={abs(alpha)!r} beta={beta!r}")
        if self.kind is GateKind.MCU:
            if self.base is None or self.base.kind not in SINGLE_QUBIT_KINDS:
                raise CircuitError("MCU needs a single-qubit base gate")
            if self.base.targets != self.targets:
                raise CircuitError("MCU base must act on the MCU target")
        elif self.base is not None:
            raise CircuitError(f"{self.kind.name} takes no base gate")

    @property
    def target(self) -> int:
        return self.targets[0]

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(c.qubit for c in self.controls) + self.targets

    @property
    def is_classical(self) -> bool:
        return self.kind in CLASSICAL_KINDS

    @property
    def alpha(self) -> complex:
        return complex(self.params[0], self.params[1])

    @property
    def beta(self) -> float:
        return self.params[2]

    def matrix(self) -> np.ndarray:
        """2x2 matrix of a single-qubit gate (the applied unitary for MCU)."""
        if self.kind is GateKind.MCU:
            return self.base.matrix()
        if self.kind in (GateKind.X, GateKind.CNOT, GateKind.MCX):
            return _X_MATRIX.copy()
        if self.kind in ROTATION_KINDS:
            return rotation_matrix(self.kind, self.params[0])
        if self.kind is GateKind.G:
            return g_gate_matrix(self.alpha, self.beta)
        raise CircuitError(f"{self.kind.name} has no 2x2 matrix")

    def fires(self, value: int) -> bool:
        return all(((value >> c.qubit) & 1) == int(c.positive) for c in self.controls)

    def apply_classical(self, value: int) -> int:
        """Image of basis index `value` under a classical gate."""
        if self.kind is GateKind.SWAP:
            a, b = self.targets
            if ((value >> a) ^ (value >> b)) & 1:
                value ^= (1 << a) | (1 << b)
            return value
        if self.kind in (GateKind.X, GateKind.CNOT, GateKind.MCX):
            if self.fires(value):
                value ^= 1 << self.target
            return value
        raise NotClassical(f"{self.kind.name} does not permute basis states")

    def remapped(self, mapping: Union[Sequence[int], Mapping[int, int]]) -> 'Gate':
        targets = tuple(mapping[t] for t in self.targets)
        controls = tuple(Control(mapping[c.qubit], c.positive) for c in self.controls)
        base = replace(self.base, targets=targets) if self.base is not None else None
        return replace(self, targets=targets, controls=controls, base=base)

    def __str__(self):
        ctrl = ' '.join(('' if c.positive else '-') + str(c.qubit) for c in self.controls)
        parts = [self.kind.value]
        if self.base is not None:
            parts.append(self.base.kind.value)
            parts.extend(f'{p:.6g}' for p in self.base.params)
        parts.extend(f'{p:.6g}' for p in self.params)
        if ctrl:
            parts.append(ctrl)
        parts.extend(str(t) for t in self.targets)
        return ' '.join(parts)


# Gate factories

def x(t: int) -> Gate:
    return Gate(GateKind.X, (t,))


def cx(c: int, t: int) -> Gate:
    return Gate(GateKind.CNOT, (t,), (Control(c, True),))


def swap(a: int, b: int) -> Gate:
    return Gate(GateKind.SWAP, (a, b))


def ry(theta: float, t: int) -> Gate:
    return Gate(GateKind.RY, (t,), params=(float(theta),))


def rz(theta: float, t: int) -> Gate:
    return Gate(GateKind.RZ, (t,), params=(float(theta),))


def rx(theta: float, t: int) -> Gate:
    return Gate(GateKind.RX, (t,), params=(float(theta),))


def g(alpha: complex, beta: float, t: int) -> Gate:
    alpha = complex(alpha)
    return Gate(GateKind.G, (t,), params=(alpha.real, alpha.imag, float(beta)))


def mcx(controls: Iterable[Union[Control, int]], t: int) -> Gate:
    return Gate(GateKind.MCX, (t,), as_controls(controls))


def mcu(base: Gate, controls: Iterable[Union[Control, int]]) -> Gate:
    return Gate(GateKind.MCU, base.targets, as_controls(controls), base=base)


def controlled_x(controls: Iterable[Union[Control, int]], t: int) -> Gate:
    """X, CNOT or MCX, whichever names the gate most plainly."""
    controls = as_controls(controls)
    if not controls:
        return x(t)
    if len(controls) == 1 and controls[0].positive:
        return cx(controls[0].qubit, t)
    return mcx(controls, t)


# ---------------------------------------------------------------------------
# Circuits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over `width` qubits; the last `ancilla_count` are ancillas."""
    width: int
    gates: tuple[Gate, ...] = ()
    ancilla_count: int = 0
    layout: Mapping[str, tuple[int, ...]] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, 'gates', tuple(self.gates))
        if self.width < 0:
            raise CircuitError(f"negative circuit width {self.width}")
        if not 0 <= self.ancilla_count <= self.width:
            raise CircuitError(f"ancilla count {self.ancilla_count} exceeds width {self.width}")
        for gate in self.gates:
            if max(gate.qubits) >= self.width:
                raise CircuitError(f"gate {gate} does not fit in width {self.width}")

    def __len__(self):
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __add__(self, other: 'Circuit') -> 'Circuit':
        return self.concat(other)

    @property
    def ancilla_qubits(self) -> range:
        return range(self.width - self.ancilla_count, self.width)

    @property
    def is_classical(self) -> bool:
        return all(gate.is_classical for gate in self.gates)

    def concat(self, other: 'Circuit') -> 'Circuit':
        if other.width != self.width:
            raise WidthMismatch(f"cannot join circuits of width {self.width} and {other.width}")
        layout = dict(self.layout)
        layout.update(other.layout)
        return Circuit(self.width, self.gates + other.gates,
                       max(self.ancilla_count, other.ancilla_count), layout)

    def inverse(self) -> 'Circuit':
        """Reverse circuit; classical gates are self-inverse, rotations negate."""
        inverted = []
        for gate in reversed(self.gates):
            inverted.append(_invert_gate(gate))
        return Circuit(self.width, tuple(inverted), self.ancilla_count, dict(self.layout))

    def remapped(self, mapping: Union[Sequence[int], Mapping[int, int]], width: int,
                 ancilla_count: int = 0, layout: Optional[Mapping] = None) -> 'Circuit':
        gates = tuple(gate.remapped(mapping) for gate in self.gates)
        return Circuit(width, gates, ancilla_count, dict(layout or {}))


def _invert_gate(gate: Gate) -> Gate:
    if gate.kind in CLASSICAL_KINDS:
        return gate
    if gate.kind in ROTATION_KINDS:
        return replace(gate, params=(-gate.params[0],))
    if gate.kind is GateKind.MCU and gate.base.kind in ROTATION_KINDS | {GateKind.X}:
        return replace(gate, base=_invert_gate(gate.base))
    raise CircuitError(f"{gate.kind.name} gate has no inverse in this gate set")


class CircuitBuilder:
    """Mutable gate accumulator that freezes into a Circuit."""

    def __init__(self, width: int):
        self.width = width
        self._gates: list[Gate] = []

    def __len__(self):
        return len(self._gates)

    @property
    def gates(self) -> list[Gate]:
        return self._gates

    def append(self, gate: Gate) -> Gate:
        self._gates.append(gate)
        return gate

    def extend(self, gates: Iterable[Gate]):
        self._gates.extend(gates)

    def build(self, ancilla_count: int = 0, layout: Optional[Mapping] = None) -> Circuit:
        return Circuit(self.width, tuple(self._gates), ancilla_count, dict(layout or {}))


# ---------------------------------------------------------------------------
# Gate counting
# ---------------------------------------------------------------------------

class ExpandPolicy(Enum):
    RAW = 'raw'
    EXPAND_TOFFOLI = 'expand_toffoli'
    EXPAND_ALL_MCX = 'expand_all_mcx'


class GateTally(NamedTuple):
    """Elementary cost before Toffoli lowering."""
    single: int = 0
    cnot: int = 0
    toffoli: int = 0

    def __add__(self, other):
        return GateTally(self.single + other.single, self.cnot + other.cnot,
                         self.toffoli + other.toffoli)

    def __mul__(self, factor: int):
        return GateTally(self.single * factor, self.cnot * factor, self.toffoli * factor)

    @property
    def elementary(self) -> int:
        return self.single + self.cnot + self.toffoli * (TOFFOLI_SINGLE + TOFFOLI_CNOT)


@dataclass
class GateCountReport:
    policy: ExpandPolicy = ExpandPolicy.RAW
    raw_by_kind: dict[str, int] = field(default_factory=dict)
    single_qubit: int = 0
    cnot: int = 0
    unexpanded_by_kind: dict[str, int] = field(default_factory=dict)

    toffoli_expansion = (TOFFOLI_SINGLE, TOFFOLI_CNOT)

    @property
    def elementary_total(self) -> int:
        return self.single_qubit + self.cnot

    def __add__(self, other: 'GateCountReport') -> 'GateCountReport':
        return GateCountReport(
            self.policy,
            dict(Counter(self.raw_by_kind) + Counter(other.raw_by_kind)),
            self.single_qubit + other.single_qubit,
            self.cnot + other.cnot,
            dict(Counter(self.unexpanded_by_kind) + Counter(other.unexpanded_by_kind)),
        )

    def as_dict(self) -> dict:
        return {
            'policy': self.policy.value,
            'raw_by_kind': dict(sorted(self.raw_by_kind.items())),
            'single_qubit': self.single_qubit,
            'cnot': self.cnot,
            'elementary_total': self.elementary_total,
            'unexpanded_by_kind': dict(sorted(self.unexpanded_by_kind.items())),
        }


def toffoli_level_tally(gate: Gate) -> Optional[GateTally]:
    """Cost of a gate that lowers without MCX expansion; None for larger MCX/MCU."""
    kind = gate.kind
    if kind in SINGLE_QUBIT_KINDS:
        return GateTally(single=1)
    if kind is GateKind.CNOT:
        return GateTally(cnot=1)
    if kind is GateKind.SWAP:
        return GateTally(cnot=3)
    if kind is GateKind.MCX and len(gate.controls) <= 2:
        sandwich = GateTally(single=2 * sum(1 for c in gate.controls if not c.positive))
        k = len(gate.controls)
        core = (GateTally(single=1), GateTally(cnot=1), GateTally(toffoli=1))[k]
        return sandwich + core
    if kind is GateKind.MCU and not gate.controls:
        return GateTally(single=1)
    return None


def count_gates(circuit: Circuit, expand: ExpandPolicy = ExpandPolicy.RAW) -> GateCountReport:
    """Count gates of a circuit under an expansion policy."""
    policy = ExpandPolicy(expand)
    report = GateCountReport(policy, dict(Counter(g.kind.name for g in circuit.gates)))
    unexpanded = Counter()
    total = GateTally()

    if policy is ExpandPolicy.RAW:
        for gate in circuit.gates:
            if gate.kind in SINGLE_QUBIT_KINDS:
                total += GateTally(single=1)
            elif gate.kind is GateKind.CNOT:
                total += GateTally(cnot=1)
            else:
                unexpanded[gate.kind.name] += 1
    elif policy is ExpandPolicy.EXPAND_TOFFOLI:
        for gate in circuit.gates:
            tally = toffoli_level_tally(gate)
            if tally is None:
                unexpanded[gate.kind.name] += 1
            else:
                total += tally
    else:
        from .mcx import gate_tally
        for gate in circuit.gates:
            total += gate_tally(gate, circuit.width)

    report.single_qubit = total.single + total.toffoli * TOFFOLI_SINGLE
    report.cnot = total.cnot + total.toffoli * TOFFOLI_CNOT
    report.unexpanded_by_kind = dict(unexpanded)
    return report
