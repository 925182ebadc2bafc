"""
Simulator

Dense statevector oracle. The state is held as a (2,)*width tensor whose
axis 0 is the most significant qubit, so qubit q lives on axis width-1-q.
Controlled gates act on the sub-tensor selected by the control values.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .constants import DENSE_WIDTH_CAP, PERMUTATION_WIDTH_CAP, UNITARY_WIDTH_CAP
from .core_model import Circuit, Control, Gate, GateKind, SparseStateSpec
from .errors import NotClassical, WidthMismatch, WidthTooLarge
from .permutation import Permutation

logger = logging.getLogger(__name__)

_X = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True, eq=False)
class StateVector:
    width: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.size != 1 << self.width:
            raise WidthMismatch(f"{amps.size} amplitudes do not describe {self.width} qubits")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, 'amps', amps)

    @classmethod
    def zero(cls, width: int) -> 'StateVector':
        return cls.basis(width, 0)

    @classmethod
    def basis(cls, width: int, index: int) -> 'StateVector':
        _check_dense_width(width)
        amps = np.zeros(1 << width, dtype=complex)
        amps[index] = 1.0
        return cls(width, amps)

    @classmethod
    def from_spec(cls, spec: SparseStateSpec, width: Optional[int] = None) -> 'StateVector':
        width = spec.n if width is None else width
        _check_dense_width(width)
        return cls(width, spec.to_statevector(width))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def __len__(self):
        return self.amps.size


def _check_dense_width(width: int):
    if width > DENSE_WIDTH_CAP:
        raise WidthTooLarge(f"{width} qubits exceeds the dense simulation cap of {DENSE_WIDTH_CAP}")


# ---------------------------------------------------------------------------
# Gate application
# ---------------------------------------------------------------------------

def _apply_controlled(psi: np.ndarray, width: int, controls: Iterable[Control],
                      target: int, u: np.ndarray):
    controls = tuple(controls)
    index = [slice(None)] * width
    target_axis = width - 1 - target
    shift = 0
    for c in controls:
        axis = width - 1 - c.qubit
        index[axis] = 1 if c.positive else 0
        if axis < target_axis:
            shift += 1
    sub = psi[tuple(index)]
    view = np.moveaxis(sub, target_axis - shift, 0)
    low = view[0].copy()
    high = view[1].copy()
    view[0] = u[0, 0] * low + u[0, 1] * high
    view[1] = u[1, 0] * low + u[1, 1] * high


def _apply_gate(psi: np.ndarray, width: int, gate: Gate):
    kind = gate.kind
    if kind is GateKind.SWAP:
        a, b = gate.targets
        for c, t in ((a, b), (b, a), (a, b)):
            _apply_controlled(psi, width, (Control(c),), t, _X)
    elif kind in (GateKind.CNOT, GateKind.MCX):
        _apply_controlled(psi, width, gate.controls, gate.target, _X)
    else:
        _apply_controlled(psi, width, gate.controls, gate.target, gate.matrix())


def apply(circuit: Circuit, initial: StateVector, expand: bool = False) -> StateVector:
    """Apply the circuit's gates in order; with `expand`, MCX/MCU are lowered first."""
    if circuit.width != initial.width:
        raise WidthMismatch(f"circuit has {circuit.width} qubits, state has {initial.width}")
    _check_dense_width(circuit.width)
    if expand:
        from .mcx import expand_circuit
        circuit = expand_circuit(circuit)
    width = circuit.width
    psi = np.array(initial.amps, dtype=complex).reshape((2,) * width)
    for gate in circuit.gates:
        _apply_gate(psi, width, gate)
    return StateVector(width, psi.reshape(-1))


def run(circuit: Circuit, expand: bool = False) -> StateVector:
    """Apply the circuit to |0...0>."""
    return apply(circuit, StateVector.zero(circuit.width), expand=expand)


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|, insensitive to global phase."""
    if a.width != b.width:
        raise WidthMismatch(f"states have widths {a.width} and {b.width}")
    return float(min(1.0, abs(np.vdot(a.amps, b.amps))))


def ancilla_residual(state: StateVector, n: int) -> float:
    """Probability weight on components with any qubit >= n set."""
    return float(np.sum(np.abs(state.amps[1 << n:]) ** 2))


def project_output(state: StateVector, n: int) -> StateVector:
    """Amplitudes of the first n qubits on the all-ancillas-zero branch."""
    return StateVector(n, state.amps[:1 << n])


def unitary_of(circuit: Circuit, expand: bool = False) -> np.ndarray:
    """Full matrix of a small circuit, column j = image of basis state j."""
    if circuit.width > UNITARY_WIDTH_CAP:
        raise WidthTooLarge(f"{circuit.width} qubits exceeds the matrix cap of {UNITARY_WIDTH_CAP}")
    if expand:
        from .mcx import expand_circuit
        circuit = expand_circuit(circuit)
    dim = 1 << circuit.width
    columns = [apply(circuit, StateVector.basis(circuit.width, j)).amps for j in range(dim)]
    return np.column_stack(columns)


# ---------------------------------------------------------------------------
# Classical tracking
# ---------------------------------------------------------------------------

def _require_classical(circuit: Circuit):
    for gate in circuit.gates:
        if not gate.is_classical:
            raise NotClassical(f"{gate.kind.name} gate is not a basis permutation")


def _apply_classical_array(values: np.ndarray, gate: Gate):
    if gate.kind is GateKind.SWAP:
        a, b = gate.targets
        diff = ((values >> a) ^ (values >> b)) & 1
        values ^= (diff << a) | (diff << b)
        return
    mask = np.ones(values.shape, dtype=bool)
    for c in gate.controls:
        mask &= ((values >> c.qubit) & 1) == int(c.positive)
    values[mask] ^= 1 << gate.target


def permutation_action(circuit: Circuit, points: Optional[Iterable[int]] = None):
    """
    Basis permutation of an X/CNOT/SWAP/MCX circuit.

    Without `points` the whole register is tracked and a Permutation is
    returned. With `points` only those inputs are tracked, at any width,
    and a dict input -> image is returned.
    """
    _require_classical(circuit)
    if points is not None:
        images = {}
        for p in points:
            value = int(p)
            for gate in circuit.gates:
                value = gate.apply_classical(value)
            images[int(p)] = value
        return images

    if circuit.width > PERMUTATION_WIDTH_CAP:
        raise WidthTooLarge(f"{circuit.width} qubits exceeds the permutation cap of {PERMUTATION_WIDTH_CAP}")
    start = np.arange(1 << circuit.width, dtype=np.int64)
    values = start.copy()
    for gate in circuit.gates:
        _apply_classical_array(values, gate)
    moved = np.nonzero(values != start)[0]
    return Permutation(circuit.width, {int(p): int(values[p]) for p in moved})
