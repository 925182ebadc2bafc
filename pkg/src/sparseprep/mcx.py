"""
MCX / MCU Expansion

Lowers multi-controlled X and multi-controlled single-qubit unitaries to
X, CNOT, Toffoli and single-qubit rotations.

Every lowering step may borrow any qubit of its pool that the gate does
not touch. Borrowed qubits are dirty: their state is unknown and restored
exactly. Strategies for k controls:

  k <= 2              CNOT / Toffoli directly
  free >= k - 2       ladder of 4(k-2) Toffolis over borrowed qubits
  1 <= free < k - 2   split the controls in two halves; each half borrows
                      the other half while the other computes
  free == 0           X = i Rx(pi): controlled Rx(pi) with the last control
                      split off, plus a chain of controlled Rz gates that
                      restores the phase (quadratic cost)

Controlled SU(2) targets use W = A X B X C with ABC = I. With two or more
controls the last one drives A, B and C and the rest drive the two X gates.
"""

import cmath
import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .constants import ANGLE_EPS, UNITARY_TOL
from .core_model import (
    Circuit,
    Control,
    Gate,
    GateKind,
    GateTally,
    ROTATION_KINDS,
    SINGLE_QUBIT_KINDS,
    as_controls,
    controlled_x,
    cx,
    mcu,
    mcx,
    rx,
    ry,
    rz,
    x,
)
from .errors import NotUnitary, OverlappingQubits

logger = logging.getLogger(__name__)

Pool = Union[range, tuple]


class McxStrategy(Enum):
    DIRECT = 'direct'
    LADDER = 'ladder'
    SPLIT = 'split'
    RECURSIVE = 'recursive'


def choose_strategy(k: int, free: int) -> McxStrategy:
    if k <= 2:
        return McxStrategy.DIRECT
    if free >= k - 2:
        return McxStrategy.LADDER
    if free >= 1:
        return McxStrategy.SPLIT
    return McxStrategy.RECURSIVE


@dataclass(frozen=True)
class McxRequest:
    controls: tuple[Control, ...]
    target: int
    free: tuple[int, ...] = ()
    width: Optional[int] = None

    def __post_init__(self):
        controls = as_controls(self.controls)
        object.__setattr__(self, 'controls', controls)
        object.__setattr__(self, 'free', tuple(int(q) for q in self.free))
        qubits = [c.qubit for c in controls] + [self.target] + list(self.free)
        if len(set(qubits)) != len(qubits):
            raise OverlappingQubits(f"controls, target and free qubits overlap: {qubits}")
        width = max(qubits) + 1 if self.width is None else self.width
        if min(qubits) < 0 or max(qubits) >= width:
            raise OverlappingQubits(f"qubits {qubits} do not fit width {width}")
        object.__setattr__(self, 'width', width)

    @property
    def pool(self) -> tuple[int, ...]:
        return tuple(sorted([c.qubit for c in self.controls] + [self.target] + list(self.free)))


# ---------------------------------------------------------------------------
# Single-qubit factorization
# ---------------------------------------------------------------------------

def zyz_angles(w: np.ndarray) -> tuple[float, float, float]:
    """(phi, theta, lam) with w = Rz(phi) Ry(theta) Rz(lam) for w in SU(2)."""
    a, b = w[0, 0], w[1, 0]
    theta = 2.0 * math.atan2(abs(b), abs(a))
    if abs(a) > ANGLE_EPS and abs(b) > ANGLE_EPS:
        total = -2.0 * cmath.phase(a)
        diff = 2.0 * cmath.phase(b)
    elif abs(b) <= ANGLE_EPS:
        total = -2.0 * cmath.phase(a)
        diff = 0.0
    else:
        total = 0.0
        diff = 2.0 * cmath.phase(b)
    return (total + diff) / 2.0, theta, (total - diff) / 2.0


def special_part(u: np.ndarray) -> tuple[np.ndarray, float]:
    """Split u = exp(i gamma) W with det W = 1."""
    gamma = cmath.phase(np.linalg.det(u)) / 2.0
    return u * cmath.exp(-1j * gamma), gamma


def _rotations(pairs, t: int) -> list[Gate]:
    return [factory(angle, t) for factory, angle in pairs if abs(angle) > ANGLE_EPS]


def zyz_gates(u: np.ndarray, t: int) -> list[Gate]:
    """u up to global phase as Rz, Ry, Rz in circuit order."""
    w, _ = special_part(np.asarray(u, dtype=complex))
    phi, theta, lam = zyz_angles(w)
    return _rotations(((rz, lam), (ry, theta), (rz, phi)), t)


def abc_factors(w: np.ndarray, t: int) -> tuple[list[Gate], list[Gate], list[Gate]]:
    """Gate lists for A, B, C with A X B X C = w and A B C = I (w in SU(2))."""
    phi, theta, lam = zyz_angles(w)
    a = _rotations(((ry, theta / 2), (rz, phi)), t)
    b = _rotations(((rz, -(phi + lam) / 2), (ry, -theta / 2)), t)
    c = _rotations(((rz, (lam - phi) / 2),), t)
    return a, b, c


def check_unitary(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise NotUnitary(f"expected a 2x2 matrix, got shape {u.shape}")
    if np.max(np.abs(u.conj().T @ u - np.eye(2))) > UNITARY_TOL:
        raise NotUnitary("matrix is not unitary within tolerance")
    return u


# ---------------------------------------------------------------------------
# One-level lowering
# ---------------------------------------------------------------------------

def _borrow(pool: Pool, used: set, limit: int) -> list[int]:
    out = []
    if limit <= 0:
        return out
    for q in pool:
        if q not in used:
            out.append(q)
            if len(out) == limit:
                break
    return out


def _sandwich(gate: Gate) -> Optional[list[Gate]]:
    negatives = [c.qubit for c in gate.controls if not c.positive]
    if not negatives:
        return None
    flips = [x(q) for q in negatives]
    positive = replace(gate, controls=tuple(Control(c.qubit, True) for c in gate.controls))
    return flips + [positive] + flips


def _toffoli(a: int, b: int, t: int) -> Gate:
    return mcx([a, b], t)


def _ladder(ctrls: Sequence[int], anc: Sequence[int], t: int) -> list[Gate]:
    k = len(ctrls)
    top = _toffoli(ctrls[k - 1], anc[k - 3], t)
    down = [_toffoli(ctrls[i + 1], anc[i - 1], anc[i]) for i in range(k - 3, 0, -1)]
    base = _toffoli(ctrls[0], ctrls[1], anc[0])
    up = down[::-1]
    body = down + [base] + up
    return [top] + body + [top] + body


def _split(ctrls: Sequence[int], t: int, spare: int) -> list[Gate]:
    half = (len(ctrls) + 1) // 2
    low, high = list(ctrls[:half]), list(ctrls[half:])
    finish = mcx(high + [spare], t)
    prepare = mcx(low, spare)
    return [finish, prepare, finish, prepare]


def _phase_chain(ctrls: Sequence[int], gamma: float) -> list[Gate]:
    """Phase exp(i gamma) on the all-ones pattern of ctrls, up to global phase."""
    gates = []
    rest = list(ctrls)
    angle = gamma
    while len(rest) > 1:
        last = rest.pop()
        if abs(angle) > ANGLE_EPS:
            gates.append(mcu(rz(angle, last), list(rest)))
        angle /= 2.0
    if abs(angle) > ANGLE_EPS:
        gates.append(rz(angle, rest[0]))
    return gates


def _lower_mcu(u: np.ndarray, ctrls: Sequence[int], t: int) -> list[Gate]:
    w, gamma = special_part(u)
    phase = _phase_chain(ctrls, gamma) if abs(gamma) > ANGLE_EPS else []
    a, b, c = abc_factors(w, t)
    if len(ctrls) == 1:
        inner = controlled_x(ctrls, t)
        return c + [inner] + b + [inner] + a + phase
    last, rest = ctrls[-1], list(ctrls[:-1])
    inner = controlled_x(rest, t)

    def lift(gates):
        return [mcu(gate, [last]) for gate in gates]

    return lift(c) + [inner] + lift(b) + [inner] + lift(a) + phase


def lower_gate(gate: Gate, pool: Pool) -> Optional[list[Gate]]:
    """One expansion step, or None when the gate is already a leaf."""
    kind = gate.kind
    if kind in SINGLE_QUBIT_KINDS or kind is GateKind.CNOT:
        return None
    if kind is GateKind.SWAP:
        a, b = gate.targets
        return [cx(a, b), cx(b, a), cx(a, b)]

    sandwiched = _sandwich(gate)
    if sandwiched is not None:
        return sandwiched

    ctrls = [c.qubit for c in gate.controls]
    t = gate.target
    k = len(ctrls)
    n_free = len(pool) - k - 1

    if kind is GateKind.MCU:
        if k == 0:
            return [gate.base]
        return _lower_mcu(gate.base.matrix(), ctrls, t)

    # MCX
    if k == 0:
        return [x(t)]
    if k == 1:
        return [cx(ctrls[0], t)]
    strategy = choose_strategy(k, n_free)
    if strategy is McxStrategy.DIRECT:
        return None
    used = set(ctrls) | {t}
    if strategy is McxStrategy.LADDER:
        return _ladder(ctrls, _borrow(pool, used, k - 2), t)
    if strategy is McxStrategy.SPLIT:
        return _split(ctrls, t, _borrow(pool, used, 1)[0])
    logger.debug("MCX with %d controls has no free qubit; using the quadratic construction", k)
    return [mcu(rx(math.pi, t), ctrls)] + _phase_chain(ctrls, math.pi / 2)


def expand_gates(gates: Iterable[Gate], pool: Pool) -> list[Gate]:
    """Lower until only X, CNOT, Toffoli and single-qubit gates remain."""
    out = []
    stack = list(gates)[::-1]
    while stack:
        gate = stack.pop()
        lowered = lower_gate(gate, pool)
        if lowered is None:
            out.append(gate)
        else:
            stack.extend(reversed(lowered))
    return out


def lower_single_qubit(gate: Gate) -> list[Gate]:
    """G and Rx as Rz/Ry rotations (up to global phase)."""
    if gate.kind in (GateKind.G, GateKind.RX):
        return zyz_gates(gate.matrix(), gate.target)
    return [gate]


# ---------------------------------------------------------------------------
# Public expansion entry points
# ---------------------------------------------------------------------------

def expand_mcx(req: McxRequest) -> Circuit:
    """Expansion of one MCX that borrows only the request's free qubits."""
    gate = controlled_x(req.controls, req.target)
    return Circuit(req.width, tuple(expand_gates([gate], req.pool)))


def expand_mcu(u, controls: Iterable[Union[Control, int]], target: int,
               free: Sequence[int] = (), width: Optional[int] = None) -> Circuit:
    """Controlled-u, exact up to global phase; u is a 2x2 matrix or a single-qubit Gate."""
    req = McxRequest(as_controls(controls), target, tuple(free), width)
    if isinstance(u, Gate):
        base = replace(u, targets=(target,))
        matrix = check_unitary(base.matrix())
    else:
        matrix = check_unitary(u)
        base = None

    if not req.controls:
        gates = [base] if base is not None else zyz_gates(matrix, target)
        return Circuit(req.width, tuple(gates))

    if base is not None:
        top = [mcu(base, req.controls)]
    else:
        flips = [x(c.qubit) for c in req.controls if not c.positive]
        ctrls = [c.qubit for c in req.controls]
        top = flips + _lower_mcu(matrix, ctrls, target) + flips
    return Circuit(req.width, tuple(expand_gates(top, req.pool)))


def expand_circuit(circuit: Circuit, lower_single: bool = False) -> Circuit:
    """Lower every MCX/MCU/SWAP; each gate borrows the rest of the register."""
    gates = expand_gates(circuit.gates, range(circuit.width))
    if lower_single:
        gates = [out for gate in gates for out in lower_single_qubit(gate)]
    return Circuit(circuit.width, tuple(gates), circuit.ancilla_count, dict(circuit.layout))


# ---------------------------------------------------------------------------
# Cost tallies (no materialization of large expansions)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _positive_mcx_tally(k: int, pool_size: int) -> GateTally:
    canonical = mcx(range(k), k)
    return _tally_lowered(canonical, pool_size)


@lru_cache(maxsize=4096)
def _mcu_tally(base: Gate, k: int, pool_size: int) -> GateTally:
    canonical = mcu(replace(base, targets=(k,)), range(k))
    return _tally_lowered(canonical, pool_size)


def _tally_lowered(gate: Gate, pool_size: int) -> GateTally:
    lowered = lower_gate(gate, range(pool_size))
    total = GateTally()
    for sub in lowered:
        total += gate_tally(sub, pool_size)
    return total


def gate_tally(gate: Gate, pool_size: int) -> GateTally:
    """Elementary cost of a gate that may borrow from a pool of `pool_size` qubits."""
    kind = gate.kind
    if kind in SINGLE_QUBIT_KINDS:
        return GateTally(single=1)
    if kind is GateKind.CNOT:
        return GateTally(cnot=1)
    if kind is GateKind.SWAP:
        return GateTally(cnot=3)

    negatives = sum(1 for c in gate.controls if not c.positive)
    sandwich = GateTally(single=2 * negatives)
    k = len(gate.controls)
    if kind is GateKind.MCX:
        if k == 0:
            core = GateTally(single=1)
        elif k == 1:
            core = GateTally(cnot=1)
        elif k == 2:
            core = GateTally(toffoli=1)
        else:
            core = _positive_mcx_tally(k, pool_size)
        return sandwich + core
    if k == 0:
        return GateTally(single=1)
    return sandwich + _mcu_tally(replace(gate.base, targets=(0,)), k, pool_size)
