"""
Dense State Preparation

Prepares an arbitrary k-qubit state with uniformly controlled rotations.
Magnitudes come from a binary amplitude tree (level t splits on qubit
k-1-t, controlled by the t qubits above it); phases from a diagonal Rz
cascade working upward from qubit 0. Each multiplexor with t controls
lowers to 2**t rotations and 2**t CNOTs along a Gray-code walk.
"""

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .constants import AMPLITUDE_TOL, ANGLE_EPS
from .core_model import Circuit, Gate, cx, ry, rz
from .errors import NotNormalized, WidthMismatch

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DenseTarget:
    k: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.size != 1 << self.k:
            raise WidthMismatch(f"{amps.size} amplitudes do not describe {self.k} qubits")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > AMPLITUDE_TOL:
            raise NotNormalized(f"dense target has squared norm {norm!r}")
        object.__setattr__(self, 'amps', amps)

    @classmethod
    def from_mapping(cls, k: int, amplitudes: Mapping[int, complex]) -> 'DenseTarget':
        amps = np.zeros(1 << k, dtype=complex)
        for index, amp in amplitudes.items():
            amps[index] = amp
        return cls(k, amps)


def gray_code(i: int) -> int:
    return i ^ (i >> 1)


def gray_angles(alphas: np.ndarray) -> np.ndarray:
    """Rotation angles for the Gray-code walk realizing per-pattern angles `alphas`."""
    size = alphas.size
    bits = size.bit_length() - 1
    patterns = np.arange(size)[:, None]
    codes = np.array([gray_code(i) for i in range(size)])[None, :]
    overlap = patterns & codes
    parity = np.zeros(overlap.shape, dtype=np.int64)
    for b in range(bits):
        parity ^= (overlap >> b) & 1
    signs = 1 - 2 * parity
    return signs.T @ alphas / size


def multiplexed_rotation(factory, alphas: np.ndarray, controls: Sequence[int], target: int) -> list[Gate]:
    """Rotation by alphas[p] on `target` when the controls read p (bit j of p = controls[j])."""
    alphas = np.asarray(alphas, dtype=float)
    if np.all(np.abs(alphas) <= ANGLE_EPS):
        return []
    if not controls or np.all(np.abs(alphas - alphas[0]) <= ANGLE_EPS):
        return [factory(float(alphas[0]), target)]

    t = len(controls)
    thetas = gray_angles(alphas)
    gates = []
    for i, theta in enumerate(thetas):
        if abs(theta) > ANGLE_EPS:
            gates.append(factory(float(theta), target))
        flip = min((i + 1 & -(i + 1)).bit_length() - 1, t - 1)
        gates.append(cx(controls[flip], target))
    return gates


def _magnitude_levels(mags: np.ndarray, k: int) -> list[Gate]:
    gates = []
    probs = mags ** 2
    for t in range(k):
        halves = probs.reshape(1 << t, 2, 1 << (k - t - 1)).sum(axis=2)
        alphas = 2.0 * np.arctan2(np.sqrt(halves[:, 1]), np.sqrt(halves[:, 0]))
        controls = [k - t + j for j in range(t)]
        gates.extend(multiplexed_rotation(ry, alphas, controls, k - 1 - t))
    return gates


def _phase_levels(amps: np.ndarray, k: int) -> list[Gate]:
    gates = []
    phases = np.where(np.abs(amps) > 0, np.angle(amps), 0.0)
    weights = np.abs(amps) ** 2
    for s in range(k):
        ph0, ph1 = phases[0::2], phases[1::2]
        w0, w1 = weights[0::2], weights[1::2]
        both = (w0 > 0) & (w1 > 0)
        deltas = np.where(both, ph1 - ph0, 0.0)
        phases = np.where(both, (ph0 + ph1) / 2.0, np.where(w0 > 0, ph0, ph1))
        weights = w0 + w1
        controls = [s + 1 + j for j in range(k - 1 - s)]
        gates.extend(multiplexed_rotation(rz, deltas, controls, s))
    return gates


def synth_dense(target: DenseTarget) -> Circuit:
    """Circuit on k qubits mapping |0...0> to the target up to global phase."""
    k = target.k
    if k == 0:
        return Circuit(0)
    gates = _magnitude_levels(np.abs(target.amps), k) + _phase_levels(target.amps, k)
    logger.debug("dense preparation of %d qubits: %d gates", k, len(gates))
    return Circuit(k, tuple(gates))
