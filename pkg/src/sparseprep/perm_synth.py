"""
Permutation Synthesis

Circuits for permutations of basis states. Each batch of m' disjoint
transpositions (x_0 x_1)(x_2 x_3)... is realized as C1^-1 . C2 . C1 where C1
maps x_j to j and C2 swaps 2i <-> 2i+1 inside the block [0, 2m').
C1 is found by reducing a 2m' x n bit matrix whose rows track the current
images of the x_j.
"""

import logging
from typing import Callable, Iterable, Optional, Sequence, Union

from .constants import is_power_of_two
from .core_model import Circuit, CircuitBuilder, Control, Gate, controlled_x, cx, swap, x
from .errors import BadWidth, BatchTooLarge, InvariantViolation, NotPowerOfTwo
from .permutation import (
    Permutation,
    TranspositionSet,
    batch_cap,
    partition_batches,
    split_two_sets,
)

logger = logging.getLogger(__name__)

TraceHook = Callable[[Gate, 'BatchMatrix'], None]


class BatchMatrix:
    """Bit matrix of the current images of a batch's points (row j, bit k = column k)."""

    def __init__(self, points: Sequence[int], n: int):
        self.n = n
        self.rows = [int(p) for p in points]
        self.m_prime = len(self.rows) // 2
        self._check_distinct()

    def column(self, k: int) -> int:
        """Column k as a bitmask over rows."""
        mask = 0
        for j, row in enumerate(self.rows):
            if (row >> k) & 1:
                mask |= 1 << j
        return mask

    @property
    def ell(self) -> int:
        """Number of distinct nonzero columns."""
        return len({c for c in (self.column(k) for k in range(self.n)) if c})

    def apply(self, gate: Gate):
        self.rows = [gate.apply_classical(row) for row in self.rows]
        self._check_distinct()

    def is_reduced(self) -> bool:
        return all(row == j for j, row in enumerate(self.rows))

    def _check_distinct(self):
        if len(set(self.rows)) != len(self.rows):
            raise InvariantViolation(f"batch rows collided: {self.rows}")


class _Reducer:
    """Emits the gates of C1 while evolving the matrix alongside."""

    def __init__(self, matrix: BatchMatrix, block_bits: int, trace: Optional[TraceHook]):
        self.matrix = matrix
        self.block_bits = block_bits
        self.trace = trace
        self.gates: list[Gate] = []

    def emit(self, gate: Gate):
        self.gates.append(gate)
        self.matrix.apply(gate)
        if self.trace is not None:
            self.trace(gate, self.matrix)

    def run(self) -> list[Gate]:
        self._merge_duplicate_columns()
        ell = self._pack_columns()
        self._clear_first_row(ell)
        for j in range(1, len(self.matrix.rows)):
            self._fix_row(j)
        if not self.matrix.is_reduced():
            raise InvariantViolation(f"reduction finished with rows {self.matrix.rows}")
        return self.gates

    def _merge_duplicate_columns(self):
        first_seen = {}
        for k in range(self.matrix.n):
            col = self.matrix.column(k)
            if not col:
                continue
            if col in first_seen:
                self.emit(cx(first_seen[col], k))
            else:
                first_seen[col] = k

    def _pack_columns(self) -> int:
        nonzero = [k for k in range(self.matrix.n) if self.matrix.column(k)]
        for slot, k in enumerate(nonzero):
            if k != slot:
                self.emit(swap(slot, k))
        return len(nonzero)

    def _clear_first_row(self, ell: int):
        row0 = self.matrix.rows[0]
        for k in range(ell):
            if (row0 >> k) & 1:
                self.emit(x(k))

    def _fix_row(self, j: int):
        L = self.block_bits
        row = self.matrix.rows[j]
        if row == j:
            return

        if row >> L == 0:
            # Row lives inside the block: raise column L, conditioned on the
            # full block pattern so no finished row can match.
            pattern = [Control(b, bool((row >> b) & 1)) for b in range(L)]
            self.emit(controlled_x(pattern, L))
            row = self.matrix.rows[j]

        high = row >> L
        k = L + ((high & -high).bit_length() - 1)
        goal = j | (1 << k)
        diff = row ^ goal
        b = 0
        while diff >> b:
            if (diff >> b) & 1:
                self.emit(cx(k, b))
            b += 1
        self.emit(controlled_x([b for b in range(L) if (j >> b) & 1], k))


def _block_swap(n: int, block_bits: int) -> Gate:
    """Flip qubit 0 when every qubit from block_bits upward is 0."""
    return controlled_x([Control(q, False) for q in range(block_bits, n)], 0)


def synth_batch(batch: Union[TranspositionSet, Iterable], n: int,
                trace: Optional[TraceHook] = None) -> Circuit:
    """Circuit swapping the pair points of one batch and fixing everything else."""
    if not isinstance(batch, TranspositionSet):
        batch = TranspositionSet(tuple(batch))
    m_prime = len(batch)
    if m_prime == 0:
        return Circuit(n)
    if not is_power_of_two(m_prime):
        raise NotPowerOfTwo(f"batch has {m_prime} transpositions")
    if any(p >> n for p in batch.points):
        raise BadWidth(f"batch point outside {n} bits")

    if n == 1:
        return Circuit(1, (x(0),))
    limit = max(2, n.bit_length() - 1)
    block_bits = (2 * m_prime).bit_length() - 1
    if 2 * m_prime > limit or block_bits >= n:
        raise BatchTooLarge(f"batch of {m_prime} is too large for {n} qubits")

    matrix = BatchMatrix(batch.points, n)
    forward = _Reducer(matrix, block_bits, trace).run()
    gates = forward + [_block_swap(n, block_bits)] + forward[::-1]
    return Circuit(n, tuple(gates))


def synth_permutation(sigma: Permutation, n: Optional[int] = None,
                      m_cap: Optional[int] = None) -> Circuit:
    """Exact circuit for sigma built from batches of disjoint transpositions."""
    n = sigma.n if n is None else n
    if n < sigma.n:
        raise BadWidth(f"permutation on {sigma.n} bits does not fit {n} qubits")
    if sigma.is_identity:
        return Circuit(n)
    cap = batch_cap(n) if m_cap is None else m_cap

    first, second = split_two_sets(sigma)
    plans = (partition_batches(first, cap), partition_batches(second, cap))
    logger.debug("permutation of size %d on %d qubits: batches %s then %s (cap %d)",
                 sigma.size, n, plans[0].sizes, plans[1].sizes, cap)

    builder = CircuitBuilder(n)
    for plan in plans:
        for batch in plan.batches:
            builder.extend(synth_batch(batch, n).gates)
    return builder.build()
