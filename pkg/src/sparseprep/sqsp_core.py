"""
Sparse State Preparation without Ancillas

Packs the d amplitudes into the slots [0, d) with a permutation sigma of
disjoint transpositions, prepares the packed ceil(log d)-qubit dense state
on the low qubits, then applies a circuit for sigma.
"""

import logging
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .constants import MIN_PADDED_BATCH, ceil_log2
from .core_model import Circuit, SparseStateSpec, validate_spec, x
from .dense_prep import DenseTarget, synth_dense
from .errors import NoSparePoints, PermutationError
from .perm_synth import synth_permutation
from .permutation import Permutation, batch_cap, cycle_decompose

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SigmaPlan:
    sigma: Permutation
    flag_used: frozenset[int]
    compact_index: Mapping[int, int] = field(default_factory=dict)


def build_sigma(spec: SparseStateSpec) -> SigmaPlan:
    """Give every basis point >= d the smallest free slot below d."""
    d = spec.d
    points = sorted(spec.points)
    flags = {q for q in points if q < d}
    compact = {q: q for q in points if q < d}
    pairs = []
    slot = 0
    for q in points:
        if q < d:
            continue
        while slot in flags:
            slot += 1
        flags.add(slot)
        pairs.append((slot, q))
        compact[q] = slot
    sigma = Permutation.from_pairs(spec.n, pairs)
    return SigmaPlan(sigma, frozenset(flags), compact)


def _transpositions(sigma: Permutation) -> list[tuple[int, int]]:
    cycles = cycle_decompose(sigma)
    if any(len(c) != 2 for c in cycles):
        raise PermutationError("padding needs a product of disjoint transpositions")
    return [tuple(c) for c in cycles]


def pad_irrelevant(sigma: Permutation, spec: SparseStateSpec, m_cap: int,
                   min_batch: int = 1) -> Permutation:
    """
    Add transpositions between points that carry no amplitude so the last
    batch holds the next power of two. A residual that already is a power
    of two is left alone unless it is below `min_batch`.
    """
    pairs = _transpositions(sigma)
    residual = len(pairs) % m_cap
    if residual == 0:
        return sigma
    goal = max(1 << ceil_log2(residual), min(min_batch, m_cap))
    if goal == residual:
        return sigma

    needed = 2 * (goal - residual)
    forbidden = set(spec.points)
    limit = 1 << spec.n
    spare = []
    candidate = spec.d
    while len(spare) < needed and candidate < limit:
        if candidate not in forbidden:
            spare.append(candidate)
        candidate += 1
    if len(spare) < needed:
        raise NoSparePoints(f"need {needed} spare points on {spec.n} qubits, found {len(spare)}")

    extra = [(spare[i], spare[i + 1]) for i in range(0, needed, 2)]
    logger.debug("padding %d transpositions with %s", len(pairs), extra)
    return Permutation.from_pairs(sigma.n, pairs + extra)


def _basis_circuit(spec: SparseStateSpec) -> Circuit:
    q = spec.points[0]
    return Circuit(spec.n, tuple(x(b) for b in range(spec.n) if (q >> b) & 1))


def packed_amplitudes(spec: SparseStateSpec, plan: SigmaPlan) -> DenseTarget:
    k = ceil_log2(spec.d)
    amps = np.zeros(1 << k, dtype=complex)
    for amp, q in spec.sorted_entries():
        amps[plan.compact_index[q]] = amp
    return DenseTarget(k, amps)


def synth_no_ancilla(spec: SparseStateSpec, m_cap: Optional[int] = None,
                     pad: bool = True) -> Circuit:
    """Circuit on exactly n qubits preparing sum_i alpha_i |q_i>."""
    spec = validate_spec(spec, spec.n)
    n = spec.n
    if spec.d == 1:
        return _basis_circuit(spec)

    plan = build_sigma(spec)
    target = packed_amplitudes(spec, plan)
    dense = synth_dense(target)
    prep = dense.remapped(range(target.k), n)

    cap = batch_cap(n) if m_cap is None else m_cap
    sigma = plan.sigma
    if pad:
        try:
            sigma = pad_irrelevant(sigma, spec, cap, min_batch=MIN_PADDED_BATCH)
        except NoSparePoints as e:
            logger.debug("no padding: %s", e)

    permute = synth_permutation(sigma, n, m_cap=cap)
    logger.info("no-ancilla synthesis: n=%d d=%d, %d dense gates, %d permutation gates",
                n, spec.d, len(prep), len(permute))
    return Circuit(n, prep.gates + permute.gates, 0, {'R': tuple(range(n))})
