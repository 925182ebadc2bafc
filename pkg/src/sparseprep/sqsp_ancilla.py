"""
Sparse State Preparation with Ancillas

The ancilla pipeline writes the state in (n, r)-unary form over a block
register M, then converts every block M_j into the output bits R_j.
synth_auto picks between this pipeline and the ancilla-free one.

Qubit layout: R = [0, n), M = [n, n + code.size), flag = last qubit.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

from .core_model import Circuit, CircuitBuilder, ExpandPolicy, SparseStateSpec, count_gates, validate_spec, x
from .errors import TooFewAncillas
from .sqsp_core import synth_no_ancilla
from .unary2binary import ConversionLayout, conversion_gates
from .unary_prep import NrCode, synth_nr_unary

logger = logging.getLogger(__name__)

NO_ANCILLA = 'no-ancilla'
ANCILLA = 'ancilla'


def ancilla_usage(n: int, r: int) -> int:
    """Block register plus the flag."""
    return NrCode(n, r).size + 1


def choose_r(n: int, m: int) -> Optional[int]:
    """Largest usable block width, or None when no layout fits in m ancillas."""
    if n < 1 or m < n:
        return None
    r = min((m // n).bit_length() - 1, n)
    while r >= 1 and ancilla_usage(n, r) > m:
        r -= 1
    return r if r >= 1 else None


@dataclass(frozen=True)
class AncillaLayout:
    n: int
    r: int

    @property
    def code(self) -> NrCode:
        return NrCode(self.n, self.r)

    @property
    def ancilla_count(self) -> int:
        return self.code.size + 1

    @property
    def width(self) -> int:
        return self.n + self.ancilla_count

    @property
    def flag(self) -> int:
        return self.width - 1

    @property
    def r_blocks(self) -> tuple[tuple[int, ...], ...]:
        starts = range(0, self.n, self.r)
        return tuple(tuple(range(s, s + w)) for s, w in zip(starts, self.code.block_widths))

    @property
    def m_blocks(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(self.n + q for q in block) for block in self.code.layout)

    def as_dict(self) -> dict:
        return {
            'R': tuple(range(self.n)),
            'M': tuple(range(self.n, self.flag)),
            'flag': (self.flag,),
        }


def synth_with_ancilla(spec: SparseStateSpec, m: int) -> Circuit:
    """Circuit on n + (at most m) qubits; ancillas start and end at |0>."""
    spec = validate_spec(spec, spec.n)
    r = choose_r(spec.n, m)
    if r is None:
        raise TooFewAncillas(f"{m} ancillas cannot hold a unary layout for n={spec.n}")
    layout = AncillaLayout(spec.n, r)

    builder = CircuitBuilder(layout.width)
    builder.append(x(layout.flag))
    unary = synth_nr_unary(spec, r)
    shift = {q: spec.n + q for q in range(unary.width)}
    builder.extend(unary.remapped(shift, layout.width).gates)

    for m_block, r_block in zip(layout.m_blocks, layout.r_blocks):
        conversion = ConversionLayout(len(r_block), m_block, r_block)
        builder.extend(conversion_gates(conversion))

    logger.info("ancilla synthesis: n=%d d=%d r=%d, %d blocks, %d ancillas, %d gates",
                spec.n, spec.d, r, layout.code.block_count, layout.ancilla_count, len(builder))
    return builder.build(layout.ancilla_count, layout.as_dict())


@dataclass(frozen=True)
class DispatchDecision:
    path: str
    r: Optional[int]
    no_ancilla_size: Optional[int]
    ancilla_size: Optional[int]
    strict: bool = False


def _size(circuit: Circuit) -> int:
    return count_gates(circuit, ExpandPolicy.EXPAND_ALL_MCX).elementary_total


def _in_asymptotic_regime(spec: SparseStateSpec, m: int) -> bool:
    n = spec.n
    if n < 2:
        return False
    return spec.d >= n * math.log2(n) and m >= n * n


def dispatch(spec: SparseStateSpec, m: int, strict: bool = False) -> tuple[DispatchDecision, Circuit]:
    """
    Choose a pipeline. By default both feasible pipelines are synthesized and
    the smaller expanded size wins, ties going to the ancilla-free one. With
    `strict`, the ancilla pipeline runs only for d >= n log2 n and m >= n^2.
    """
    spec = validate_spec(spec, spec.n)
    r = choose_r(spec.n, m)

    if strict:
        if r is not None and _in_asymptotic_regime(spec, m):
            circuit = synth_with_ancilla(spec, m)
            decision = DispatchDecision(ANCILLA, r, None, _size(circuit), True)
        else:
            circuit = synth_no_ancilla(spec)
            decision = DispatchDecision(NO_ANCILLA, r, _size(circuit), None, True)
    else:
        plain = synth_no_ancilla(spec)
        plain_size = _size(plain)
        if r is None:
            circuit = plain
            decision = DispatchDecision(NO_ANCILLA, None, plain_size, None)
        else:
            wide = synth_with_ancilla(spec, m)
            wide_size = _size(wide)
            if wide_size < plain_size:
                circuit, path = wide, ANCILLA
            else:
                circuit, path = plain, NO_ANCILLA
            decision = DispatchDecision(path, r, plain_size, wide_size)

    logger.info("dispatch n=%d d=%d m=%d: %s (r=%s, sizes no-ancilla=%s ancilla=%s)",
                spec.n, spec.d, m, decision.path, decision.r,
                decision.no_ancilla_size, decision.ancilla_size)
    return decision, circuit


def synth_auto(spec: SparseStateSpec, m: int, strict: bool = False) -> Circuit:
    return dispatch(spec, m, strict)[1]
