"""
Permutation

Sparse permutations of n-bit basis indices, cycle decomposition, the split
into two sets of disjoint transpositions, and power-of-two batch planning.
"""

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .constants import is_power_of_two
from .errors import BadWidth, NotDisjoint, NotPowerOfTwo, PermutationError


class Permutation:
    """A bijection on {0, ..., 2**n - 1} storing only its non-fixed points."""

    __slots__ = ('n', '_map')

    def __init__(self, n: int, mapping: Mapping[int, int]):
        if n < 0:
            raise BadWidth(f"negative bit width {n}")
        self.n = n
        limit = 1 << n
        cleaned = {}
        for src, dst in mapping.items():
            src, dst = int(src), int(dst)
            if not (0 <= src < limit and 0 <= dst < limit):
                raise BadWidth(f"point {src}->{dst} is outside {n} bits")
            if src != dst:
                cleaned[src] = dst
        if set(cleaned) != set(cleaned.values()):
            raise PermutationError("mapping is not a bijection on its moved points")
        self._map = cleaned

    # Constructors

    @classmethod
    def identity(cls, n: int) -> 'Permutation':
        return cls(n, {})

    @classmethod
    def from_mapping(cls, n: int, mapping: Mapping[int, int]) -> 'Permutation':
        return cls(n, mapping)

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> 'Permutation':
        mapping = {}
        for cycle in cycles:
            cycle = [int(p) for p in cycle]
            for i, point in enumerate(cycle):
                if point in mapping:
                    raise NotDisjoint(f"point {point} appears in two cycles")
                mapping[point] = cycle[(i + 1) % len(cycle)]
        return cls(n, mapping)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]]) -> 'Permutation':
        return cls.from_cycles(n, [tuple(p) for p in pairs])

    # Views

    def __call__(self, x: int) -> int:
        return self._map.get(x, x)

    @property
    def size(self) -> int:
        """Number of non-fixed points."""
        return len(self._map)

    @property
    def mapping(self) -> Mapping[int, int]:
        return MappingProxyType(self._map)

    @property
    def support(self) -> list[int]:
        return sorted(self._map)

    @property
    def is_identity(self) -> bool:
        return not self._map

    def inverse(self) -> 'Permutation':
        return Permutation(self.n, {v: k for k, v in self._map.items()})

    def compose(self, other: 'Permutation') -> 'Permutation':
        """self o other: apply `other` first."""
        if other.n != self.n:
            raise BadWidth(f"cannot compose permutations on {self.n} and {other.n} bits")
        points = set(self._map) | set(other._map)
        return Permutation(self.n, {p: self(other(p)) for p in points})

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.n == other.n and self._map == other._map

    __hash__ = None

    def __repr__(self):
        cycles = ' '.join('(' + ','.join(map(str, c)) + ')' for c in cycle_decompose(self))
        return f"Permutation(n={self.n}, {cycles or 'id'})"


@dataclass(frozen=True)
class TranspositionSet:
    """Pairwise disjoint transpositions."""
    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        pairs = tuple((int(a), int(b)) for a, b in self.pairs)
        object.__setattr__(self, 'pairs', pairs)
        seen = set()
        for a, b in pairs:
            if a == b:
                raise NotDisjoint(f"transposition ({a},{b}) is degenerate")
            if a in seen or b in seen:
                raise NotDisjoint(f"transposition ({a},{b}) shares a point with another pair")
            seen.update((a, b))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.pairs)

    @property
    def points(self) -> list[int]:
        return [p for pair in self.pairs for p in pair]

    def as_permutation(self, n: int) -> Permutation:
        return Permutation.from_pairs(n, self.pairs)


@dataclass(frozen=True)
class BatchPlan:
    batches: tuple[TranspositionSet, ...]
    m_cap: int

    def __post_init__(self):
        for batch in self.batches:
            if not is_power_of_two(len(batch)) or len(batch) > self.m_cap:
                raise NotPowerOfTwo(f"batch of {len(batch)} does not fit cap {self.m_cap}")

    @property
    def sizes(self) -> list[int]:
        return [len(b) for b in self.batches]

    def as_permutation(self, n: int) -> Permutation:
        result = Permutation.identity(n)
        for batch in self.batches:
            result = batch.as_permutation(n).compose(result)
        return result


def cycle_decompose(sigma: Permutation) -> list[tuple[int, ...]]:
    """Disjoint cycles of length >= 2, each starting at its smallest point."""
    cycles = []
    seen = set()
    for start in sigma.support:
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        nxt = sigma(start)
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = sigma(nxt)
        cycles.append(tuple(cycle))
    return cycles


def split_two_sets(sigma: Permutation) -> tuple[TranspositionSet, TranspositionSet]:
    """
    Write sigma = rho2 o rho1 with rho1, rho2 each a set of disjoint transpositions.

    A cycle (x_0 ... x_{L-1}) is the product of two reflections of its index
    ring: rho1 pairs x_i with x_{L-1-i}, rho2 pairs x_i with x_{L-i}.
    """
    first, second = [], []
    for cycle in cycle_decompose(sigma):
        length = len(cycle)
        for i in range(length // 2):
            first.append((cycle[i], cycle[length - 1 - i]))
        for i in range(1, (length + 1) // 2):
            if i != length - i:
                second.append((cycle[i], cycle[length - i]))
    return TranspositionSet(tuple(first)), TranspositionSet(tuple(second))


def partition_batches(transpositions: TranspositionSet, m_cap: int) -> BatchPlan:
    """Full batches of m_cap, then the remainder by its binary expansion."""
    if not is_power_of_two(m_cap):
        raise NotPowerOfTwo(f"batch cap {m_cap} is not a power of two")
    pairs = list(transpositions.pairs)
    batches = []
    full = len(pairs) // m_cap
    for i in range(full):
        batches.append(TranspositionSet(tuple(pairs[i * m_cap:(i + 1) * m_cap])))
    rest = pairs[full * m_cap:]
    size = 1 << max(len(rest).bit_length() - 1, 0)
    while rest:
        if len(rest) >= size:
            batches.append(TranspositionSet(tuple(rest[:size])))
            rest = rest[size:]
        size >>= 1
    return BatchPlan(tuple(batches), m_cap)


def source_batch_cap(n: int) -> int:
    """2**floor(log2(log2(n) / 4)), at least 1."""
    if n < 16:
        return 1
    return 1 << int(math.floor(math.log2(math.log2(n) / 4)))


def batch_cap(n: int) -> int:
    """Default batch capacity: never below 2 once batches of two are legal."""
    if n < 16:
        return 1
    return max(2, source_batch_cap(n))


# The worked permutation on three bits: (0,1,5,7) o (2,4)
EXAMPLE_S8 = Permutation(3, {0: 1, 1: 5, 2: 4, 4: 2, 5: 7, 7: 0})
