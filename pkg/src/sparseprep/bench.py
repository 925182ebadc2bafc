"""
Benchmark Harness

Counts (and, where the width allows, verifies) circuits over a grid of
(n, d, m, method) cells and fits one constant per method against its
asymptotic bound. Also hosts the random state generator and the naive
one-MCX-per-transposition baseline used for comparison.
"""

import csv
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import IO, Iterable, Optional, Sequence, Union

import numpy as np

from .constants import (
    ANCILLA_RESIDUAL_TOL,
    BENCH_METHODS,
    DENSE_WIDTH_CAP,
    FIDELITY_THRESHOLD,
)
from .core_model import Circuit, CircuitBuilder, Control, ExpandPolicy, SparseStateSpec, count_gates, cx, mcx, x
from .dense_prep import synth_dense
from .errors import FormatError, SparsePrepError, SpecError, TooFewAncillas
from .permutation import Permutation, cycle_decompose
from .simulator import StateVector, ancilla_residual, fidelity, project_output, run
from .sqsp_ancilla import choose_r, synth_with_ancilla
from .sqsp_core import build_sigma, packed_amplitudes, synth_no_ancilla

logger = logging.getLogger(__name__)

CSV_COLUMNS = ('n', 'd', 'm', 'method', 'status', 'raw_count', 'expanded_count',
               'bound', 'ratio', 'sim_verified', 'wall_time_ms')


# ---------------------------------------------------------------------------
# Random inputs
# ---------------------------------------------------------------------------

def _random_index(n: int, rng: np.random.Generator) -> int:
    raw = int.from_bytes(rng.bytes((n + 7) // 8), 'little')
    return raw & ((1 << n) - 1)


def random_points(n: int, d: int, rng: np.random.Generator) -> list[int]:
    """d distinct basis indices below 2**n."""
    if d > 1 << n:
        raise SpecError(f"cannot pick {d} distinct points on {n} qubits")
    if n <= 16:
        return [int(p) for p in rng.choice(1 << n, size=d, replace=False)]
    seen = set()
    points = []
    while len(points) < d:
        p = _random_index(n, rng)
        if p not in seen:
            seen.add(p)
            points.append(p)
    return points


def random_spec(n: int, d: int, rng: np.random.Generator) -> SparseStateSpec:
    """d-sparse state with complex Gaussian amplitudes."""
    points = random_points(n, d, rng)
    amps = rng.normal(size=d) + 1j * rng.normal(size=d)
    amps /= np.linalg.norm(amps)
    return SparseStateSpec.from_pairs(list(zip(amps, points)), n)


def random_permutation(n: int, rng: np.random.Generator, size: Optional[int] = None) -> Permutation:
    """Random permutation of [0, 2**n) moving about `size` points (all when None)."""
    total = 1 << n
    size = total if size is None else min(size, total)
    if size < 2:
        return Permutation.identity(n)
    points = [int(p) for p in rng.choice(total, size=size, replace=False)]
    images = [points[int(i)] for i in rng.permutation(size)]
    return Permutation.from_mapping(n, dict(zip(points, images)))


# ---------------------------------------------------------------------------
# Naive baseline
# ---------------------------------------------------------------------------

def _swap_pair(a: int, b: int, n: int) -> list:
    """Exchange basis states a and b with one (n-1)-controlled X."""
    diff = a ^ b
    pivot = (diff & -diff).bit_length() - 1
    low = a if not (a >> pivot) & 1 else b
    fan = [cx(pivot, k) for k in range(n) if k != pivot and (diff >> k) & 1]
    pattern = [Control(k, bool((low >> k) & 1)) for k in range(n) if k != pivot]
    return fan + [mcx(pattern, pivot)] + fan[::-1]


def naive_baseline(spec: SparseStateSpec) -> Circuit:
    """Dense preparation followed by one full-width MCX per transposition."""
    n = spec.n
    builder = CircuitBuilder(n)
    if spec.d == 1:
        q = spec.points[0]
        builder.extend(x(b) for b in range(n) if (q >> b) & 1)
        return builder.build()
    plan = build_sigma(spec)
    target = packed_amplitudes(spec, plan)
    builder.extend(synth_dense(target).remapped(range(target.k), n).gates)
    for a, b in cycle_decompose(plan.sigma):
        builder.extend(_swap_pair(a, b, n))
    return builder.build()


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------

def bound_no_ancilla(n: int, d: int) -> float:
    return n * d / max(math.log2(n), 1.0) + n


def bound_ancilla(n: int, d: int, m: int, r: int) -> float:
    return n * d / math.log2(m + n) + n * 2 ** r


def bound_naive(n: int, d: int) -> float:
    return float(n * d)


# ---------------------------------------------------------------------------
# Grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BenchCell:
    n: int
    d: int
    m: int = 0
    method: str = 'no_ancilla'

    def __post_init__(self):
        if self.method not in BENCH_METHODS:
            raise SpecError(f"unknown bench method {self.method!r}")


@dataclass
class BenchRecord:
    n: int
    d: int
    m: int
    method: str
    status: str = 'ok'
    raw_count: Optional[int] = None
    expanded_count: Optional[int] = None
    bound: Optional[float] = None
    ratio: Optional[float] = None
    sim_verified: Optional[bool] = None
    wall_time_ms: float = 0.0


@dataclass
class BenchReport:
    records: list[BenchRecord] = field(default_factory=list)
    fitted: dict[str, float] = field(default_factory=dict)
    ratio_spread: dict[str, float] = field(default_factory=dict)


def parse_axis(token: str, n: int) -> int:
    """Grid shorthand: 'n', 'n2', 'n3' or a plain integer."""
    token = token.strip()
    powers = {'n': 1, 'n2': 2, 'n3': 3}
    if token in powers:
        return n ** powers[token]
    try:
        return int(token)
    except ValueError:
        raise FormatError(f"bad grid value {token!r}; use n, n2, n3 or an integer")


def build_grid(ns: Iterable[int], d_tokens: Sequence[str], m_tokens: Sequence[str],
               methods: Sequence[str]) -> list[BenchCell]:
    cells = []
    for n in ns:
        for d_token in d_tokens:
            for m_token in m_tokens:
                for method in methods:
                    cells.append(BenchCell(n, parse_axis(d_token, n), parse_axis(m_token, n), method))
    return cells


def load_grid(text: str) -> list[BenchCell]:
    """JSON list of {"n", "d", "m", "method"} objects."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"grid file is not JSON: {e.msg}", e.lineno)
    if not isinstance(data, list):
        raise FormatError("grid file must hold a list of cells")
    cells = []
    for i, entry in enumerate(data):
        try:
            n = int(entry['n'])
            cells.append(BenchCell(n, parse_axis(str(entry['d']), n),
                                   parse_axis(str(entry.get('m', 0)), n),
                                   entry.get('method', 'no_ancilla')))
        except (KeyError, TypeError, ValueError):
            raise FormatError(f"grid cell {i} needs integer 'n' and 'd'")
    return cells


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

def _synthesize(cell: BenchCell, spec: SparseStateSpec) -> tuple[Circuit, float]:
    if cell.method == 'no_ancilla':
        return synth_no_ancilla(spec), bound_no_ancilla(cell.n, cell.d)
    if cell.method == 'ancilla':
        circuit = synth_with_ancilla(spec, cell.m)
        return circuit, bound_ancilla(cell.n, cell.d, cell.m, choose_r(cell.n, cell.m))
    return naive_baseline(spec), bound_naive(cell.n, cell.d)


def _verify(circuit: Circuit, spec: SparseStateSpec) -> bool:
    state = run(circuit)
    output = project_output(state, spec.n)
    ok = fidelity(output, StateVector.from_spec(spec)) >= FIDELITY_THRESHOLD
    return ok and ancilla_residual(state, spec.n) < ANCILLA_RESIDUAL_TOL


def run_cell(cell: BenchCell, seed: int = 0, verify: bool = True) -> BenchRecord:
    record = BenchRecord(cell.n, cell.d, cell.m, cell.method)
    start = time.perf_counter()
    try:
        rng = np.random.default_rng([seed, cell.n, cell.d, cell.m])
        spec = random_spec(cell.n, cell.d, rng)
        circuit, bound = _synthesize(cell, spec)
        record.raw_count = len(circuit)
        record.expanded_count = count_gates(circuit, ExpandPolicy.EXPAND_ALL_MCX).elementary_total
        record.bound = bound
        record.ratio = record.expanded_count / bound
        if verify and circuit.width <= DENSE_WIDTH_CAP:
            record.sim_verified = _verify(circuit, spec)
            if not record.sim_verified:
                record.status = 'verify_failed'
    except TooFewAncillas:
        record.status = 'infeasible'
    except SparsePrepError as e:
        logger.warning("bench cell %s failed: %s", cell, e)
        record.status = 'invalid'
    record.wall_time_ms = (time.perf_counter() - start) * 1000.0
    logger.info("bench cell n=%d d=%d m=%d %s: %s expanded=%s in %.1f ms",
                cell.n, cell.d, cell.m, cell.method, record.status,
                record.expanded_count, record.wall_time_ms)
    return record


def fit_constants(records: Iterable[BenchRecord]) -> tuple[dict[str, float], dict[str, float]]:
    """Per method: the largest ratio and the spread (max / min) of ratios."""
    ratios: dict[str, list[float]] = {}
    for record in records:
        if record.ratio:
            ratios.setdefault(record.method, []).append(record.ratio)
    fitted = {method: max(values) for method, values in ratios.items()}
    spread = {method: max(values) / min(values) for method, values in ratios.items()}
    return fitted, spread


def run_bench(grid: Sequence[BenchCell], seed: int = 0, workers: int = 1,
              verify: bool = True) -> BenchReport:
    """Run every cell; records come back in grid order."""
    def job(cell):
        return run_cell(cell, seed, verify)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(job, grid))
    else:
        records = [job(cell) for cell in grid]
    fitted, spread = fit_constants(records)
    return BenchReport(records, fitted, spread)


def _csv_value(value) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return format(value, '.6g')
    return str(value)


def write_csv(records: Iterable[BenchRecord], out: Union[str, IO[str]],
              include_timing: bool = True):
    """CSV with one row per record; without timing the output is deterministic."""
    columns = [c for c in CSV_COLUMNS if include_timing or c != 'wall_time_ms']
    if isinstance(out, str):
        with open(out, 'w', newline='') as f:
            write_csv(records, f, include_timing)
        return
    writer = csv.writer(out)
    writer.writerow(columns)
    for record in records:
        row = asdict(record)
        writer.writerow([_csv_value(row[c]) for c in columns])
