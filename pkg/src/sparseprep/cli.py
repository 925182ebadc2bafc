"""
Command Line Interface

Subcommands: synth, verify, permsynth, u2b, bench, count, expand,
random-state, config. Exit codes: 0 success, 1 unreadable input, 2 invalid
specification or permutation, 3 infeasible, 4 too wide to simulate,
5 verification failed.
"""

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

import numpy as np

from . import circuit_io
from .bench import build_grid, load_grid, random_spec, run_bench, write_csv
from .constants import (
    ANCILLA_RESIDUAL_TOL,
    BENCH_METHODS,
    DEFAULT_SETTINGS,
    FIDELITY_THRESHOLD,
    MODES,
    PERMUTATION_WIDTH_CAP,
)
from .core_model import Circuit, ExpandPolicy, count_gates
from .errors import (
    CircuitError,
    FeasibilityError,
    FormatError,
    PermutationError,
    SpecError,
    WidthTooLarge,
)
from .mcx import expand_circuit
from .perm_synth import synth_permutation
from .permutation import EXAMPLE_S8, Permutation
from .settings_manager import SettingsManager, resolve_seed
from .simulator import StateVector, ancilla_residual, fidelity, permutation_action, project_output, run
from .sqsp_ancilla import dispatch, synth_with_ancilla
from .sqsp_core import synth_no_ancilla
from .unary2binary import synth_unary_to_binary

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FORMAT = 1
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_TOO_WIDE = 4
EXIT_VERIFY = 5


class VerificationFailed(Exception):
    pass


def _print_report(circuit: Circuit, policy: ExpandPolicy = ExpandPolicy.EXPAND_ALL_MCX):
    report = count_gates(circuit, policy)
    print(f"qubits: {circuit.width} (ancillas: {circuit.ancilla_count})")
    print(f"raw gates: {len(circuit)} {json.dumps(dict(sorted(report.raw_by_kind.items())))}")
    print(f"{policy.value}: single={report.single_qubit} cnot={report.cnot} "
          f"total={report.elementary_total}")
    if report.unexpanded_by_kind:
        print(f"unexpanded: {json.dumps(dict(sorted(report.unexpanded_by_kind.items())))}")


def _emit(circuit: Circuit, out: Optional[str], expand: bool = False):
    if expand:
        circuit = expand_circuit(circuit, lower_single=True)
    if out:
        circuit_io.write_circuit(circuit, out)
    else:
        sys.stdout.write(circuit_io.dump_circuit(circuit))


def _width_for(groups: list[list[int]], n: Optional[int]) -> int:
    top = max((p for group in groups for p in group), default=1)
    return n if n is not None else max(1, top.bit_length())


def _parse_groups(text: str) -> list[list[int]]:
    groups = []
    for chunk in text.split(';'):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            groups.append([int(v) for v in chunk.replace(',', ' ').split()])
        except ValueError:
            raise FormatError(f"bad point list {chunk!r}")
    return groups


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_synth(args, settings: dict) -> int:
    spec = circuit_io.read_state(args.input)
    mode = args.mode or settings['mode']
    m = settings['ancillas'] if args.m is None else args.m
    strict = args.strict or settings['strict_dispatch']

    if mode == 'no-ancilla':
        circuit = synth_no_ancilla(spec)
    elif mode == 'ancilla':
        circuit = synth_with_ancilla(spec, m)
    else:
        decision, circuit = dispatch(spec, m, strict)
        print(f"dispatch: {decision.path} (no-ancilla size {decision.no_ancilla_size}, "
              f"ancilla size {decision.ancilla_size})")

    _emit(circuit, args.out, args.expand or settings['expand_output'])
    _print_report(circuit)
    return EXIT_OK


def cmd_verify(args, settings: dict) -> int:
    circuit = circuit_io.read_circuit(args.circuit)
    spec = circuit_io.read_state(args.state)
    state = run(circuit)
    output = project_output(state, spec.n)
    value = fidelity(output, StateVector.from_spec(spec))
    residual = ancilla_residual(state, spec.n)
    print(f"fidelity: {value:.12f}")
    print(f"ancilla residual: {residual:.3e}")
    if value < FIDELITY_THRESHOLD or residual >= ANCILLA_RESIDUAL_TOL:
        raise VerificationFailed(f"fidelity {value:.12f}, ancilla residual {residual:.3e}")
    print("OK")
    return EXIT_OK


def cmd_permsynth(args, settings: dict) -> int:
    if args.example:
        sigma = EXAMPLE_S8
    elif args.cycles is not None:
        groups = _parse_groups(args.cycles)
        sigma = Permutation.from_cycles(_width_for(groups, args.n), groups)
    elif args.pairs is not None:
        groups = _parse_groups(args.pairs)
        sigma = Permutation.from_pairs(_width_for(groups, args.n), groups)
    else:
        raise FormatError("give --cycles, --pairs or --example")
    n = sigma.n if args.n is None else max(args.n, sigma.n)
    circuit = synth_permutation(sigma, n, m_cap=args.m_cap)
    _emit(circuit, args.out, args.expand)
    if args.out:
        _print_report(circuit)
    if n <= PERMUTATION_WIDTH_CAP:
        exact = permutation_action(circuit, sigma.support) == {p: sigma(p) for p in sigma.support}
        logger.info("permutation check: %s", "exact" if exact else "MISMATCH")
        if not exact:
            raise VerificationFailed("synthesized circuit does not implement the permutation")
    return EXIT_OK


def cmd_u2b(args, settings: dict) -> int:
    circuit = synth_unary_to_binary(args.w)
    _emit(circuit, args.out, args.expand)
    if args.out:
        _print_report(circuit)
    return EXIT_OK


def cmd_count(args, settings: dict) -> int:
    circuit = circuit_io.read_circuit(args.circuit)
    _print_report(circuit, ExpandPolicy(args.policy))
    return EXIT_OK


def cmd_expand(args, settings: dict) -> int:
    circuit = circuit_io.read_circuit(args.circuit)
    _emit(circuit, args.out, expand=True)
    return EXIT_OK


def cmd_random_state(args, settings: dict) -> int:
    seed = resolve_seed(args.seed, settings)
    spec = random_spec(args.n, args.d, np.random.default_rng([seed, args.n, args.d]))
    if args.out:
        circuit_io.write_state(spec, args.out)
    else:
        print(circuit_io.dump_state(spec))
    return EXIT_OK


def cmd_config(args, settings: dict) -> int:
    manager = SettingsManager(args.settings_dir)
    manager.load()
    changes = {key: value for key, value in (
        ('mode', args.mode),
        ('ancillas', args.m),
        ('strict_dispatch', args.strict),
        ('bench_workers', args.workers),
        ('seed', args.seed),
        ('expand_output', args.expand),
    ) if value is not None}
    if changes:
        rejected = manager.update(changes)
        if rejected:
            raise SpecError(f"invalid settings: {', '.join(sorted(rejected))}")
        manager.save()
        print(f"Saved {manager.path}")
    for key in DEFAULT_SETTINGS:
        print(f"{key} = {json.dumps(manager.get(key))}")
    return EXIT_OK


def cmd_bench(args, settings: dict) -> int:
    if args.grid:
        with open(args.grid, 'r') as f:
            grid = load_grid(f.read())
    elif args.n:
        try:
            ns = [int(v) for v in args.n.split(',')]
        except ValueError:
            raise FormatError(f"bad --n list {args.n!r}")
        grid = build_grid(ns, args.d.split(','), args.m.split(','), args.method.split(','))
    else:
        grid = []

    seed = resolve_seed(args.seed, settings)
    workers = args.workers or settings['bench_workers'] or 1
    report = run_bench(grid, seed, workers, verify=not args.no_verify)
    if args.out:
        write_csv(report.records, args.out, include_timing=not args.no_timing)
    else:
        write_csv(report.records, sys.stdout, include_timing=not args.no_timing)
    for method in sorted(report.fitted):
        print(f"{method}: C = {report.fitted[method]:.4g}, ratio spread = "
              f"{report.ratio_spread[method]:.3f}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparseprep",
        description="Synthesize circuits that prepare sparse quantum states",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for synthesis details")
    parser.add_argument("--settings-dir", default=".",
                        help="directory holding sparseprep_settings.json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a preparation circuit for a state file")
    p.add_argument("--in", dest="input", required=True, help="state file (JSON)")
    p.add_argument("--out", required=True, help="circuit file")
    p.add_argument("--mode", choices=MODES, default=None,
                   help="synthesis path (default: saved setting)")
    p.add_argument("--m", type=int, default=None, help="available ancilla qubits")
    p.add_argument("--strict", action="store_true",
                   help="auto mode: use the asymptotic regime thresholds")
    p.add_argument("--expand", action="store_true",
                   help="write x/cx/ccx/ry/rz gates only")
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("verify", help="simulate a circuit against a state file")
    p.add_argument("--circuit", required=True)
    p.add_argument("--state", required=True)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("permsynth", help="circuit for a permutation of basis states")
    p.add_argument("--n", type=int, default=None, help="qubit count")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--cycles", help='cycles, e.g. "0 1 5 7; 2 4"')
    group.add_argument("--pairs", help='disjoint transpositions, e.g. "0 7; 1 5"')
    group.add_argument("--example", action="store_true",
                       help="the three-bit permutation (0 1 5 7)(2 4)")
    p.add_argument("--m-cap", type=int, default=None, help="transpositions per batch")
    p.add_argument("--out")
    p.add_argument("--expand", action="store_true")
    p.set_defaults(handler=cmd_permsynth)

    p = sub.add_parser("u2b", help="unary to binary conversion circuit")
    p.add_argument("--w", type=int, required=True, help="binary register width")
    p.add_argument("--out")
    p.add_argument("--expand", action="store_true")
    p.set_defaults(handler=cmd_u2b)

    p = sub.add_parser("bench", help="gate-count scaling benchmark")
    p.add_argument("--grid", help="JSON grid file")
    p.add_argument("--n", help="comma separated qubit counts")
    p.add_argument("--d", default="n", help="sparsity: n, n2, n3 or integers")
    p.add_argument("--m", default="0", help="ancillas: 0, n2, n3 or integers")
    p.add_argument("--method", default="no_ancilla",
                   help=f"comma separated methods out of {', '.join(BENCH_METHODS)}")
    p.add_argument("--out", help="CSV file (default: standard output)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--no-verify", action="store_true", help="count only")
    p.add_argument("--no-timing", action="store_true", help="omit wall_time_ms")
    p.set_defaults(handler=cmd_bench)

    p = sub.add_parser("count", help="gate counts of a circuit file")
    p.add_argument("circuit")
    p.add_argument("--policy", choices=[e.value for e in ExpandPolicy],
                   default=ExpandPolicy.EXPAND_ALL_MCX.value)
    p.set_defaults(handler=cmd_count)

    p = sub.add_parser("expand", help="lower a circuit file to x/cx/ccx/ry/rz")
    p.add_argument("circuit")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_expand)

    p = sub.add_parser("random-state", help="write a random sparse state file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_random_state)

    p = sub.add_parser("config", help="show or change the saved defaults")
    p.add_argument("--mode", choices=MODES, default=None)
    p.add_argument("--m", type=int, default=None, help="default ancilla budget")
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--workers", type=int, default=None, help="bench worker threads")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--expand", action=argparse.BooleanOptionalAction, default=None,
                   help="write lowered circuits by default")
    p.set_defaults(handler=cmd_config)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    settings = SettingsManager(args.settings_dir).load()

    try:
        return args.handler(args, settings)
    except (FormatError, json.JSONDecodeError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FORMAT
    except WidthTooLarge as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_TOO_WIDE
    except FeasibilityError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (SpecError, PermutationError, CircuitError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except VerificationFailed as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
