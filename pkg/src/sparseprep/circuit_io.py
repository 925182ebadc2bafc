"""
Circuit and State Files

State files are JSON:
    {"n": 3, "entries": [{"q": "101", "re": 0.7071, "im": 0.0}, ...]}
with q written most significant bit first.

Circuit files are line-oriented text:
    qubits <width> ancillas <m>
    x <t> | cx <c> <t> | ccx <c1> <c2> <t> | swap <a> <b>
    ry|rz|rx <theta> <t> | g <re> <im> <beta> <t>
    mcx <c>... <t>                  (a leading '-' marks a negative control)
    mcu <base> <params>... <c>... <t>
Blank lines and '#' comments are ignored. Numbers are written with 17
significant digits so files reload bit for bit.
"""

import json
import logging

from .core_model import (
    Circuit,
    Control,
    Gate,
    GateKind,
    SparseStateSpec,
    format_bitstring,
    validate_spec,
)
from .errors import FormatError, SparsePrepError

logger = logging.getLogger(__name__)

_PARAM_COUNT = {
    GateKind.X: 0,
    GateKind.RY: 1,
    GateKind.RZ: 1,
    GateKind.RX: 1,
    GateKind.G: 3,
}
_SINGLE_BY_NAME = {kind.value: kind for kind in _PARAM_COUNT}


def _num(value: float) -> str:
    return format(float(value), '.17g')


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

def dump_state(spec: SparseStateSpec) -> str:
    entries = [
        {'q': format_bitstring(q, spec.n), 're': float(amp.real), 'im': float(amp.imag)}
        for amp, q in spec.entries
    ]
    return json.dumps({'n': spec.n, 'entries': entries}, indent=2)


def load_state(text: str) -> SparseStateSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"state file is not JSON: {e.msg}", e.lineno)
    if not isinstance(data, dict) or 'n' not in data or 'entries' not in data:
        raise FormatError("state file needs 'n' and 'entries'")
    if not isinstance(data['entries'], list):
        raise FormatError("'entries' must be a list")

    pairs = []
    for i, entry in enumerate(data['entries']):
        try:
            amp = complex(float(entry['re']), float(entry.get('im', 0.0)))
            q = entry['q']
        except (KeyError, TypeError, ValueError, AttributeError):
            raise FormatError(f"entry {i} needs 'q', 're' and optionally 'im'")
        pairs.append((amp, q))
    return validate_spec(pairs, data['n'])


def read_state(path: str) -> SparseStateSpec:
    with open(path, 'r') as f:
        return load_state(f.read())


def write_state(spec: SparseStateSpec, path: str):
    with open(path, 'w') as f:
        f.write(dump_state(spec) + '\n')


# ---------------------------------------------------------------------------
# Circuits
# ---------------------------------------------------------------------------

def _controls(gate: Gate) -> list[str]:
    return [('' if c.positive else '-') + str(c.qubit) for c in gate.controls]


def format_gate(gate: Gate) -> str:
    kind = gate.kind
    if kind is GateKind.X:
        return f"x {gate.target}"
    if kind is GateKind.CNOT:
        return f"cx {gate.controls[0].qubit} {gate.target}"
    if kind is GateKind.SWAP:
        return f"swap {gate.targets[0]} {gate.targets[1]}"
    if kind in (GateKind.RY, GateKind.RZ, GateKind.RX):
        return f"{kind.value} {_num(gate.params[0])} {gate.target}"
    if kind is GateKind.G:
        return f"g {' '.join(_num(p) for p in gate.params)} {gate.target}"
    if kind is GateKind.MCX:
        if len(gate.controls) == 2 and all(c.positive for c in gate.controls):
            return f"ccx {' '.join(_controls(gate))} {gate.target}"
        return ' '.join(['mcx'] + _controls(gate) + [str(gate.target)])
    base = gate.base
    words = ['mcu', base.kind.value] + [_num(p) for p in base.params]
    return ' '.join(words + _controls(gate) + [str(gate.target)])


def dump_circuit(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.width} ancillas {circuit.ancilla_count}"]
    lines.extend(format_gate(gate) for gate in circuit.gates)
    return '\n'.join(lines) + '\n'


def _qubit(token: str, lineno: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise FormatError(f"expected a qubit index, got {token!r}", lineno)
    if value < 0:
        raise FormatError(f"negative qubit index {value}", lineno)
    return value


def _control(token: str, lineno: int) -> Control:
    if token.startswith('-'):
        return Control(_qubit(token[1:], lineno), False)
    return Control(_qubit(token, lineno), True)


def _floats(tokens: list[str], lineno: int) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in tokens)
    except ValueError:
        raise FormatError(f"expected numbers, got {tokens}", lineno)


def _arity(name: str, args: list[str], count: int, lineno: int):
    if len(args) != count:
        raise FormatError(f"'{name}' takes {count} arguments, got {len(args)}", lineno)


def _single(kind: GateKind, params: tuple[float, ...], target: int) -> Gate:
    return Gate(kind, (target,), params=params)


def parse_gate(line: str, lineno: int = 0) -> Gate:
    name, *args = line.split()
    if name == 'x':
        _arity(name, args, 1, lineno)
        return Gate(GateKind.X, (_qubit(args[0], lineno),))
    if name == 'cx':
        _arity(name, args, 2, lineno)
        return Gate(GateKind.CNOT, (_qubit(args[1], lineno),), (Control(_qubit(args[0], lineno)),))
    if name == 'ccx':
        _arity(name, args, 3, lineno)
        controls = (Control(_qubit(args[0], lineno)), Control(_qubit(args[1], lineno)))
        return Gate(GateKind.MCX, (_qubit(args[2], lineno),), controls)
    if name == 'swap':
        _arity(name, args, 2, lineno)
        return Gate(GateKind.SWAP, (_qubit(args[0], lineno), _qubit(args[1], lineno)))
    if name in ('ry', 'rz', 'rx', 'g'):
        kind = _SINGLE_BY_NAME[name]
        count = _PARAM_COUNT[kind]
        _arity(name, args, count + 1, lineno)
        return _single(kind, _floats(args[:count], lineno), _qubit(args[count], lineno))
    if name == 'mcx':
        if not args:
            raise FormatError("'mcx' needs a target", lineno)
        controls = tuple(_control(t, lineno) for t in args[:-1])
        return Gate(GateKind.MCX, (_qubit(args[-1], lineno),), controls)
    if name == 'mcu':
        if not args or args[0] not in _SINGLE_BY_NAME:
            raise FormatError(f"'mcu' needs a base gate out of {sorted(_SINGLE_BY_NAME)}", lineno)
        kind = _SINGLE_BY_NAME[args[0]]
        count = _PARAM_COUNT[kind]
        rest = args[1:]
        if len(rest) < count + 1:
            raise FormatError(f"'mcu {args[0]}' needs {count} parameters and a target", lineno)
        params = _floats(rest[:count], lineno)
        target = _qubit(rest[-1], lineno)
        controls = tuple(_control(t, lineno) for t in rest[count:-1])
        return Gate(GateKind.MCU, (target,), controls, base=_single(kind, params, target))
    raise FormatError(f"unknown gate {name!r}", lineno)


def parse_circuit(text: str) -> Circuit:
    width = ancillas = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if width is None:
            words = line.split()
            if len(words) != 4 or words[0] != 'qubits' or words[2] != 'ancillas':
                raise FormatError("expected header 'qubits <width> ancillas <m>'", lineno)
            try:
                width, ancillas = int(words[1]), int(words[3])
            except ValueError:
                raise FormatError("header counts must be integers", lineno)
            continue
        try:
            gates.append(parse_gate(line, lineno))
        except FormatError:
            raise
        except SparsePrepError as e:
            raise FormatError(str(e), lineno)
    if width is None:
        raise FormatError("circuit file has no header")
    try:
        return Circuit(width, tuple(gates), ancillas)
    except SparsePrepError as e:
        raise FormatError(str(e))


def read_circuit(path: str) -> Circuit:
    with open(path, 'r') as f:
        return parse_circuit(f.read())


def write_circuit(circuit: Circuit, path: str):
    with open(path, 'w') as f:
        f.write(dump_circuit(circuit))
    logger.debug("wrote %d gates to %s", len(circuit), path)
