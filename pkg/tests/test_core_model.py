import math

import numpy as np
import pytest

from sparseprep.core_model import (
    Circuit,
    CircuitBuilder,
    Control,
    ExpandPolicy,
    Gate,
    GateKind,
    SparseStateSpec,
    controlled_x,
    count_gates,
    cx,
    format_bitstring,
    g,
    mcu,
    mcx,
    parse_bitstring,
    ry,
    rz,
    swap,
    validate_spec,
    x,
)
from sparseprep.errors import (
    BadWidth,
    CircuitError,
    DomainError,
    DuplicateBasis,
    NotClassical,
    NotNormalized,
    OverlappingQubits,
    WidthMismatch,
)

H = 1 / math.sqrt(2)


class TestBitstrings:
    def test_msb_first(self):
        assert parse_bitstring("011", 3) == 3
        assert parse_bitstring("100", 3) == 4
        assert format_bitstring(4, 3) == "100"

    def test_spaces_and_underscores_ignored(self):
        assert parse_bitstring("0001 0100", 8) == 20
        assert parse_bitstring("10_01", 4) == 9

    def test_integer_labels(self):
        assert parse_bitstring(7, 3) == 7
        assert parse_bitstring(np.int64(5), 3) == 5

    @pytest.mark.parametrize("label", ["01", "0120", 8, -1, True, 1.0])
    def test_bad_labels(self, label):
        with pytest.raises(BadWidth):
            parse_bitstring(label, 3)


class TestValidateSpec:
    def test_bell_pair(self):
        spec = validate_spec([(H, "00"), (H, "11")], 2)
        assert spec.n == 2
        assert spec.d == 2
        assert spec.points == (0, 3)
        np.testing.assert_allclose(spec.to_statevector(), [H, 0, 0, H])

    def test_from_pairs_matches_validate(self):
        pairs = [(0.6, "10"), (0.8j, "01")]
        assert SparseStateSpec.from_pairs(pairs, 2) == validate_spec(pairs, 2)

    def test_entries_keep_input_order(self):
        spec = validate_spec([(0.6, 5), (0.8, 1)], 3)
        assert spec.points == (5, 1)
        assert [q for _, q in spec.sorted_entries()] == [1, 5]

    def test_duplicate(self):
        with pytest.raises(DuplicateBasis):
            validate_spec([(H, "01"), (H, 1)], 2)

    def test_not_normalized(self):
        with pytest.raises(NotNormalized):
            validate_spec([(0.5, 0), (0.5, 1)], 1)

    def test_tolerance(self):
        validate_spec([(1.0 + 1e-12, 0)], 1)

    @pytest.mark.parametrize("n", [0, -2, 2.5, True])
    def test_bad_width(self, n):
        with pytest.raises(BadWidth):
            validate_spec([(1.0, 0)], n)

    def test_empty(self):
        with pytest.raises(BadWidth):
            validate_spec([], 3)

    def test_point_out_of_range(self):
        with pytest.raises(BadWidth):
            validate_spec([(1.0, 8)], 3)

    def test_embed_wider(self):
        spec = validate_spec([(1.0, 2)], 2)
        vec = spec.to_statevector(4)
        assert vec.size == 16 and vec[2] == 1
        with pytest.raises(WidthMismatch):
            spec.to_statevector(1)


class TestGate:
    def test_factories(self):
        assert x(3).kind is GateKind.X
        assert cx(0, 1).controls == (Control(0, True),)
        assert swap(1, 2).targets == (1, 2)
        assert ry(0.5, 0).params == (0.5,)

    def test_controlled_x_normalizes(self):
        assert controlled_x([], 2).kind is GateKind.X
        assert controlled_x([0], 2).kind is GateKind.CNOT
        assert controlled_x([Control(0, False)], 2).kind is GateKind.MCX
        assert controlled_x([0, 1], 2).kind is GateKind.MCX

    def test_overlap(self):
        with pytest.raises(OverlappingQubits):
            mcx([0, 1], 1)
        with pytest.raises(OverlappingQubits):
            swap(2, 2)

    def test_shape_checks(self):
        with pytest.raises(CircuitError):
            Gate(GateKind.CNOT, (1,), (Control(0, False),))
        with pytest.raises(CircuitError):
            Gate(GateKind.RY, (0,))
        with pytest.raises(CircuitError):
            Gate(GateKind.X, (0,), (Control(1),))
        with pytest.raises(CircuitError):
            Gate(GateKind.MCU, (0,), (Control(1),))

    def test_g_domain(self):
        gate = g(0.3 + 0.4j, 0.5, 0)
        assert gate.alpha == pytest.approx(0.3 + 0.4j)
        assert gate.beta == 0.5
        with pytest.raises(DomainError):
            g(0.6, 0.5, 0)
        with pytest.raises(DomainError):
            g(0.0, 0.0, 0)

    def test_apply_classical(self):
        assert x(1).apply_classical(0b000) == 0b010
        assert cx(0, 2).apply_classical(0b001) == 0b101
        assert cx(0, 2).apply_classical(0b000) == 0b000
        assert swap(0, 2).apply_classical(0b001) == 0b100
        neg = mcx([Control(0, False), Control(1, True)], 2)
        assert neg.apply_classical(0b010) == 0b110
        assert neg.apply_classical(0b011) == 0b011
        with pytest.raises(NotClassical):
            ry(0.1, 0).apply_classical(0)

    def test_remap_moves_mcu_base(self):
        gate = mcu(ry(0.3, 1), [Control(0, False)])
        moved = gate.remapped({0: 5, 1: 7})
        assert moved.target == 7
        assert moved.base.target == 7
        assert moved.controls == (Control(5, False),)

    def test_matrices_unitary(self):
        for gate in (x(0), ry(0.7, 0), rz(1.1, 0), g(0.2 - 0.1j, 0.9, 0)):
            u = gate.matrix()
            np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-12)


class TestCircuit:
    def test_width_check(self):
        with pytest.raises(CircuitError):
            Circuit(2, (cx(0, 2),))
        with pytest.raises(CircuitError):
            Circuit(2, (), 3)

    def test_concat_and_mismatch(self):
        a = Circuit(3, (x(0),))
        b = Circuit(3, (cx(0, 1),), 1)
        joined = a + b
        assert len(joined) == 2
        assert joined.ancilla_count == 1
        assert list(joined.ancilla_qubits) == [2]
        with pytest.raises(WidthMismatch):
            a.concat(Circuit(4))

    def test_inverse(self):
        c = Circuit(2, (ry(0.3, 0), cx(0, 1), mcu(rz(0.2, 1), [0])))
        inv = c.inverse()
        assert inv.gates[0].base.params == (-0.2,)
        assert inv.gates[1] == cx(0, 1)
        assert inv.gates[2].params == (-0.3,)
        with pytest.raises(CircuitError):
            Circuit(1, (g(0.5, 1.0, 0),)).inverse()

    def test_is_classical(self):
        assert Circuit(3, (x(0), swap(1, 2), mcx([0, 1], 2))).is_classical
        assert not Circuit(1, (ry(0.1, 0),)).is_classical

    def test_builder(self):
        builder = CircuitBuilder(3)
        builder.append(x(0))
        builder.extend([cx(0, 1), cx(1, 2)])
        circuit = builder.build(1, {'flag': (2,)})
        assert len(circuit) == 3
        assert circuit.layout['flag'] == (2,)


class TestCountGates:
    def circuit(self):
        return Circuit(6, (
            x(0), ry(0.2, 1), cx(0, 1), swap(2, 3),
            mcx([Control(0, False), 1], 2),
            mcx([0, 1, 2, 3], 4),
            mcu(ry(0.5, 5), [0, 1]),
        ))

    def test_raw(self):
        report = count_gates(self.circuit())
        assert report.raw_by_kind == {'X': 1, 'RY': 1, 'CNOT': 1, 'SWAP': 1, 'MCX': 2, 'MCU': 1}
        assert report.single_qubit == 2
        assert report.cnot == 1
        assert report.unexpanded_by_kind == {'SWAP': 1, 'MCX': 2, 'MCU': 1}

    def test_expand_toffoli(self):
        report = count_gates(self.circuit(), ExpandPolicy.EXPAND_TOFFOLI)
        # negative-control Toffoli: two X flips plus 10 single + 6 CNOT
        assert report.single_qubit == 2 + 2 + 10
        assert report.cnot == 1 + 3 + 6
        assert report.unexpanded_by_kind == {'MCX': 1, 'MCU': 1}

    def test_expand_all_leaves_nothing(self):
        report = count_gates(self.circuit(), ExpandPolicy.EXPAND_ALL_MCX)
        assert report.unexpanded_by_kind == {}
        assert report.elementary_total > count_gates(self.circuit(), ExpandPolicy.EXPAND_TOFFOLI).elementary_total

    def test_policy_from_string(self):
        assert count_gates(Circuit(1, (x(0),)), 'expand_toffoli').policy is ExpandPolicy.EXPAND_TOFFOLI

    def test_reports_add(self):
        a = count_gates(Circuit(2, (x(0), cx(0, 1))))
        total = a + a
        assert total.raw_by_kind == {'X': 2, 'CNOT': 2}
        assert total.as_dict()['elementary_total'] == 4
