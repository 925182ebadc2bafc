import math

import pytest

from sparseprep.core_model import ExpandPolicy, count_gates, validate_spec
from sparseprep.errors import TooFewAncillas
from sparseprep.simulator import fidelity, project_output, run
from sparseprep.sqsp_ancilla import (
    ANCILLA,
    NO_ANCILLA,
    AncillaLayout,
    ancilla_usage,
    choose_r,
    dispatch,
    synth_auto,
    synth_with_ancilla,
)

H = 1 / math.sqrt(2)


class TestChooseR:
    @pytest.mark.parametrize("n,m,r", [
        (4, 64, 4), (8, 8, None), (8, 64, 3), (2, 8, 2), (4, 16, 2),
        (4, 0, None), (12, 4, None), (4, 8, None), (4, 9, 1), (3, 1000, 3),
    ])
    def test_examples(self, n, m, r):
        assert choose_r(n, m) == r

    @pytest.mark.parametrize("n", [2, 5, 8, 13, 32])
    def test_usage_fits(self, n):
        for m in range(0, 4 * n * n, 7):
            r = choose_r(n, m)
            if r is not None:
                assert ancilla_usage(n, r) <= m


class TestAncillaLayout:
    def test_registers(self):
        layout = AncillaLayout(8, 3)
        assert layout.r_blocks == ((0, 1, 2), (3, 4, 5), (6, 7))
        assert [len(b) for b in layout.m_blocks] == [8, 8, 4]
        assert layout.m_blocks[0][0] == 8
        assert layout.ancilla_count == 21
        assert layout.width == 29
        assert layout.flag == 28

    def test_as_dict(self):
        layout = AncillaLayout(2, 1).as_dict()
        assert layout == {'R': (0, 1), 'M': (2, 3, 4, 5), 'flag': (6,)}


class TestSynthWithAncilla:
    def test_ghz(self, prepared):
        spec = validate_spec([(H, "00"), (H, "11")], 2)
        circuit = synth_with_ancilla(spec, 8)
        assert circuit.width == 7
        assert circuit.ancilla_count == 5
        fid, residual = prepared(circuit, spec)
        assert fid >= 1 - 1e-9
        assert residual < 1e-10

    def test_basis_state(self, prepared):
        spec = validate_spec([(1j, "101")], 3)
        circuit = synth_with_ancilla(spec, 8)
        assert circuit.width == 10
        assert abs(run(circuit).amps[5]) == pytest.approx(1.0)

    def test_spare_ancillas_unused(self):
        spec = validate_spec([(H, 1), (H, 2)], 2)
        assert synth_with_ancilla(spec, 100).ancilla_count == 5

    def test_too_few(self):
        spec = validate_spec([(H, 1), (H, 2)], 4)
        with pytest.raises(TooFewAncillas):
            synth_with_ancilla(spec, 2)
        with pytest.raises(TooFewAncillas):
            synth_with_ancilla(spec, 8)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_random(self, n, make_spec, prepared):
        for r in range(1, n + 1):
            m = ancilla_usage(n, r)
            if n + m > 20:
                continue
            spec = make_spec(n, min(1 << n, 6))
            circuit = synth_with_ancilla(spec, m)
            assert circuit.width - n <= m
            fid, residual = prepared(circuit, spec)
            assert fid >= 1 - 1e-9
            assert residual < 1e-10

    @pytest.mark.slow
    def test_random_many(self, rng, prepared):
        from sparseprep.bench import random_spec
        for _ in range(200):
            n = int(rng.integers(2, 7))
            fitting = [r for r in range(1, n + 1) if n + ancilla_usage(n, r) <= 20]
            m = ancilla_usage(n, int(rng.choice(fitting)))
            spec = random_spec(n, int(rng.integers(1, (1 << n) + 1)), rng)
            circuit = synth_with_ancilla(spec, m)
            assert circuit.width - n <= m
            fid, residual = prepared(circuit, spec)
            assert fid >= 1 - 1e-9
            assert residual < 1e-10

    def test_expanded(self, make_spec, prepared):
        spec = make_spec(4, 5)
        circuit = synth_with_ancilla(spec, 9)
        fid, residual = prepared(circuit, spec, expand=True)
        assert fid >= 1 - 1e-9
        assert residual < 1e-10

    def test_matches_no_ancilla_output(self, make_spec):
        from sparseprep.sqsp_core import synth_no_ancilla
        spec = make_spec(4, 4)
        wide = project_output(run(synth_with_ancilla(spec, 16)), 4)
        assert fidelity(wide, run(synth_no_ancilla(spec))) >= 1 - 1e-9


class TestDispatch:
    def test_no_ancillas(self, make_spec):
        decision, circuit = dispatch(make_spec(5, 6), 0)
        assert decision.path == NO_ANCILLA
        assert decision.ancilla_size is None
        assert circuit.width == 5

    def test_too_few_for_a_layout(self, make_spec):
        decision, circuit = dispatch(make_spec(12, 2), 4)
        assert decision.path == NO_ANCILLA
        assert circuit.ancilla_count == 0

    def test_smaller_circuit_wins(self, make_spec, prepared):
        spec = make_spec(4, 8)
        decision, circuit = dispatch(spec, 32)
        assert decision.r == 3
        # four output qubits: the unary register alone outweighs the permutation
        assert decision.path == NO_ANCILLA
        assert decision.no_ancilla_size < decision.ancilla_size
        assert count_gates(circuit, ExpandPolicy.EXPAND_ALL_MCX).elementary_total == decision.no_ancilla_size
        assert circuit.width == 4
        assert prepared(circuit, spec)[0] >= 1 - 1e-9

    def test_same_cell_strict_takes_ancillas(self, make_spec, prepared):
        spec = make_spec(4, 8)
        decision, circuit = dispatch(spec, 32, strict=True)
        assert decision.path == ANCILLA
        assert circuit.ancilla_count > 0
        fid, residual = prepared(circuit, spec)
        assert fid >= 1 - 1e-9 and residual < 1e-10

    def test_strict_regime(self, make_spec, prepared):
        spec = make_spec(4, 8)
        decision, circuit = dispatch(spec, 16, strict=True)
        assert decision.strict
        assert decision.path == ANCILLA
        assert decision.no_ancilla_size is None
        fid, residual = prepared(circuit, spec)
        assert fid >= 1 - 1e-9 and residual < 1e-10

    def test_strict_outside_regime(self, make_spec):
        decision, circuit = dispatch(make_spec(4, 4), 16, strict=True)
        assert decision.path == NO_ANCILLA
        assert circuit.width == 4

    def test_synth_auto(self, make_spec, prepared):
        spec = make_spec(3, 5)
        assert prepared(synth_auto(spec, 24), spec)[0] >= 1 - 1e-9
