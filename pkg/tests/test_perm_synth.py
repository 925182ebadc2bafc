import pytest

from sparseprep.core_model import Control, ExpandPolicy, GateKind, count_gates
from sparseprep.errors import BadWidth, BatchTooLarge, NotPowerOfTwo
from sparseprep.perm_synth import BatchMatrix, synth_batch, synth_permutation
from sparseprep.permutation import EXAMPLE_S8, Permutation, TranspositionSet
from sparseprep.simulator import permutation_action


def random_batch(rng, n, size):
    points = [int(p) for p in rng.choice(1 << n, size=2 * size, replace=False)]
    return TranspositionSet(tuple(zip(points[0::2], points[1::2])))


def wide_batch(rng, n, size, inside=3):
    """Batch on n > 63 bits with `inside` of its points in the low block."""
    points = [int(p) for p in rng.choice(2 * size, size=inside, replace=False)]
    while len(points) < 2 * size:
        p = int.from_bytes(rng.bytes((n + 7) // 8), "little") % (1 << n)
        if p not in points:
            points.append(p)
    order = [int(i) for i in rng.permutation(2 * size)]
    points = [points[i] for i in order]
    return TranspositionSet(tuple(zip(points[0::2], points[1::2])))


def replay(gates, value):
    for gate in gates:
        value = gate.apply_classical(value)
    return value


# Elementary gates per qubit allowed for one batch once every MCX is expanded
BATCH_COST_PER_QUBIT = 256


class TestBatchMatrix:
    def test_columns(self):
        matrix = BatchMatrix([0b101, 0b011], 3)
        assert matrix.column(0) == 0b11
        assert matrix.column(1) == 0b10
        assert matrix.column(2) == 0b01
        assert matrix.ell == 3

    def test_duplicate_columns_counted_once(self):
        matrix = BatchMatrix([0b11, 0b00], 2)
        assert matrix.ell == 1

    def test_reduced(self):
        assert BatchMatrix([0, 1, 2, 3], 4).is_reduced()
        assert not BatchMatrix([1, 0], 2).is_reduced()


class TestSynthBatch:
    @pytest.mark.parametrize("a", range(8))
    def test_every_pair_on_three_qubits(self, a):
        for b in range(a + 1, 8):
            circuit = synth_batch([(a, b)], 3)
            assert permutation_action(circuit) == Permutation.from_pairs(3, [(a, b)])

    def test_single_qubit(self):
        circuit = synth_batch([(0, 1)], 1)
        assert [gate.kind for gate in circuit] == [GateKind.X]

    def test_empty(self):
        assert len(synth_batch(TranspositionSet(), 5)) == 0

    def test_batch_of_two(self, rng):
        for _ in range(5):
            batch = random_batch(rng, 16, 2)
            circuit = synth_batch(batch, 16)
            assert permutation_action(circuit) == batch.as_permutation(16)

    def test_is_palindrome_around_block_swap(self, rng):
        batch = random_batch(rng, 10, 1)
        gates = synth_batch(batch, 10).gates
        middle = len(gates) // 2
        assert gates[:middle] == gates[middle + 1:][::-1]

    def test_trace_ends_reduced(self, rng):
        seen = []
        batch = random_batch(rng, 16, 2)
        synth_batch(batch, 16, trace=lambda gate, matrix: seen.append(list(matrix.rows)))
        assert seen
        assert seen[-1] == [0, 1, 2, 3]
        assert all(len(set(rows)) == 4 for rows in seen)

    def test_rows_track_the_circuit_so_far(self, rng):
        for _ in range(5):
            batch = random_batch(rng, 16, 2)
            emitted = []

            def check(gate, matrix):
                emitted.append(gate)
                assert matrix.rows == [replay(emitted, p) for p in batch.points]

            synth_batch(batch, 16, trace=check)
            assert emitted

    def test_block_row_raised_without_touching_finished_rows(self):
        steps = []
        synth_batch([(0, 1), (3, 2)], 16, trace=lambda gate, matrix: steps.append((gate, list(matrix.rows))))
        first, rows = steps[0]
        assert first.kind is GateKind.MCX
        assert first.target == 2
        assert set(first.controls) == {Control(0, True), Control(1, True)}
        assert rows == [0, 1, 7, 2]
        assert all(rows[:2] == [0, 1] for _, rows in steps)
        assert steps[-1][1] == [0, 1, 2, 3]

    def test_negative_pattern_in_wide_block(self):
        points = [0, 1, 2, 3, 4, 6, 5, 7]
        steps = []
        batch = TranspositionSet(tuple(zip(points[0::2], points[1::2])))
        circuit = synth_batch(batch, 256, trace=lambda gate, matrix: steps.append((gate, list(matrix.rows))))
        first, rows = steps[0]
        assert set(first.controls) == {Control(0, False), Control(1, True), Control(2, True)}
        assert first.target == 3
        assert rows[:5] == [0, 1, 2, 3, 4]
        assert rows[5] == 14
        assert all(rows[:5] == [0, 1, 2, 3, 4] for _, rows in steps)
        assert permutation_action(circuit, points) == {p: batch.as_permutation(256)(p) for p in points}

    @pytest.mark.parametrize("n", [256, 300])
    def test_batch_of_four(self, rng, n):
        for inside in (0, 3, 5):
            batch = wide_batch(rng, n, 4, inside)
            circuit = synth_batch(batch, n)
            sigma = batch.as_permutation(n)
            bystanders = [p for p in range(8) if p not in batch.points] + [(1 << n) - 1]
            images = permutation_action(circuit, batch.points + bystanders)
            assert all(images[p] == sigma(p) for p in batch.points)
            assert all(images[p] == p for p in bystanders if p not in batch.points)

    @pytest.mark.parametrize("n,size", [(16, 2), (32, 2), (64, 2), (128, 2), (256, 2), (256, 4)])
    def test_expanded_cost_linear_in_width(self, rng, n, size):
        for _ in range(3):
            batch = wide_batch(rng, n, size, inside=1)
            total = count_gates(synth_batch(batch, n), ExpandPolicy.EXPAND_ALL_MCX).elementary_total
            assert total <= BATCH_COST_PER_QUBIT * n

    def test_too_large(self):
        with pytest.raises(BatchTooLarge):
            synth_batch([(0, 1), (2, 3)], 4)

    def test_not_power_of_two(self):
        with pytest.raises(NotPowerOfTwo):
            synth_batch([(0, 1), (2, 3), (4, 5)], 16)

    def test_point_outside(self):
        with pytest.raises(BadWidth):
            synth_batch([(0, 9)], 3)


class TestSynthPermutation:
    def test_example(self):
        circuit = synth_permutation(EXAMPLE_S8)
        assert circuit.width == 3
        assert circuit.is_classical
        assert permutation_action(circuit) == EXAMPLE_S8

    def test_identity(self):
        assert len(synth_permutation(Permutation.identity(5))) == 0

    def test_wider_register(self):
        circuit = synth_permutation(EXAMPLE_S8, n=5)
        assert circuit.width == 5
        assert permutation_action(circuit) == Permutation(5, EXAMPLE_S8.mapping)

    def test_narrower_register(self):
        with pytest.raises(BadWidth):
            synth_permutation(EXAMPLE_S8, n=2)

    @pytest.mark.parametrize("n", range(6, 13))
    def test_random(self, n, make_permutation):
        for _ in range(3):
            sigma = make_permutation(n, 24)
            assert permutation_action(synth_permutation(sigma)) == sigma

    @pytest.mark.parametrize("n", range(3, 11))
    def test_followed_by_inverse_is_identity(self, n, make_permutation):
        for size in (2, 5, 1 << (n - 1)):
            sigma = make_permutation(n, size)
            forward = synth_permutation(sigma)
            backward = synth_permutation(sigma.inverse())
            assert permutation_action(forward.concat(backward)).is_identity
            assert permutation_action(forward) == sigma

    def test_forced_cap_of_two(self, make_permutation):
        sigma = make_permutation(16, 40)
        circuit = synth_permutation(sigma, m_cap=2)
        assert permutation_action(circuit, sigma.support) == dict(sigma.mapping)
        assert permutation_action(circuit) == sigma

    @pytest.mark.slow
    def test_random_many(self, rng, make_permutation):
        for _ in range(200):
            n = int(rng.integers(6, 13))
            sigma = make_permutation(n, int(rng.integers(2, (1 << n) + 1)))
            assert permutation_action(synth_permutation(sigma)) == sigma
