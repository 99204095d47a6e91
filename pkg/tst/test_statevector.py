"""
Module containing the tests for the statevector module.
"""
import math
import unittest

import numpy as np

import src.statevector as sv

from src.errors import ConfigurationError, InternalInvariantError
from src.models import ArraySpec, Histogram, Register, RegisterLayout
from src.oracles import compare_histogram
from src.rotations import build_rotation, build_sign_matrix, default_schedule

FIG4_ARRAY = ArraySpec((15, 14, 6, 0), 0, 4)
FIG4_PROBABILITIES = [0.1083, 0.1178, 0.3355, 0.4384]


def rotated_fig4() -> sv.PureState:
    """
    [15, 14, 6, 0] after the default schedule, bit by bit.
    """
    sign = build_sign_matrix(2)
    state = sv.init_entangled_load(FIG4_ARRAY, FIG4_ARRAY.layout())
    for position, angle in enumerate(default_schedule(4).angles):
        state = sv.apply_conditioned_rotation(state, 3 - position, 0, build_rotation(sign, angle))

    return state


def basis_state(layout: RegisterLayout, data: int, counter: int) -> sv.PureState:
    """
    The state |0, data, counter>.
    """
    tensor = np.zeros(layout.shape)
    tensor[0, data, counter] = 1

    return sv.PureState(tensor, layout)


class TestRegisterLayout(unittest.TestCase):
    """
    Test cases for the RegisterLayout and PureState invariants.
    """
    def test_01_qubit_cap(self):
        """
        Verify that more than 26 qubits is a configuration error.
        """
        with self.assertRaises(ConfigurationError):
            RegisterLayout(10, 10, 7)

    def test_02_flat_index(self):
        """
        Verify that the flat index is (ancilla * 2^n + data) * 2^m + counter.
        """
        # Arrange
        layout = RegisterLayout(2, 2, 1)

        # Act
        state = sv.PureState(np.eye(32)[(1 * 4 + 2) * 4 + 3], layout)

        # Assert
        self.assertEqual(state.amplitude(2, 3, 1), 1)

    def test_03_norm_drift(self):
        """
        Verify that a non-normalized vector is an internal invariant violation.
        """
        with self.assertRaises(InternalInvariantError):
            sv.PureState(np.ones(4), RegisterLayout(1, 1))


class TestInitEntangledLoad(unittest.TestCase):
    """
    Test cases for the init_entangled_load function.
    """
    def test_01_four_elements(self):
        """
        Verify one amplitude of 1/2 per (element, index) pair.
        """
        # Act
        state = sv.init_entangled_load(FIG4_ARRAY, FIG4_ARRAY.layout())

        # Assert
        for counter, element in enumerate(FIG4_ARRAY.elements):
            self.assertAlmostEqual(state.amplitude(element, counter), 0.5)
        self.assertEqual(np.count_nonzero(state.amplitudes), 4)

    def test_02_identical_zeros(self):
        """
        Verify that [0, 0] loads 1/sqrt(2) on |0>|0> and |0>|1>.
        """
        # Arrange
        array = ArraySpec((0, 0), 0, 1)

        # Act
        state = sv.init_entangled_load(array, array.layout())

        # Assert
        self.assertAlmostEqual(state.amplitude(0, 0), 1 / math.sqrt(2))
        self.assertAlmostEqual(state.amplitude(0, 1), 1 / math.sqrt(2))
        self.assertEqual(np.count_nonzero(state.amplitudes), 2)

    def test_03_layout_mismatch(self):
        """
        Verify that loading into a layout of another width is a configuration error.
        """
        with self.assertRaises(ConfigurationError):
            sv.init_entangled_load(FIG4_ARRAY, RegisterLayout(3, 2))


class TestApplyConditionedRotation(unittest.TestCase):
    """
    Test cases for the apply_conditioned_rotation function.
    """
    def test_01_branch_locality(self):
        """
        Verify that only branches whose top bit differs from B are rotated.
        """
        # Arrange
        state = sv.init_entangled_load(FIG4_ARRAY, FIG4_ARRAY.layout())
        op = build_rotation(build_sign_matrix(2), math.pi / 2)

        # Act
        rotated = sv.apply_conditioned_rotation(state, 3, 0, op)

        # Assert
        np.testing.assert_array_equal(rotated.tensor[0, 6], state.tensor[0, 6])
        np.testing.assert_array_equal(rotated.tensor[0, 0], state.tensor[0, 0])
        self.assertFalse(np.allclose(rotated.tensor[0, 15], state.tensor[0, 15]))
        self.assertFalse(np.allclose(rotated.tensor[0, 14], state.tensor[0, 14]))
        self.assertAlmostEqual(rotated.norm, 1, places=12)

    def test_02_identity(self):
        """
        Verify that A(0) leaves the state unchanged.
        """
        # Arrange
        state = sv.init_entangled_load(FIG4_ARRAY, FIG4_ARRAY.layout())

        # Act
        rotated = sv.apply_conditioned_rotation(state, 3, 0, build_rotation(build_sign_matrix(2), 0))

        # Assert
        np.testing.assert_array_equal(rotated.amplitudes, state.amplitudes)

    def test_03_full_schedule(self):
        """
        Verify the counter distribution after the whole default schedule.
        """
        # Act
        probabilities = sv.marginal_distribution(rotated_fig4(), Register.COUNTER)

        # Assert
        np.testing.assert_allclose(probabilities, FIG4_PROBABILITIES, atol=1e-4)
        self.assertAlmostEqual(probabilities.sum(), 1, places=12)

    def test_04_dimension_mismatch(self):
        """
        Verify that an operator of the wrong size is a configuration error.
        """
        state = sv.init_entangled_load(FIG4_ARRAY, FIG4_ARRAY.layout())

        with self.assertRaises(ConfigurationError):
            sv.apply_conditioned_rotation(state, 3, 0, build_rotation(build_sign_matrix(3), 0))
        with self.assertRaises(ConfigurationError):
            sv.apply_conditioned_rotation(state, 4, 0, build_rotation(build_sign_matrix(2), 0))


class TestMarginalDistribution(unittest.TestCase):
    """
    Test cases for the marginal_distribution function.
    """
    def test_01_fresh_load(self):
        """
        Verify that a fresh load is uniform on the counter.
        """
        state = sv.init_entangled_load(FIG4_ARRAY, FIG4_ARRAY.layout())

        np.testing.assert_allclose(sv.marginal_distribution(state, Register.COUNTER), [0.25] * 4)

    def test_02_data_register(self):
        """
        Verify that the data marginal puts 1/4 on each loaded value.
        """
        # Act
        probabilities = sv.marginal_distribution(sv.init_entangled_load(FIG4_ARRAY, FIG4_ARRAY.layout()),
                                                 Register.DATA)

        # Assert
        self.assertEqual(len(probabilities), 16)
        for value in FIG4_ARRAY.elements:
            self.assertAlmostEqual(probabilities[value], 0.25)


class TestMeasureAndCollapse(unittest.TestCase):
    """
    Test cases for the measure_and_collapse function.
    """
    def test_01_basis_state(self):
        """
        Verify that a basis state is measured with certainty and left unchanged.
        """
        # Arrange
        state = basis_state(RegisterLayout(4, 2), 6, 2)

        # Act
        outcome, collapsed = sv.measure_and_collapse(state, Register.COUNTER, np.random.default_rng(0))

        # Assert
        self.assertEqual(outcome, 2)
        np.testing.assert_array_equal(collapsed.amplitudes, state.amplitudes)

    def test_02_idempotence(self):
        """
        Verify that measuring D twice gives the same outcome.
        """
        # Arrange
        rng = np.random.default_rng(11)
        state = rotated_fig4()

        for _ in range(50):
            # Act
            first, collapsed = sv.measure_and_collapse(state, Register.COUNTER, rng)
            second, _ = sv.measure_and_collapse(collapsed, Register.COUNTER, rng)

            # Assert
            self.assertEqual(first, second)

    def test_03_agrees_with_marginal(self):
        """
        Verify that seeded collapse outcomes follow the marginal within 4 sigma.
        """
        # Arrange
        state = rotated_fig4()
        rng = np.random.default_rng(5)
        shots = 20000
        counts = {index: 0 for index in range(4)}

        # Act
        for _ in range(shots):
            outcome, _ = sv.measure_and_collapse(state, Register.COUNTER, rng)
            counts[outcome] += 1

        # Assert
        report = compare_histogram(Histogram(counts, shots, 5),
                                   sv.marginal_distribution(state, Register.COUNTER))
        self.assertTrue(report.passed)

    def test_04_deterministic(self):
        """
        Verify that equal seeds give equal outcome sequences.
        """
        state = rotated_fig4()

        def outcomes(seed):
            rng = np.random.default_rng(seed)
            return [sv.measure_and_collapse(state, Register.COUNTER, rng)[0] for _ in range(30)]

        self.assertEqual(outcomes(9), outcomes(9))


class TestSampleHistogram(unittest.TestCase):
    """
    Test cases for the sample_histogram and spawn_generators functions.
    """
    def test_01_uniform(self):
        """
        Verify that 10,000 uniform shots land within 0.02 of 1/4 per bin.
        """
        # Arrange
        state = sv.init_entangled_load(FIG4_ARRAY, FIG4_ARRAY.layout())

        # Act
        histogram = sv.sample_histogram(state, Register.COUNTER, 10000, 42)

        # Assert
        for frequency in histogram.frequencies:
            self.assertAlmostEqual(frequency, 0.25, delta=0.02)
        self.assertEqual(histogram.exact_probs, (0.25, 0.25, 0.25, 0.25))

    def test_02_basis_state(self):
        """
        Verify that a basis state puts every shot into one bin.
        """
        histogram = sv.sample_histogram(basis_state(RegisterLayout(4, 2), 6, 2), Register.COUNTER, 500, 1)

        self.assertEqual(histogram.counts, {0: 0, 1: 0, 2: 500, 3: 0})

    def test_03_mode(self):
        """
        Verify that the element equal to the target is the most frequent bin.
        """
        histogram = sv.sample_histogram(rotated_fig4(), Register.COUNTER, 10000, 7)

        self.assertEqual(histogram.mode, 3)

    def test_04_determinism_and_workers(self):
        """
        Verify that the counts depend on the seed only, not on the number of workers.
        """
        # Arrange
        state = rotated_fig4()

        # Act
        sequential = sv.sample_histogram(state, Register.COUNTER, 30000, 3)
        parallel = sv.sample_histogram(state, Register.COUNTER, 30000, 3, workers=4)
        other_seed = sv.sample_histogram(state, Register.COUNTER, 30000, 4)

        # Assert
        self.assertEqual(sequential.counts, parallel.counts)
        self.assertNotEqual(sequential.counts, other_seed.counts)

    def test_05_zero_shots(self):
        """
        Verify that zero shots is a configuration error.
        """
        with self.assertRaises(ConfigurationError):
            sv.sample_histogram(rotated_fig4(), Register.COUNTER, 0, 1)

    def test_06_blocks(self):
        """
        Verify that shots are cut into blocks of 8192.
        """
        blocks = [size for size, _ in sv.spawn_generators(0, 20000)]

        self.assertEqual(blocks, [8192, 8192, 3616])


class TestAncillaOperations(unittest.TestCase):
    """
    Test cases for the mark_flag, record_counter and reload_data functions.
    """
    def test_01_record_counter(self):
        """
        Verify that recording D copies the counter into the ancilla without changing D.
        """
        # Arrange
        state = rotated_fig4()
        layout = FIG4_ARRAY.layout(2)
        widened = sv.PureState(np.concatenate([state.tensor] + [np.zeros_like(state.tensor)] * 3), layout)

        # Act
        recorded = sv.record_counter(widened, 0)

        # Assert
        np.testing.assert_allclose(sv.marginal_distribution(recorded, Register.ANCILLA),
                                   sv.marginal_distribution(state, Register.COUNTER), atol=1e-12)
        np.testing.assert_allclose(sv.marginal_distribution(recorded, Register.COUNTER),
                                   sv.marginal_distribution(state, Register.COUNTER), atol=1e-12)

    def test_02_mark_flag(self):
        """
        Verify that a flag is raised exactly on the branches satisfying the predicate.
        """
        # Arrange
        state = sv.init_entangled_load(FIG4_ARRAY, FIG4_ARRAY.layout(1))

        # Act
        marked = sv.mark_flag(state, 0, lambda _, data, __: data != 0)

        # Assert
        self.assertAlmostEqual(abs(marked.amplitude(15, 0, 1)), 0.5)
        self.assertAlmostEqual(abs(marked.amplitude(0, 3, 0)), 0.5)
        self.assertEqual(marked.amplitude(15, 0, 0), 0)

    def test_03_reload_data(self):
        """
        Verify that a reload writes A_k into the ancilla block of counter state k.
        """
        # Arrange
        state = sv.init_entangled_load(FIG4_ARRAY, FIG4_ARRAY.layout(4))

        # Act
        reloaded = sv.reload_data(state, 0, FIG4_ARRAY.elements)

        # Assert
        for counter, element in enumerate(FIG4_ARRAY.elements):
            self.assertAlmostEqual(abs(reloaded.amplitude(element, counter, element)), 0.5)

    def test_04_pattern_too_wide(self):
        """
        Verify that an ancilla pattern wider than the reserved qubits is rejected.
        """
        state = sv.init_entangled_load(FIG4_ARRAY, FIG4_ARRAY.layout(2))

        with self.assertRaises(ConfigurationError):
            sv.reload_data(state, 0, FIG4_ARRAY.elements)
