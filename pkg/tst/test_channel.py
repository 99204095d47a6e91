"""
Module containing the tests for the channel module.
"""
import math
import unittest

import numpy as np

import src.channel as chn

from src.errors import ConfigurationError, InternalInvariantError, PreconditionError
from src.models import AngleSchedule, ArraySpec, SearchConfig, SignVariant
from src.oracles import brute_force_curve, closed_form_single_call
from src.procedures.search import single_call_search
from src.rotations import default_schedule, exact_match_schedule, highest_bit_pi_schedule

DISTINCT_ZERO = ArraySpec((1, 2, 3, 0, 4, 5, 6, 7), 0, 3)
SORTING_ARRAY = ArraySpec((12, 45, 3, 60, 27, 38, 19, 51), 0, 6)
TOP_BIT_MASK = np.array([element >= 32 for element in SORTING_ARRAY.elements])


class TestDensityState(unittest.TestCase):
    """
    Test cases for the DensityState class.
    """
    def test_01_superposition(self):
        """
        Verify that the unloaded counter is a valid rank-one density matrix with a uniform diagonal.
        """
        state = chn.DensityState.superposition(4)

        self.assertEqual(state.size, 4)
        np.testing.assert_allclose(state.diagonal, [0.25] * 4)
        self.assertEqual(np.linalg.matrix_rank(state.rho), 1)

    def test_02_invalid_matrices(self):
        """
        Verify that a bad trace or a non-square matrix is refused.
        """
        with self.assertRaises(InternalInvariantError):
            chn.DensityState(np.eye(4) / 2)
        with self.assertRaises(ConfigurationError):
            chn.DensityState(np.ones((2, 3)) / 2)


class TestBuildReloadChannel(unittest.TestCase):
    """
    Test cases for the build_reload_channel and apply_channel functions.

    Tests:
    - Kraus operator count and rank
    - Completeness on random arrays
    - Agreement with the single-call formula
    - Zero schedule
    """
    def test_01_kraus_count_and_rank(self):
        """
        Verify one operator per distinct value, of rank equal to the value's multiplicity.
        """
        # Act
        distinct = chn.build_reload_channel(ArraySpec((15, 14, 6, 0), 0, 4), default_schedule(4))
        duplicated = chn.build_reload_channel(ArraySpec((15, 15, 15, 0), 0, 4), default_schedule(4))

        # Assert
        self.assertEqual(len(distinct.kraus_ops), 4)
        self.assertEqual(duplicated.values, (0, 15))
        self.assertEqual([np.linalg.matrix_rank(op) for op in duplicated.kraus_ops], [1, 3])

    def test_02_completeness(self):
        """
        Verify sum K^T K = I on 100 random arrays, duplicates included.
        """
        rng = np.random.default_rng(11)
        for _ in range(100):
            m = int(rng.integers(1, 5))
            n = int(rng.integers(1, 7))
            elements = tuple(int(value) for value in rng.integers(0, 2 ** n, size=2 ** m))
            array = ArraySpec(elements, int(rng.integers(0, 2 ** n)), n)
            with self.subTest(array=array):
                channel = chn.build_reload_channel(array, default_schedule(n))

                self.assertLess(channel.completeness_defect(), 1e-12)

    def test_03_maximally_mixed_input(self):
        """
        Verify that one step on I/M reproduces the single-call formula for distinct elements.
        """
        # Arrange
        array = ArraySpec((15, 14, 6, 0), 0, 4)
        channel = chn.build_reload_channel(array, default_schedule(4))

        # Act
        state = chn.apply_channel(chn.DensityState(np.eye(4) / 4), channel)

        # Assert
        np.testing.assert_allclose(state.diagonal, closed_form_single_call(array, default_schedule(4)), atol=1e-12)

    def test_04_zero_schedule(self):
        """
        Verify that a zero schedule keeps the diagonal and removes coherence between different values.
        """
        # Arrange
        array = ArraySpec((1, 1, 2, 3), 0, 2)
        channel = chn.build_reload_channel(array, AngleSchedule('zero', (0, 0)))

        # Act
        state = chn.apply_channel(chn.DensityState.superposition(4), channel)

        # Assert
        np.testing.assert_allclose(state.diagonal, [0.25] * 4, atol=1e-12)
        self.assertAlmostEqual(abs(state.rho[0, 1]), 0.25, places=12)
        self.assertAlmostEqual(abs(state.rho[0, 2]), 0, places=12)
        self.assertAlmostEqual(abs(state.rho[2, 3]), 0, places=12)

    def test_05_size_mismatch(self):
        """
        Verify that a channel applied to a density matrix of another size is refused.
        """
        channel = chn.build_reload_channel(ArraySpec((1, 2, 3, 0), 0, 2), default_schedule(2))

        with self.assertRaises(ConfigurationError):
            chn.apply_channel(chn.DensityState.superposition(8), channel)


class TestIterate(unittest.TestCase):
    """
    Test cases for the iterate, iterate_markov and iterate_pure functions.
    """
    def test_01_markov_equivalence(self):
        """
        Verify that the channel follows the Markov chain on 0..15 against 5 for 16 iterations.
        """
        # Arrange
        array = ArraySpec(tuple(range(16)), 5, 4)
        schedules = [default_schedule(4)]

        # Act
        channel = chn.iterate(array, schedules, 16)
        markov = chn.iterate_markov(array, schedules, 16)

        # Assert
        for iteration, (mixed, chain) in enumerate(zip(channel, markov), start=1):
            with self.subTest(iteration=iteration):
                np.testing.assert_allclose(mixed, chain, atol=1e-12)

    def test_02_markov_transition(self):
        """
        Verify that the transition matrix is column-stochastic and refuses duplicates.
        """
        transition = chn.markov_transition(ArraySpec((15, 14, 6, 0), 0, 4), default_schedule(4))

        np.testing.assert_allclose(transition.sum(axis=0), [1] * 4, atol=1e-12)
        with self.assertRaises(PreconditionError):
            chn.markov_transition(ArraySpec((15, 15, 15, 0), 0, 4), default_schedule(4))

    def test_03_exact_match_curve(self):
        """
        Verify the exact-match anchors, that the curve rises, and that brute force is ahead
            from five calls on.
        """
        # Act
        curve = [marginal[3] for marginal in chn.iterate(DISTINCT_ZERO, [exact_match_schedule()], 8)]

        # Assert
        self.assertAlmostEqual(curve[0], 0.25, places=6)
        self.assertAlmostEqual(curve[1], 0.357143, places=6)
        self.assertAlmostEqual(curve[7], 0.745062, places=6)
        self.assertTrue(all(later > earlier for earlier, later in zip(curve, curve[1:])))
        for calls in range(5, 9):
            self.assertLess(curve[calls - 1], brute_force_curve(8, calls))
        for calls, probability in enumerate(curve, start=1):
            self.assertAlmostEqual(probability, chn.exact_match_closed_form(8, calls), places=12)

    def test_04_top_bit_split(self):
        """
        Verify that one highest-bit-pi iteration gives 11/56 to every low element and 3/56 to
            every high one.
        """
        # Act
        probabilities = chn.iterate(SORTING_ARRAY, [highest_bit_pi_schedule(6)], 1)[0]

        # Assert
        np.testing.assert_allclose(probabilities[~TOP_BIT_MASK], [11 / 56] * 4, atol=1e-12)
        np.testing.assert_allclose(probabilities[TOP_BIT_MASK], [3 / 56] * 4, atol=1e-12)
        self.assertAlmostEqual(chn.suppression_ratio(probabilities, TOP_BIT_MASK), 11 / 3, places=12)

    def test_05_preparation_then_filter(self):
        """
        Verify that a default iteration followed by top-bit iterations suppresses the high
            elements more than a single top-bit iteration from uniform.
        """
        # Arrange
        schedules = [default_schedule(6), highest_bit_pi_schedule(6)]

        # Act
        probabilities = chn.iterate(SORTING_ARRAY, schedules, 3)[-1]

        # Assert
        self.assertGreater(chn.suppression_ratio(probabilities, TOP_BIT_MASK), 11 / 3)

    def test_06_first_iteration_is_single_call(self):
        """
        Verify that one channel step equals the single call, duplicates included.
        """
        cases = [(ArraySpec((15, 14, 6, 0), 0, 4), SignVariant.DOUBLING),
                 (ArraySpec((15, 15, 15, 0), 0, 4), SignVariant.FIXED_4)]

        for array, signs in cases:
            with self.subTest(array=array):
                # Act
                channel = chn.iterate(array, [default_schedule(4)], 1, signs)[0]
                _, single = single_call_search(SearchConfig(array, default_schedule(4), signs))

                # Assert
                np.testing.assert_allclose(channel, single, atol=1e-12)

    def test_07_pure_state_cross_check(self):
        """
        Verify that keeping the reloaded copy in a register gives the channel's distributions.
        """
        cases = [(ArraySpec((15, 14, 6, 0), 0, 4), SignVariant.DOUBLING),
                 (ArraySpec((15, 15, 15, 0), 0, 4), SignVariant.FIXED_4)]

        for array, signs in cases:
            with self.subTest(array=array):
                # Act
                marginals, deviation = chn.iterate_pure(array, [default_schedule(4)] * 2, signs)

                # Assert
                self.assertEqual(len(marginals), 2)
                self.assertLess(deviation, 1e-12)

    def test_08_iteration_bounds(self):
        """
        Verify that zero iterations is refused and more iterations than elements are flagged.
        """
        with self.assertRaises(ConfigurationError):
            chn.iterate(DISTINCT_ZERO, [exact_match_schedule()], 0)
        with self.assertLogs('src.channel', level='WARNING'):
            chn.iterate(DISTINCT_ZERO, [exact_match_schedule()], 9)
        with self.assertRaises(ConfigurationError):
            chn.iterate_pure(DISTINCT_ZERO, [exact_match_schedule()] * 3)


class TestClosedForms(unittest.TestCase):
    """
    Test cases for exact_match_closed_form and suppression_ratio.
    """
    def test_01_exact_match_values(self):
        """
        Verify the closed form for M=8 and its limit of one.
        """
        self.assertAlmostEqual(chn.exact_match_closed_form(8, 1), 0.25, places=12)
        self.assertAlmostEqual(chn.exact_match_closed_form(8, 8), 1 - 7 / 8 * (6 / 7) ** 8, places=12)
        self.assertAlmostEqual(chn.exact_match_closed_form(16, 1), 0.125, places=12)
        self.assertAlmostEqual(chn.exact_match_closed_form(8, 500), 1, places=12)

    def test_02_suppression_ratio(self):
        """
        Verify the ratio of means, its infinite limit and the refusal of a one-sided mask.
        """
        probabilities = np.array([0.4, 0.4, 0.1, 0.1])

        self.assertAlmostEqual(chn.suppression_ratio(probabilities, [False, False, True, True]), 4)
        self.assertTrue(math.isinf(chn.suppression_ratio(np.array([0.5, 0.5, 0, 0]), [False, False, True, True])))
        with self.assertRaises(ConfigurationError):
            chn.suppression_ratio(probabilities, [True] * 4)
