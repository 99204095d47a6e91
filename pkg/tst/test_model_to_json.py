"""
Module containing the tests for the model_to_json converter.
"""
import json
import unittest

import numpy as np

import src.converters.model_to_json as m2j

from src.models import ComparisonReport, ExperimentResult, Histogram


class TestGenerateJson(unittest.TestCase):
    """
    Test cases for the generate_json function.
    """
    def test_01_histogram(self):
        """
        Verify the rows, the sampling metadata and the comparison of a histogram result.
        """
        # Arrange
        histogram = Histogram({0: 1, 1: 3}, 4, 12, (0.25, 0.75))
        comparison = ComparisonReport(0.0, [0.0, float('inf')], 1, False, '4 sigma per bin')
        result = ExperimentResult('filter', {'command': 'filter'}, histogram, comparison)

        # Act
        document = json.loads(m2j.generate_json(result))

        # Assert
        self.assertEqual(document['name'], 'filter')
        self.assertEqual((document['shots'], document['seed']), (4, 12))
        self.assertEqual(document['rows'][1], {'counter_index': 1, 'counter_bits': '1', 'count': 3,
                                               'frequency': 0.75, 'exact_probability': 0.75})
        self.assertFalse(document['comparison']['pass'])
        self.assertEqual(document['comparison']['per_bin_z'], [0.0, 'inf'])

    def test_02_columns(self):
        """
        Verify that column results become one object per row with plain values.
        """
        # Arrange
        result = ExperimentResult('iterate', {'command': 'iterate'},
                                  columns={'iteration': [1, 2], 'p_0': [np.float64(0.5), np.float64(0.25)]},
                                  notes={'suppression_ratio': np.float64('inf'), 'match_index': np.int64(3)})

        # Act
        document = json.loads(m2j.generate_json(result))

        # Assert
        self.assertEqual(document['rows'], [{'iteration': 1, 'p_0': 0.5}, {'iteration': 2, 'p_0': 0.25}])
        self.assertEqual(document['notes'], {'suppression_ratio': 'inf', 'match_index': 3})
        self.assertNotIn('comparison', document)
