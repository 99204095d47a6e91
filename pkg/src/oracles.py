"""
Module containing the independent predictions the simulators are checked against:
    the closed-form single-call distribution, the brute-force baseline and the
    histogram comparator.
"""
import logging
import math

import numpy as np

from src.errors import ConfigurationError, PreconditionError
from src.models import AngleSchedule, ArraySpec, ComparisonReport, Histogram
from src.rotations import total_angle

__all__ = ['closed_form_single_call', 'brute_force_curve', 'compare_histogram', 'tv_distance']

logger = logging.getLogger(__name__)

MIN_COMPARISON_SHOTS = 100


def closed_form_single_call(array: ArraySpec, schedule: AngleSchedule) -> np.ndarray:
    """
    P(j) = (1/M) [cos^2(phi_j/2) + sum_{k != j} sin^2(phi_k/2) / (M-1)].
    :param array: An array of distinct elements.
    :param schedule: The angle schedule.
    :return: The counter distribution after one load and one rotation pass.
    """
    if not array.is_distinct:
        raise PreconditionError('The closed form ignores interference and needs distinct elements')

    phis = np.array([total_angle(element, array.target_b, schedule) for element in array.elements])
    kept = np.cos(phis / 2) ** 2
    given = np.sin(phis / 2) ** 2
    size = array.size

    return (kept + (given.sum() - given) / (size - 1)) / size


def brute_force_curve(size: int, calls: int) -> float:
    """
    Success probability of sampling distinct elements without replacement.
    :param size: Number of elements M.
    :param calls: Number of calls t.
    :return: t / M, clamped to 1.
    """
    if calls < 1:
        raise ConfigurationError(f'Brute force needs at least one call, got {calls}')
    if calls > size:
        logger.warning('%d calls exceed the %d elements, clamping to certainty', calls, size)
        return 1.0

    return calls / size


def tv_distance(first: np.ndarray, second: np.ndarray) -> float:
    """
    Total variation distance of two distributions.
    """
    return float(0.5 * np.abs(np.asarray(first) - np.asarray(second)).sum())


def compare_histogram(hist: Histogram, expected: np.ndarray, sigma: float = 4.0) -> ComparisonReport:
    """
    Bin-wise z-scores of a histogram under multinomial variance.
    :param hist: The sampled histogram.
    :param expected: The expected probability vector.
    :param sigma: Largest accepted |z|.
    :return: The comparison report.
    """
    expected = np.asarray(expected, dtype=float)
    if len(expected) != hist.bins:
        raise ConfigurationError(f'Histogram has {hist.bins} bins, expected vector has {len(expected)}')
    if hist.shots < MIN_COMPARISON_SHOTS:
        raise ConfigurationError(f'At least {MIN_COMPARISON_SHOTS} shots are needed for a comparison')

    counts = np.array([hist.counts[index] for index in sorted(hist.counts)], dtype=float)
    means = hist.shots * expected
    variances = hist.shots * expected * (1 - expected)

    z_scores = []
    for count, mean, variance in zip(counts, means, variances):
        if variance > 0:
            z_scores.append(float((count - mean) / math.sqrt(variance)))
        else:
            # degenerate bin: any deviation is an impossible event
            z_scores.append(0.0 if abs(count - mean) < 0.5 else math.inf)

    worst_bin = int(np.argmax(np.abs(z_scores)))
    passed = all(abs(z) <= sigma for z in z_scores)
    policy = f'bin-wise |z| <= {sigma:g} under multinomial variance; zero-probability bins must stay empty'

    return ComparisonReport(tv_distance(counts / hist.shots, expected), z_scores, worst_bin, passed, policy)
