"""
Module containing the nearest-value search procedures: the single call, the
    re-measurement (decoherence) protocol and its use as an outlier filter.
"""
import logging

from dataclasses import replace
from typing import Callable, Optional

import numpy as np

from src.errors import ConfigurationError, PreconditionError
from src.models import AngleSchedule, Histogram, Register, SearchConfig, SearchMode, SuppressionReport
from src.procedures.filtering import filter_exclude
from src.rotations import SignMatrix, build_rotation, build_sign_matrix, rotation_pass, total_angle
from src.statevector import (PureState, apply_counter_operator, init_entangled_load, marginal_distribution,
                             measure_and_collapse, spawn_generators)

__all__ = ['apply_rotation_pass', 'single_call_search', 'decoherence_protocol', 'decoherence_trajectories',
           'nearest_with_remeasure_filter', 'interleaved_layout']

logger = logging.getLogger(__name__)

ValueReader = Callable[[np.ndarray, np.ndarray], np.ndarray]


def data_value(_: np.ndarray, data: np.ndarray) -> np.ndarray:
    """
    Read the compared value from the data register C.
    """
    return data


def apply_rotation_pass(state: PureState, target_b: int, schedule: AngleSchedule, sign: SignMatrix,
                        value_of: ValueReader = data_value) -> PureState:
    """
    Rotate D once per data bit that differs from B, or once by pi on any mismatch
        for exact-match schedules. The comparator is evaluated as a branch predicate.
    :param state: The input state.
    :param target_b: The target value B.
    :param schedule: The angle schedule.
    :param sign: The sign matrix of the counter.
    :param value_of: Reads the compared value from (ancilla, data) labels.
    :return: The rotated state.
    """
    if schedule.exact_match:
        rotation = build_rotation(sign, np.pi).matrix
        return apply_counter_operator(state, rotation, lambda ancilla, data: value_of(ancilla, data) != target_b)

    n_bits = len(schedule.multiples)
    for position, angle in enumerate(schedule.angles):
        if angle == 0:
            continue
        bit = n_bits - 1 - position
        rotation = build_rotation(sign, angle).matrix
        logger.debug('Rotating D by %.6f on data bit %d', angle, bit)
        state = apply_counter_operator(
            state, rotation,
            lambda ancilla, data, bit=bit: ((value_of(ancilla, data) >> bit) & 1) != ((target_b >> bit) & 1))

    return state


def prepare(config: SearchConfig) -> tuple[PureState, SignMatrix]:
    """
    Load the array and apply one rotation pass, or the pi rotation on the excluded value
        in filter mode.
    :param config: The search configuration.
    :return: The rotated state and the sign matrix used.
    """
    array = config.array
    sign = build_sign_matrix(array.m_counter_bits, config.signs)
    if config.mode == SearchMode.FILTER:
        assert config.exclude is not None
        state, _ = filter_exclude(array, config.exclude, config.signs)
        return state, sign

    state = init_entangled_load(array, array.layout())

    return apply_rotation_pass(state, array.target_b, config.schedule, sign), sign


def check_remeasurable(config: SearchConfig):
    """
    The re-measurement protocol needs at least one cycle and a schedule to re-rotate with.
    """
    if config.cycles < 1:
        raise ConfigurationError('The re-measurement protocol needs at least one cycle')
    if config.mode == SearchMode.FILTER:
        raise ConfigurationError('Filter mode has no schedule to re-rotate with')


def single_call_search(config: SearchConfig) -> tuple[PureState, np.ndarray]:
    """
    One load and one rotation pass: O(1) calls in the Grover sense.
    :param config: The search configuration.
    :return: The final state and the exact counter distribution.
    """
    logger.info('Single call on %d elements, target %d, schedule %s', config.array.size,
                config.array.target_b, config.schedule.name)
    state, _ = prepare(config)

    return state, marginal_distribution(state, Register.COUNTER)


def branch_transitions(config: SearchConfig, sign: SignMatrix, values: list[int]) -> np.ndarray:
    """
    T[v, j, i] = |A_v[j, i]|^2, the counter transition of a re-rotation on data value v.
    """
    return np.stack([rotation_pass(sign, value, config.array.target_b, config.schedule).matrix ** 2
                     for value in values])


def decoherence_protocol(config: SearchConfig, shots: int, seed: int) -> tuple[Histogram, Histogram]:
    """
    Load once, rotate, measure D, then `cycles` times re-rotate without reloading and
        measure D again.

    After the first collapse the data branches never interfere, so every shot is a
        trajectory over (data value, counter) pairs; exact distributions and joint
        per-shot samples are both drawn from that branch table.
    :param config: The search configuration, cycles >= 1.
    :param shots: Number of shots.
    :param seed: The root seed.
    :return: Histograms of the first and of the last measurement.
    """
    check_remeasurable(config)
    if shots < 1:
        raise ConfigurationError(f'At least one shot is required, got {shots}')

    state, sign = prepare(config)
    values = sorted(set(config.array.elements))
    joint = np.sum(np.abs(state.tensor) ** 2, axis=0)[values]
    transitions = branch_transitions(config, sign, values)
    size = config.array.size

    last = joint
    for _ in range(config.cycles):
        last = np.einsum('vi,vji->vj', last, transitions)

    first_counts = np.zeros(size, dtype=np.int64)
    last_counts = np.zeros(size, dtype=np.int64)
    flat = joint.reshape(-1) / joint.sum()
    for block, rng in spawn_generators(seed, shots):
        picks = rng.choice(len(flat), size=block, p=flat)
        branch, current = picks // size, picks % size
        first_counts += np.bincount(current, minlength=size)
        for _ in range(config.cycles):
            cumulative = np.cumsum(transitions[branch, :, current], axis=1)
            draws = rng.random(block)
            current = np.minimum((cumulative < draws[:, None]).sum(axis=1), size - 1)
        last_counts += np.bincount(current, minlength=size)

    logger.info('Re-measurement protocol: %d shots, %d cycle(s)', shots, config.cycles)

    return (to_histogram(first_counts, shots, seed, joint.sum(axis=0)),
            to_histogram(last_counts, shots, seed, last.sum(axis=0)))


def decoherence_trajectories(config: SearchConfig, shots: int, seed: int) -> tuple[Histogram, Histogram]:
    """
    Shot-by-shot version of the re-measurement protocol built on measure_and_collapse.
        Slow; meant for small shot counts.
    :param config: The search configuration, cycles >= 1.
    :param shots: Number of shots.
    :param seed: The seed of the single generator used.
    :return: Histograms of the first and of the last measurement, without exact probabilities.
    """
    check_remeasurable(config)

    rotated, sign = prepare(config)
    rng = np.random.default_rng(seed)
    size = config.array.size
    first_counts = np.zeros(size, dtype=np.int64)
    last_counts = np.zeros(size, dtype=np.int64)

    for _ in range(shots):
        outcome, state = measure_and_collapse(rotated, Register.COUNTER, rng)
        first_counts[outcome] += 1
        for _ in range(config.cycles):
            state = apply_rotation_pass(state, config.array.target_b, config.schedule, sign)
            outcome, state = measure_and_collapse(state, Register.COUNTER, rng)
        last_counts[outcome] += 1

    return to_histogram(first_counts, shots, seed), to_histogram(last_counts, shots, seed)


def to_histogram(counts: np.ndarray, shots: int, seed: int,
                 exact: Optional[np.ndarray] = None) -> Histogram:
    """
    Wrap counts (and optionally their exact distribution) into a Histogram.
    """
    exact_probs = None if exact is None else tuple(float(p) for p in exact / exact.sum())

    return Histogram({index: int(count) for index, count in enumerate(counts)}, shots, seed, exact_probs)


def farthest_element(config: SearchConfig) -> int:
    """
    Index of the unique element with the largest accumulated angle.
    """
    array = config.array
    angles = [total_angle(element, array.target_b, config.schedule) for element in array.elements]
    farthest = [index for index, angle in enumerate(angles) if angle == max(angles)]
    if len(farthest) != 1:
        raise PreconditionError('No single outlier: the largest angle is shared by several elements')

    return farthest[0]


def nearest_with_remeasure_filter(config: SearchConfig, shots: int, seed: int,
                                  outlier_index: Optional[int] = None) -> SuppressionReport:
    """
    Run the re-measurement protocol on a dataset with one outlier and report how often
        the outlier bin is observed before and after the re-measurement.
    :param config: The search configuration (at least one cycle is run).
    :param shots: Number of shots.
    :param seed: The root seed.
    :param outlier_index: The outlier position; defaults to the unique farthest element.
    :return: The suppression report.
    """
    if config.cycles < 1:
        config = replace(config, cycles=1)
    if outlier_index is None:
        outlier_index = farthest_element(config)
    if not 0 <= outlier_index < config.array.size:
        raise ConfigurationError(f'Outlier index {outlier_index} is outside the array')

    first, second = decoherence_protocol(config, shots, seed)
    assert first.exact_probs is not None and second.exact_probs is not None

    return SuppressionReport(outlier_index, 1 / config.array.size,
                             first.exact_probs[outlier_index], second.exact_probs[outlier_index],
                             first.frequencies[outlier_index], second.frequencies[outlier_index],
                             (first, second))


def interleaved_layout(size: int) -> list[int]:
    """
    Odd values descending, then even values ascending: [M-1, M-3, ..., 1, 0, 2, ..., M-2].
    :param size: Number of elements M.
    :return: The permuted values 0..M-1.
    """
    return list(range(size - 1, 0, -2)) + list(range(0, size, 2))
