"""
Module containing the exact-match procedure that uses the null element (the unique
    element equal to the target) as a buffer for redistributed amplitude, and its
    iteration with the array reloaded into an extra register C'.

Ancilla allocation, from qubit 0 upwards:
    mismatch flag | round-0 record of D | per cycle: record of D, mark, record of D
    | per reload: record of D, C', mismatch flag of C', mark, record of D
"""
import logging
import math

import numpy as np

from scipy.linalg import hadamard

from src.errors import ConfigurationError, PreconditionError
from src.models import Register, SearchConfig, SearchMode
from src.rotations import build_rotation, build_sign_matrix
from src.statevector import (PureState, apply_counter_operator, init_entangled_load, mark_flag,
                             marginal_distribution, record_counter, reload_data)

__all__ = ['null_element_procedure', 'null_element_iterate', 'null_element_ancilla', 'null_iterate_ancilla',
           'DEFAULT_NULL_CYCLES', 'MAX_NULL_ITERATIONS']

logger = logging.getLogger(__name__)

# Largest cycle count that fits the qubit cap for M = 16 with one data bit
DEFAULT_NULL_CYCLES = 1

# Every reload keeps its copy of the array in the ancilla register
MAX_NULL_ITERATIONS = 2

MISMATCH_QUBIT = 0


def null_element_ancilla(m_counter_bits: int, cycles: int) -> int:
    """
    Number of ancilla qubits the procedure allocates.
    :param m_counter_bits: Number of counter qubits.
    :param cycles: Number of redistribution cycles.
    :return: The ancilla count.
    """
    return 1 + m_counter_bits + cycles * (2 * m_counter_bits + 1)


def null_iterate_ancilla(n_data_bits: int, m_counter_bits: int, cycles: int, iterations: int) -> int:
    """
    Number of ancilla qubits of the iterated procedure: the first iteration plus, per
        reload, two records of D, the copy C', its mismatch flag and a mark.
    """
    return null_element_ancilla(m_counter_bits, cycles) + (iterations - 1) * (n_data_bits + 2 * m_counter_bits + 2)


def is_set(ancilla: np.ndarray, qubit: int) -> np.ndarray:
    """
    Whether one ancilla qubit is 1 on each label.
    """
    return ((ancilla >> qubit) & 1) == 1


def null_index_of(config: SearchConfig) -> int:
    """
    Counter state of the null element.
    :param config: An exact-match configuration.
    :return: The index of the unique element equal to the target.
    """
    if config.mode != SearchMode.EXACT_MATCH:
        raise ConfigurationError('The null-element procedure runs in exact-match mode')

    array = config.array
    matches = array.indices_of(array.target_b)
    if len(matches) != 1:
        raise PreconditionError(f'Exactly one element must equal {array.target_b}, found {len(matches)}')

    return matches[0]


def counter_operators(config: SearchConfig) -> tuple[np.ndarray, np.ndarray]:
    """
    A(pi) and the normalized Hadamard transform on D.
    """
    size = config.array.size
    flip = build_rotation(build_sign_matrix(config.array.m_counter_bits, config.signs), math.pi).matrix

    return flip, hadamard(size) / math.sqrt(size)


def rotate_and_redistribute(state: PureState, config: SearchConfig, null_index: int) -> tuple[PureState, int]:
    """
    Flag and rotate the mismatching branches, then run the redistribution cycles.
    :param state: The freshly loaded state.
    :param config: The exact-match configuration.
    :param null_index: Counter state of the null element.
    :return: The state and the first unused ancilla qubit.
    """
    array = config.array
    m = array.m_counter_bits
    flip, spread = counter_operators(config)

    state = mark_flag(state, MISMATCH_QUBIT, lambda _, data, __: data != array.target_b)
    offset = 1
    state = record_counter(state, offset)
    offset += m
    state = apply_counter_operator(state, flip, lambda ancilla, _: is_set(ancilla, MISMATCH_QUBIT))

    for cycle in range(config.cycles):
        state = record_counter(state, offset)
        offset += m
        mark = offset
        state = mark_flag(state, mark, lambda _, __, counter: counter == null_index)
        offset += 1
        logger.debug('Cycle %d: mark on ancilla %d, records up to %d', cycle + 1, mark, offset + m)

        state = apply_counter_operator(state, spread, lambda ancilla, _, mark=mark: ~is_set(ancilla, mark))
        state = record_counter(state, offset)
        offset += m
        state = apply_counter_operator(
            state, flip,
            lambda ancilla, _, mark=mark: is_set(ancilla, MISMATCH_QUBIT) & ~is_set(ancilla, mark))

    return state, offset


def null_element_procedure(config: SearchConfig) -> tuple[PureState, np.ndarray]:
    """
    Rotate every mismatching branch by pi, then for each cycle freeze the branches sitting
        on the null counter state and spread the others with Hadamards before rotating
        the mismatching ones again. Measurements are deferred into ancilla records.
    :param config: An exact-match configuration with exactly one element equal to the target.
    :return: The final state and the exact counter distribution.
    """
    null_index = null_index_of(config)
    array = config.array
    layout = array.layout(null_element_ancilla(array.m_counter_bits, config.cycles))
    logger.info('Null-element procedure: %d elements, %d cycle(s), %d qubits',
                array.size, config.cycles, layout.total_qubits)

    state, _ = rotate_and_redistribute(init_entangled_load(array, layout), config, null_index)
    state.check_norm()

    return state, marginal_distribution(state, Register.COUNTER)


def null_element_iterate(config: SearchConfig, iterations: int) -> tuple[PureState, list[np.ndarray]]:
    """
    Run the null-element procedure, then reload the array into C' entangled with the
        redistributed counter: flag the branches whose reloaded value misses the target,
        spread every branch off the null state and rotate the flagged ones by pi.
    :param config: An exact-match configuration with exactly one element equal to the target.
    :param iterations: Number of calls, 1 to MAX_NULL_ITERATIONS.
    :return: The final state and the counter distribution after each call.
    """
    if not 1 <= iterations <= MAX_NULL_ITERATIONS:
        raise ConfigurationError(f'The null-element iteration runs 1 to {MAX_NULL_ITERATIONS} calls, '
                                 f'got {iterations}')

    null_index = null_index_of(config)
    array = config.array
    n, m = array.n_data_bits, array.m_counter_bits
    layout = array.layout(null_iterate_ancilla(n, m, config.cycles, iterations))
    logger.info('Null-element iteration: %d elements, %d call(s), %d qubits',
                array.size, iterations, layout.total_qubits)

    flip, spread = counter_operators(config)
    state, offset = rotate_and_redistribute(init_entangled_load(array, layout), config, null_index)
    marginals = [marginal_distribution(state, Register.COUNTER)]

    for _ in range(1, iterations):
        state = record_counter(state, offset)
        offset += m
        reload, flag, mark = offset, offset + n, offset + n + 1
        offset += n + 2

        state = reload_data(state, reload, array.elements)
        state = mark_flag(state, flag,
                          lambda ancilla, _, __, reload=reload: ((ancilla >> reload) & (2 ** n - 1)) != array.target_b)
        state = mark_flag(state, mark, lambda _, __, counter: counter == null_index)
        state = apply_counter_operator(state, spread, lambda ancilla, _, mark=mark: ~is_set(ancilla, mark))
        state = record_counter(state, offset)
        offset += m
        state = apply_counter_operator(
            state, flip, lambda ancilla, _, flag=flag, mark=mark: is_set(ancilla, flag) & ~is_set(ancilla, mark))
        marginals.append(marginal_distribution(state, Register.COUNTER))

    state.check_norm()

    return state, marginals
