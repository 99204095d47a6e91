"""
Main application logic
"""
import logging

from dataclasses import replace
from typing import Any, Optional

import numpy as np

from src.channel import exact_match_closed_form, iterate, iterate_markov, iterate_pure, suppression_ratio
from src.config import ExperimentConfig
from src.errors import ConfigurationError
from src.models import (MAX_TOTAL_QUBITS, ArraySpec, ExperimentResult, Histogram, Register, SearchConfig,
                        SearchMode)
from src.oracles import MIN_COMPARISON_SHOTS, brute_force_curve, closed_form_single_call, compare_histogram
from src.procedures.null_element import DEFAULT_NULL_CYCLES, null_element_iterate, null_element_procedure
from src.procedures.search import decoherence_protocol, nearest_with_remeasure_filter, single_call_search
from src.rotations import exact_match_schedule
from src.statevector import sample_histogram

__all__ = ['run', 'figure', 'FIGURES']

logger = logging.getLogger(__name__)

DEFAULT_DECOHERENCE_CYCLES = 1

# Eight distinct six-bit values, four of them at or above 32
SORTING_ARRAY = '12,45,3,60,27,38,19,51'

# Ones with a single zero at index 3
ZERO_AT_THREE_8 = '1,1,1,0,1,1,1,1'
ZERO_AT_THREE_16 = '1,1,1,0,1,1,1,1,1,1,1,1,1,1,1,1'

FIGURES: dict[str, list[tuple[str, dict[str, Any]]]] = {
    'fig4': [('fig4', {'command': 'search', 'array': '15,14,6,0', 'bits': 4})],
    'fig5': [('fig5_ordered', {'command': 'search', 'array': 'range:64', 'bits': 6}),
             ('fig5_interleaved', {'command': 'search', 'array': 'interleaved:64', 'bits': 6})],
    'fig6': [('fig6', {'command': 'search', 'array': '15,15,15,0', 'bits': 4, 'signs': 'paper'})],
    'fig8': [('fig8_m16', {'command': 'decoherence', 'array': 'fill:16:127', 'bits': 7}),
             ('fig8_m32', {'command': 'decoherence', 'array': 'fill:32:15', 'bits': 4})],
    'fig10': [('fig10_m8', {'command': 'null-element', 'array': 'fill:8:1', 'bits': 1}),
              ('fig10_m16', {'command': 'null-element', 'array': 'fill:16:1', 'bits': 1})],
    'fig11': [('fig11_m8', {'command': 'null-element', 'array': ZERO_AT_THREE_8, 'bits': 1, 'iterations': 2,
                            'cycles': 0}),
              ('fig11_m16', {'command': 'null-element', 'array': ZERO_AT_THREE_16, 'bits': 1, 'iterations': 2,
                             'cycles': 0})],
    'fig12': [('fig12_m8', {'command': 'iterate', 'array': 'distinct-zero:8', 'schedule': 'exact-match',
                            'iterations': 8}),
              ('fig12_m16', {'command': 'iterate', 'array': 'distinct-zero:16', 'schedule': 'exact-match',
                             'iterations': 8})],
    'fig14': [('fig14_left', {'command': 'iterate', 'array': SORTING_ARRAY, 'bits': 6,
                              'schedule': 'highest-bit-pi', 'iterations': 1}),
              ('fig14_right', {'command': 'iterate', 'array': SORTING_ARRAY, 'bits': 6,
                               'schedule': 'default;highest-bit-pi', 'iterations': 3})],
    'fig15': [('fig15_left', {'command': 'decoherence', 'array': '8,0,1,2', 'bits': 4, 'outlier': 0}),
              ('fig15_right', {'command': 'filter', 'array': '6,0,7,9,11,2,13,15', 'bits': 4, 'exclude': 15})],
}


def run(config: ExperimentConfig, name: Optional[str] = None) -> list[ExperimentResult]:
    """
    Execute the configured procedure
    :param config: The experiment configuration
    :param name: Base name of the output files (defaults to the command)
    :return: One result per output file
    """
    name = name or config.command.replace('-', '_')
    logger.info('Running %s as %s', config.command, name)

    match config.command:
        case 'search':
            return run_search(config, name)
        case 'filter':
            return run_filter(config, name)
        case 'null-element':
            return run_null_element(config, name)
        case 'decoherence':
            return run_decoherence(config, name)
        case 'iterate':
            return run_iterate(config, name)
        case 'figure':
            return figure(config)
        case _:
            raise ConfigurationError(f'Unknown command: {config.command}')


def figure(config: ExperimentConfig) -> list[ExperimentResult]:
    """
    Run the canonical configurations of one figure with the shots and seed of `config`
    :param config: A figure configuration
    :return: The results of every panel
    """
    if config.figure not in FIGURES:
        raise ConfigurationError(f'Unknown figure: {config.figure}; known: {", ".join(FIGURES)}')

    results = []
    for name, overrides in FIGURES[config.figure]:
        panel = ExperimentConfig(shots=config.shots, seed=config.seed, workers=config.workers,
                                 format=config.format, out=config.out, **overrides)
        results += run(replace(panel, figure=config.figure), name)

    return results


def search_config(config: ExperimentConfig, array: ArraySpec, cycles: int = 0) -> SearchConfig:
    """
    Build the procedure configuration; an exact-match schedule switches to exact-match mode
    """
    schedule = config.schedules(array.n_data_bits)[0]
    mode = SearchMode.EXACT_MATCH if schedule.exact_match else SearchMode.NEAREST

    return SearchConfig(array, schedule, config.sign_variant(array.m_counter_bits), mode, cycles)


def histogram_result(name: str, config: dict[str, Any], histogram: Histogram, expected: np.ndarray,
                     notes: Optional[dict[str, Any]] = None) -> ExperimentResult:
    """
    Wrap a histogram and its comparison against the expected distribution
    """
    comparison = None
    if histogram.shots >= MIN_COMPARISON_SHOTS:
        comparison = compare_histogram(histogram, expected)
        if not comparison.passed:
            logger.warning('%s deviates from its expected distribution (worst bin %d)', name,
                           comparison.worst_bin)
    else:
        logger.info('Skipping the comparison of %s: fewer than %d shots', name, MIN_COMPARISON_SHOTS)

    return ExperimentResult(name, config, histogram, comparison, notes=notes or {})


def run_search(config: ExperimentConfig, name: str) -> list[ExperimentResult]:
    """
    Run one nearest-value or exact-match call and sample the counter
    :param config: A search configuration
    :param name: Output name
    :return: The histogram result
    """
    array = config.array_spec()
    search = search_config(config, array)

    state, probabilities = single_call_search(search)
    histogram = sample_histogram(state, Register.COUNTER, config.shots, config.seed, config.workers)
    expected = closed_form_single_call(array, search.schedule) if array.is_distinct else probabilities
    notes = {
        'mode_bin': histogram.mode,
        'most_likely_bin': int(np.argmax(probabilities)),
        'max_probability_ratio': float(probabilities.max() * array.size),
    }

    return [histogram_result(name, config.resolved(), histogram, expected, notes)]


def run_filter(config: ExperimentConfig, name: str) -> list[ExperimentResult]:
    """
    Remove one value from the counter distribution and sample the result
    :param config: A filter configuration with an exclude value
    :param name: Output name
    :return: The histogram result
    """
    if config.exclude is None:
        raise ConfigurationError('filter needs a value to exclude')

    array = config.array_spec()
    search = SearchConfig(array, exact_match_schedule(), config.sign_variant(array.m_counter_bits),
                          SearchMode.FILTER, exclude=config.exclude)
    state, probabilities = single_call_search(search)
    histogram = sample_histogram(state, Register.COUNTER, config.shots, config.seed, config.workers)
    excluded = array.indices_of(config.exclude)
    notes = {
        'excluded_bins': ' '.join(str(index) for index in excluded),
        'excluded_counts': sum(histogram.counts[index] for index in excluded),
    }

    return [histogram_result(name, config.resolved(fallback=None), histogram, probabilities, notes)]


def run_null_element(config: ExperimentConfig, name: str) -> list[ExperimentResult]:
    """
    Run the exact-match procedure with the null-element buffer; more than one iteration
        reloads the array and adds a table of the match probability per call
    :param config: A null-element configuration
    :param name: Output name
    :return: The histogram result, then the per-call table when iterating
    """
    array = config.array_spec()
    if config.schedule is not None and not config.schedules(array.n_data_bits)[0].exact_match:
        raise ConfigurationError('The null-element procedure only runs the exact-match schedule')

    cycles = DEFAULT_NULL_CYCLES if config.cycles is None else config.cycles
    search = SearchConfig(array, exact_match_schedule(), config.sign_variant(array.m_counter_bits),
                          SearchMode.EXACT_MATCH, cycles)

    if config.iterations == 1:
        state, probabilities = null_element_procedure(search)
        marginals = [probabilities]
    else:
        state, marginals = null_element_iterate(search, config.iterations)
        probabilities = marginals[-1]

    histogram = sample_histogram(state, Register.COUNTER, config.shots, config.seed, config.workers)
    match_index = array.indices_of(array.target_b)[0]
    notes = {
        'match_index': match_index,
        'match_probability': float(probabilities[match_index]),
        'match_ratio': float(probabilities[match_index] * array.size),
    }
    resolved = config.resolved(fallback='exact-match', cycles=cycles)
    results = [histogram_result(name, resolved, histogram, probabilities, notes)]

    if config.iterations > 1:
        steps = range(1, config.iterations + 1)
        columns: dict[str, list[Any]] = {
            'iteration': list(steps),
            'match_probability': [float(marginal[match_index]) for marginal in marginals],
            'reload_channel_probability': [exact_match_closed_form(array.size, step) for step in steps],
            'brute_force_probability': [brute_force_curve(array.size, step) for step in steps],
        }
        results.append(ExperimentResult(f'{name}_calls', resolved, columns=columns))

    return results


def run_decoherence(config: ExperimentConfig, name: str) -> list[ExperimentResult]:
    """
    Run the re-measurement protocol, reporting the outlier bin when one is configured
    :param config: A decoherence configuration
    :param name: Base output name
    :return: The results of the first and of the last measurement
    """
    array = config.array_spec()
    cycles = DEFAULT_DECOHERENCE_CYCLES if config.cycles is None else config.cycles
    search = search_config(config, array, cycles)
    notes: dict[str, Any] = {}

    if config.outlier is None:
        first, second = decoherence_protocol(search, config.shots, config.seed)
    else:
        report = nearest_with_remeasure_filter(search, config.shots, config.seed, config.outlier)
        assert report.histograms is not None
        first, second = report.histograms
        notes = {
            'outlier_index': report.outlier_index,
            'uniform_level': report.uniform_level,
            'outlier_first_probability': report.first_probability,
            'outlier_second_probability': report.second_probability,
            'suppressed': report.suppressed,
        }

    resolved = config.resolved(cycles=cycles)
    results = []
    for suffix, histogram in (('first', first), ('second', second)):
        assert histogram.exact_probs is not None
        results.append(histogram_result(f'{name}_{suffix}', resolved, histogram,
                                        np.array(histogram.exact_probs), dict(notes)))

    return results


def run_iterate(config: ExperimentConfig, name: str) -> list[ExperimentResult]:
    """
    Iterate the reload channel and tabulate the target probability per iteration
    :param config: An iterate configuration
    :param name: Output name
    :return: The column result
    """
    array = config.array_spec()
    schedules = config.schedules(array.n_data_bits)
    signs = config.sign_variant(array.m_counter_bits)
    steps = range(1, config.iterations + 1)

    marginals = iterate(array, schedules, config.iterations, signs)
    targets = array.indices_of(array.target_b)

    columns: dict[str, list[Any]] = {
        'iteration': list(steps),
        'target_probability': [float(marginal[targets].sum()) for marginal in marginals],
        'brute_force_probability': [brute_force_curve(array.size, step) for step in steps],
    }
    if array.is_distinct:
        oracle = iterate_markov(array, schedules, config.iterations)
        columns['markov_target_probability'] = [float(marginal[targets].sum()) for marginal in oracle]
    for index in range(array.size):
        columns[f'p_{index}'] = [float(marginal[index]) for marginal in marginals]

    notes: dict[str, Any] = {}
    top_bit = array.n_data_bits - 1
    far = np.array([(element ^ array.target_b) >> top_bit & 1 for element in array.elements], dtype=bool)
    if far.any() and not far.all():
        notes['suppression_ratio'] = suppression_ratio(marginals[-1], far)
    if config.iterations <= 2 and 2 * array.n_data_bits + array.m_counter_bits <= MAX_TOTAL_QUBITS:
        _, deviation = iterate_pure(array, [schedules[min(step, len(schedules) - 1)]
                                            for step in range(config.iterations)], signs)
        notes['pure_state_deviation'] = deviation

    return [ExperimentResult(name, config.resolved(), columns=columns, notes=notes)]
