"""
Module containing the conversion of experiment results to CSV lines.
"""
import json

from typing import Any

from src import __version__
from src.models import ExperimentResult, Histogram

__all__ = ['generate_csv']

HISTOGRAM_HEADER = 'counter_index,counter_bits,count,frequency,exact_probability'

COMMENT_PREFIX = '# '


def generate_csv(result: ExperimentResult) -> list[str]:
    """
    Generate the CSV lines of a result: commented provenance lines, then the data.
    :param result: The result to convert.
    :return: The lines, without line terminators.
    """
    contents = generate_csv_preamble(result)

    if result.histogram is not None:
        contents.append(HISTOGRAM_HEADER)
        contents += generate_csv_histogram_rows(result.histogram, result.m_counter_bits)
    else:
        contents.append(','.join(result.columns))
        contents += [','.join(format_cell(cell) for cell in row) for row in zip(*result.columns.values())]

    return contents


def generate_csv_preamble(result: ExperimentResult) -> list[str]:
    """
    Version, resolved config and notes as comment lines.
    :param result: The result.
    :return: The comment lines.
    """
    contents = [f'{COMMENT_PREFIX}version: {__version__}',
                f'{COMMENT_PREFIX}config: {json.dumps(result.config, sort_keys=True)}']
    contents += [f'{COMMENT_PREFIX}{key}: {format_cell(value)}' for key, value in result.notes.items()]
    if result.comparison is not None:
        comparison = result.comparison
        contents.append(f'{COMMENT_PREFIX}comparison: tv_distance={format_cell(comparison.tv_distance)} '
                        f'worst_bin={comparison.worst_bin} pass={comparison.passed}')

    return contents


def generate_csv_histogram_rows(histogram: Histogram, m_counter_bits: int) -> list[str]:
    """
    One row per counter state; counter bits are printed most significant first.
    :param histogram: The histogram.
    :param m_counter_bits: The counter width.
    :return: The rows.
    """
    exact = histogram.exact_probs
    rows = []
    for index in sorted(histogram.counts):
        count = histogram.counts[index]
        probability = '' if exact is None else format_cell(exact[index])
        rows.append(f'{index},{index:0{m_counter_bits}b},{count},'
                    f'{format_cell(count / histogram.shots)},{probability}')

    return rows


def format_cell(value: Any) -> str:
    """
    Shortest round-tripping text of a value.
    """
    if isinstance(value, float):
        return repr(value)

    return str(value)
