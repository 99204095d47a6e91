"""
Module containing the conversion of experiment results to JSON documents.
"""
import json

from typing import Any

from src import __version__
from src.models import ExperimentResult, finite_or_text

__all__ = ['generate_json']


def generate_json(result: ExperimentResult) -> str:
    """
    Generate the JSON document of a result. Rows mirror the CSV columns; a histogram
        result also carries its `comparison` object.
    :param result: The result to convert.
    :return: The JSON text.
    """
    document: dict[str, Any] = {
        'name': result.name,
        'version': __version__,
        'config': result.config,
        'notes': {key: plain(value) for key, value in result.notes.items()},
    }

    if result.histogram is not None:
        histogram = result.histogram
        exact = histogram.exact_probs
        document['shots'] = histogram.shots
        document['seed'] = histogram.seed
        document['rows'] = [{
            'counter_index': index,
            'counter_bits': f'{index:0{result.m_counter_bits}b}',
            'count': histogram.counts[index],
            'frequency': histogram.counts[index] / histogram.shots,
            'exact_probability': None if exact is None else exact[index],
        } for index in sorted(histogram.counts)]
        document['comparison'] = None if result.comparison is None else result.comparison.to_dict()
    else:
        document['rows'] = [{name: plain(cell) for name, cell in zip(result.columns, row)}
                            for row in zip(*result.columns.values())]

    return json.dumps(document, indent=2, sort_keys=False)


def plain(value: Any) -> Any:
    """
    Turn numpy scalars into Python ones and non-finite floats into text.
    """
    if hasattr(value, 'item'):
        value = value.item()
    if isinstance(value, float):
        return finite_or_text(value)

    return value
