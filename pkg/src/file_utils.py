"""
Module containing functions for file handling.
"""
import json
import logging
import os

from typing import Any

import src.converters.model_to_csv as m2c
import src.converters.model_to_json as m2j

from src.errors import ConfigurationError
from src.models import ExperimentResult

logger = logging.getLogger(__name__)


def load_json_config(path: str) -> dict[str, Any]:
    """
    Read a JSON config file
    :param path: Path to the config file
    :return: The parsed mapping
    """
    try:
        with open(path, 'r', encoding='utf-8') as file:
            data = json.load(file)
    except (OSError, json.JSONDecodeError) as error:
        raise ConfigurationError(f'Cannot read config file {path}: {error}') from error

    if not isinstance(data, dict):
        raise ConfigurationError(f'Config file {path} must hold a JSON object')

    return data


def write_results(results: list[ExperimentResult], output_dir: str, output_format: str) -> list[str]:
    """
    Write every result to `<output_dir>/<name>.<format>`
    :param results: The results
    :param output_dir: Path to the output directory
    :param output_format: csv or json
    :return: The written paths
    """
    os.makedirs(output_dir, exist_ok=True)

    paths = []
    for result in results:
        output_path = os.path.join(output_dir, f'{result.name}.{output_format}')
        if output_format == 'json':
            content = [m2j.generate_json(result)]
        else:
            content = m2c.generate_csv(result)

        with open(output_path, 'w', encoding='utf-8', newline='') as file:
            file.writelines(line + '\n' for line in content)
        logger.info('Wrote %s', output_path)
        paths.append(output_path)

    return paths
