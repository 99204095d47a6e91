"""
Module containing the experiment configuration: JSON base files, command-line overrides,
    array generators and schedule presets.
"""
import logging

from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import Any, Optional, Union

from src.errors import ConfigurationError
from src.models import ArraySpec, AngleSchedule, SignVariant
from src.procedures.search import interleaved_layout
from src.rotations import PRESET_NAMES, preset_schedule

__all__ = ['ExperimentConfig', 'from_dict', 'merge', 'parse_array', 'parse_schedule', 'COMMANDS']

logger = logging.getLogger(__name__)

COMMANDS = ('search', 'filter', 'iterate', 'null-element', 'decoherence', 'figure')
SAMPLED_COMMANDS = ('search', 'filter', 'null-element', 'decoherence', 'figure')
FORMATS = ('csv', 'json')

DEFAULT_SHOTS = 10000

PAPER_SIGNS = {
    2: SignVariant.FIXED_4,
    3: SignVariant.FIXED_8,
}

STR_FIELDS = ('command', 'signs', 'out', 'format', 'figure')
REQUIRED_FIELDS = ('command', 'target', 'signs', 'iterations', 'shots', 'out', 'format', 'workers')

ArrayField = Union[str, list[int], None]
ScheduleField = Union[str, list[str], None]


@dataclass
class ExperimentConfig:
    """
    Data class to represent one experiment as read from a config file and the command line.

    `array` is a comma separated list or a generator: `range:M`, `interleaved:M`,
        `fill:M:V` (M-1 copies of V, then a zero) or `distinct-zero:M` (1..M-1 with a
        zero at index 3). `schedule` holds one entry per iteration, each a preset name or
        comma separated multiples of pi.
    """
    command: str
    array: ArrayField = None
    bits: Optional[int] = None
    m: Optional[int] = None
    target: int = 0
    exclude: Optional[int] = None
    schedule: ScheduleField = None
    signs: str = 'doubling'
    iterations: int = 1
    cycles: Optional[int] = None
    shots: int = DEFAULT_SHOTS
    seed: Optional[int] = None
    out: str = 'results'
    format: str = 'csv'
    workers: int = 1
    figure: Optional[str] = None
    outlier: Optional[int] = None

    def __post_init__(self):
        check_types(self)
        if self.command not in COMMANDS:
            raise ConfigurationError(f'Unknown command: {self.command}')
        if self.format not in FORMATS:
            raise ConfigurationError(f'Unknown output format: {self.format}')
        if self.signs not in ('paper', 'doubling'):
            raise ConfigurationError(f'Unknown sign variant: {self.signs}')
        if self.shots < 1:
            raise ConfigurationError(f'At least one shot is required, got {self.shots}')
        if self.iterations < 1:
            raise ConfigurationError(f'At least one iteration is required, got {self.iterations}')
        if self.workers < 1:
            raise ConfigurationError(f'At least one worker is required, got {self.workers}')
        if self.command in SAMPLED_COMMANDS and self.seed is None:
            raise ConfigurationError(f'{self.command} samples shots and needs a seed')

    def elements(self) -> list[int]:
        """
        Expand the array field.
        :return: The array values.
        """
        if self.array is not None:
            return parse_array(self.array)
        if self.m is not None:
            return parse_array(f'distinct-zero:{2 ** self.m}')

        raise ConfigurationError('Either an array or a counter width (m) is required')

    def array_spec(self) -> ArraySpec:
        """
        Build the classical input; the bit width defaults to the smallest one holding
            every value.
        :return: The array.
        """
        elements = self.elements()
        if self.m is not None and len(elements) != 2 ** self.m:
            raise ConfigurationError(f'{len(elements)} elements do not match m={self.m}')

        bits = self.bits
        if bits is None:
            largest = max(elements + [self.target] + ([self.exclude] if self.exclude is not None else []))
            bits = max(1, largest.bit_length())

        return ArraySpec(tuple(elements), self.target, bits)

    def schedules(self, n_bits: int, fallback: str = 'default') -> list[AngleSchedule]:
        """
        Expand the schedule field, one schedule per listed entry.
        :param n_bits: The data register width.
        :param fallback: Preset used when no schedule is configured.
        :return: The schedules.
        """
        entries = self.schedule if self.schedule is not None else fallback
        if isinstance(entries, str):
            entries = [entry for entry in entries.split(';') if entry.strip()]

        return [parse_schedule(entry, n_bits) for entry in entries]

    def sign_variant(self, m_counter_bits: int) -> SignVariant:
        """
        Resolve `paper` to the fixture defined for the counter width.
        :param m_counter_bits: The counter width.
        :return: The sign variant.
        """
        if self.signs == 'doubling':
            return SignVariant.DOUBLING
        if m_counter_bits not in PAPER_SIGNS:
            raise ConfigurationError(f'Fixture signs exist for m=2 and m=3 only, got m={m_counter_bits}')

        return PAPER_SIGNS[m_counter_bits]

    def resolved(self, fallback: Optional[str] = 'default', cycles: Optional[int] = None) -> dict[str, Any]:
        """
        The configuration after generator and preset expansion, as written into outputs.
        :param fallback: Preset used when no schedule is configured; None for procedures
            without a schedule.
        :param cycles: Cycle count used when none is configured.
        :return: A JSON-ready mapping.
        """
        data = asdict(self)
        for key in ('out', 'workers'):
            del data[key]

        if self.command == 'figure':
            return data

        array = self.array_spec()
        data.update(array=list(array.elements), bits=array.n_data_bits, m=array.m_counter_bits,
                    signs=self.sign_variant(array.m_counter_bits).name.lower())
        if fallback is not None or self.schedule is not None:
            schedules = self.schedules(array.n_data_bits, fallback or 'default')
            data['schedule'] = [describe_schedule(schedule) for schedule in schedules]
        if self.cycles is None:
            data['cycles'] = cycles

        return data


def check_types(config: ExperimentConfig):
    """
    Refuse field values of the wrong JSON type before any of them is used.
    :param config: The configuration to check.
    """
    for name, value in asdict(config).items():
        if value is None and name not in REQUIRED_FIELDS:
            continue
        if name in STR_FIELDS:
            valid = isinstance(value, str)
        elif name == 'array':
            valid = isinstance(value, (str, list))
        elif name == 'schedule':
            valid = isinstance(value, str) or (isinstance(value, list)
                                               and all(isinstance(entry, str) for entry in value))
        else:
            valid = isinstance(value, int) and not isinstance(value, bool)

        if not valid:
            raise ConfigurationError(f'Config field {name} has the wrong type: {value!r}')


def describe_schedule(schedule: AngleSchedule) -> str:
    """
    Text form of a schedule, the inverse of parse_schedule.
    """
    if schedule.exact_match:
        return schedule.name

    return ','.join(str(multiple) for multiple in schedule.multiples)


def parse_array(spec: Union[str, list[int]]) -> list[int]:
    """
    Parse an explicit list or a generator spec.
    :param spec: The array field.
    :return: The values.
    """
    if not isinstance(spec, (str, list)):
        raise ConfigurationError(f'An array is a list or a text spec, got {spec!r}')

    kind, _, arguments = ('', '', '') if isinstance(spec, list) else spec.strip().partition(':')
    try:
        if isinstance(spec, list):
            if any(isinstance(value, (bool, float)) for value in spec):
                raise ValueError('array values must be integers')
            return [int(value) for value in spec]
        numbers = [int(token) for token in (arguments.split(':') if arguments else spec.split(','))]
    except (TypeError, ValueError) as error:
        raise ConfigurationError(f'Cannot parse array: {spec}') from error

    if not arguments:
        return numbers

    match kind, numbers:
        case 'range', [size]:
            return list(range(size))
        case 'interleaved', [size]:
            return interleaved_layout(size)
        case 'fill', [size, value]:
            return [value] * (size - 1) + [0]
        case 'distinct-zero', [size]:
            values = list(range(1, size))
            values.insert(min(3, size - 1), 0)
            return values
        case _:
            raise ConfigurationError(f'Unknown array generator: {spec}')


def parse_schedule(entry: str, n_bits: int) -> AngleSchedule:
    """
    Parse a preset name or comma separated multiples of pi (`1/2,1/4,1/8`).
    :param entry: The schedule text.
    :param n_bits: The data register width.
    :return: The schedule.
    """
    entry = entry.strip()
    if entry in PRESET_NAMES:
        return preset_schedule(entry, n_bits)

    try:
        multiples = tuple(Fraction(token.strip()) for token in entry.split(','))
    except (ValueError, ZeroDivisionError) as error:
        raise ConfigurationError(f'Cannot parse schedule: {entry}') from error

    schedule = AngleSchedule('custom', multiples)
    schedule.check(n_bits)

    return schedule


def from_dict(data: dict[str, Any]) -> ExperimentConfig:
    """
    Build a configuration from a mapping, rejecting unknown keys.
    :param data: The mapping, e.g. a parsed JSON config file.
    :return: The configuration.
    """
    known = {field.name for field in fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigurationError(f'Unknown config keys: {", ".join(sorted(unknown))}')
    if 'command' not in data:
        raise ConfigurationError('The config does not name a command')

    return ExperimentConfig(**data)


def merge(base: dict[str, Any], overrides: dict[str, Any]) -> ExperimentConfig:
    """
    Apply command-line overrides on top of a base config; None means "not given".
    :param base: The base mapping.
    :param overrides: The command-line values.
    :return: The configuration.
    """
    data = dict(base)
    data.update({key: value for key, value in overrides.items() if value is not None})
    logger.debug('Merged config: %s', data)

    return from_dict(data)
