"""
Module containing the models shared by the simulation layers: register layouts,
    classical inputs, schedules, sampled histograms and the reports built on them.
"""
import json
import math

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Optional

from src.errors import ConfigurationError, DomainError

# Desk-scale cap on the total number of simulated qubits
MAX_TOTAL_QUBITS = 26

PROBABILITY_TOLERANCE = 1e-12


class Register(Enum):
    """
    Enum class to represent a register of the simulated state.
    """
    DATA = 0
    COUNTER = 1
    ANCILLA = 2


class SignVariant(Enum):
    """
    Enum class to represent the sign pattern used for the rotation operators.
    """
    DOUBLING = 0
    FIXED_4 = 1
    FIXED_8 = 2


class SearchMode(Enum):
    """
    Enum class to represent the kind of procedure run on an array.
    """
    NEAREST = 0
    EXACT_MATCH = 1
    FILTER = 2


@dataclass(frozen=True)
class RegisterLayout:
    """
    Data class to represent the qubit budget of a simulation.

    Flat amplitude index = (ancilla * 2^n + data) * 2^m + counter, bit 0 being the
        least significant qubit of each register.
    """
    n_data_bits: int
    m_counter_bits: int
    n_ancilla: int = 0

    def __post_init__(self):
        if self.n_data_bits < 1 or self.m_counter_bits < 1 or self.n_ancilla < 0:
            raise ConfigurationError(f'Invalid register layout: {self}')
        if self.total_qubits > MAX_TOTAL_QUBITS:
            raise ConfigurationError(f'Layout needs {self.total_qubits} qubits, '
                                     f'the cap is {MAX_TOTAL_QUBITS}')

    @property
    def counter_size(self) -> int:
        """
        Number of counter basis states (M = d = 2^m).
        """
        return 2 ** self.m_counter_bits

    @property
    def data_size(self) -> int:
        """
        Number of data register basis states (2^n).
        """
        return 2 ** self.n_data_bits

    @property
    def ancilla_size(self) -> int:
        """
        Number of ancilla basis states (2^ancilla).
        """
        return 2 ** self.n_ancilla

    @property
    def total_qubits(self) -> int:
        """
        Total number of simulated qubits.
        """
        return self.n_data_bits + self.m_counter_bits + self.n_ancilla

    @property
    def shape(self) -> tuple[int, int, int]:
        """
        Tensor shape of the amplitudes as (ancilla, data, counter).
        """
        return self.ancilla_size, self.data_size, self.counter_size

    def with_ancilla(self, n_ancilla: int) -> 'RegisterLayout':
        """
        Copy of the layout with a different ancilla count.
        :param n_ancilla: The new number of ancilla qubits.
        :return: The new layout.
        """
        return RegisterLayout(self.n_data_bits, self.m_counter_bits, n_ancilla)


@dataclass(frozen=True)
class ArraySpec:
    """
    Data class to represent the classical input: M unsigned n-bit values and the target B.
    """
    elements: tuple[int, ...]
    target_b: int
    n_data_bits: int

    def __post_init__(self):
        object.__setattr__(self, 'elements', tuple(int(element) for element in self.elements))
        size = len(self.elements)
        if size < 2 or size & (size - 1):
            raise ConfigurationError(f'Array length must be a power of two >= 2, got {size}')
        if self.n_data_bits < 1:
            raise ConfigurationError(f'Invalid bit width: {self.n_data_bits}')
        limit = 2 ** self.n_data_bits
        for element in self.elements + (self.target_b,):
            if not 0 <= element < limit:
                raise ConfigurationError(f'Value {element} does not fit in {self.n_data_bits} bits')

    @property
    def size(self) -> int:
        """
        Number of elements M.
        """
        return len(self.elements)

    @property
    def m_counter_bits(self) -> int:
        """
        Number of counter qubits needed to index the array.
        """
        return self.size.bit_length() - 1

    @property
    def is_distinct(self) -> bool:
        """
        Whether all elements are pairwise different.
        """
        return len(set(self.elements)) == self.size

    def indices_of(self, value: int) -> list[int]:
        """
        Counter indices holding a given value.
        :param value: The value to look for.
        :return: The matching counter indices.
        """
        return [index for index, element in enumerate(self.elements) if element == value]

    def layout(self, n_ancilla: int = 0) -> RegisterLayout:
        """
        Smallest layout holding the array.
        :param n_ancilla: Number of ancilla qubits to reserve.
        :return: The layout.
        """
        return RegisterLayout(self.n_data_bits, self.m_counter_bits, n_ancilla)

    def check(self, layout: RegisterLayout):
        """
        Verify that the array can be loaded into a layout.
        :param layout: The layout.
        """
        if layout.n_data_bits != self.n_data_bits or layout.counter_size != self.size:
            raise ConfigurationError(f'Array of {self.size} {self.n_data_bits}-bit values does not match '
                                     f'layout n={layout.n_data_bits}, m={layout.m_counter_bits}')


@dataclass(frozen=True)
class AngleSchedule:
    """
    Data class to represent per-bit rotation angles as exact multiples of pi.

    Index 0 is the most significant data bit. An exact-match schedule rotates by pi on
        any mismatch instead of accumulating per-bit angles.
    """
    name: str
    multiples: tuple[Fraction, ...] = ()
    exact_match: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'multiples', tuple(Fraction(multiple) for multiple in self.multiples))
        if any(multiple < 0 for multiple in self.multiples):
            raise DomainError(f'Negative angle in schedule {self.name}')
        if sum(self.multiples, Fraction(0)) > 1:
            raise DomainError(f'Schedule {self.name} sums to more than pi')
        if not self.exact_match and not self.multiples:
            raise ConfigurationError(f'Schedule {self.name} has no angles')

    @property
    def n_bits(self) -> Optional[int]:
        """
        Number of data bits the schedule covers (None for exact-match schedules).
        """
        return None if self.exact_match else len(self.multiples)

    @property
    def angles(self) -> tuple[float, ...]:
        """
        Per-bit angles in radians.
        """
        return tuple(float(multiple) * math.pi for multiple in self.multiples)

    def check(self, n_data_bits: int):
        """
        Verify that the schedule matches a data register width.
        :param n_data_bits: The data register width.
        """
        if not self.exact_match and len(self.multiples) != n_data_bits:
            raise ConfigurationError(f'Schedule {self.name} has {len(self.multiples)} angles '
                                     f'for {n_data_bits} data bits')


@dataclass
class Histogram:
    """
    Data class to represent sampled counter outcomes.
    """
    counts: dict[int, int]
    shots: int
    seed: int
    exact_probs: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ConfigurationError('Histogram counts do not add up to the number of shots')
        if self.exact_probs is not None and abs(sum(self.exact_probs) - 1) > PROBABILITY_TOLERANCE:
            raise ConfigurationError('Histogram exact probabilities are not normalized')

    @property
    def bins(self) -> int:
        """
        Number of outcome bins.
        """
        return len(self.counts)

    @property
    def frequencies(self) -> list[float]:
        """
        Relative frequencies in bin order.
        """
        return [self.counts[index] / self.shots for index in sorted(self.counts)]

    @property
    def mode(self) -> int:
        """
        Most frequent outcome (lowest index on ties).
        """
        return max(sorted(self.counts), key=lambda index: self.counts[index])


@dataclass
class ComparisonReport:
    """
    Data class to represent a histogram checked against an expected distribution.
    """
    tv_distance: float
    per_bin_z: list[float]
    worst_bin: int
    passed: bool
    tolerance_policy: str

    def to_dict(self) -> dict[str, Any]:
        """
        JSON-ready mapping; infinite z-scores are written as strings.
        """
        return {
            'tv_distance': self.tv_distance,
            'per_bin_z': [finite_or_text(z) for z in self.per_bin_z],
            'worst_bin': self.worst_bin,
            'pass': self.passed,
            'tolerance_policy': self.tolerance_policy,
        }

    def to_json(self) -> str:
        """
        Serialize the report.
        :return: The JSON text.
        """
        return json.dumps(self.to_dict(), indent=2)


def finite_or_text(value: float) -> Any:
    """
    Keep finite floats, spell out the others ('inf', '-inf', 'nan').
    """
    return value if math.isfinite(value) else str(value)


@dataclass
class OperatorDiagnostics:
    """
    Data class to represent the structural defects of a rotation operator.
    """
    orthogonality_defect: float
    sign_gram_defect: float
    antisymmetry_defect: float
    square_defect: float
    group_defect: float
    exponential_defect: float

    @property
    def worst(self) -> float:
        """
        Largest of the reported defects.
        """
        return max(self.orthogonality_defect, self.sign_gram_defect, self.antisymmetry_defect,
                   self.square_defect, self.group_defect, self.exponential_defect)


@dataclass(frozen=True)
class SearchConfig:
    """
    Data class to represent one run of a search procedure. Filter mode rotates by pi on
        the branches equal to `exclude` and leaves the schedule unused.
    """
    array: ArraySpec
    schedule: AngleSchedule
    signs: SignVariant = SignVariant.DOUBLING
    mode: SearchMode = SearchMode.NEAREST
    cycles: int = 0
    exclude: Optional[int] = None

    def __post_init__(self):
        if self.cycles < 0:
            raise ConfigurationError(f'Negative cycle count: {self.cycles}')
        if self.mode == SearchMode.FILTER and self.exclude is None:
            raise ConfigurationError('Filter mode requires an exclude value')
        self.schedule.check(self.array.n_data_bits)


@dataclass
class SuppressionReport:
    """
    Data class to represent how the re-measurement protocol treats an outlier bin.
    """
    outlier_index: int
    uniform_level: float
    first_probability: float
    second_probability: float
    first_frequency: float
    second_frequency: float
    histograms: Optional[tuple[Histogram, Histogram]] = field(default=None, repr=False)

    @property
    def suppressed(self) -> bool:
        """
        Whether the second measurement reports the outlier less often than the first.
        """
        return self.second_probability < self.first_probability


@dataclass
class ExperimentResult:
    """
    Data class to represent one output file: either a histogram (with its comparison)
        or a table of columns, plus the resolved config that produced it.
    """
    name: str
    config: dict[str, Any]
    histogram: Optional[Histogram] = None
    comparison: Optional[ComparisonReport] = None
    columns: dict[str, list[float]] = field(default_factory=dict)
    notes: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if (self.histogram is None) == (not self.columns):
            raise ConfigurationError(f'Result {self.name} needs either a histogram or columns')
        lengths = {len(column) for column in self.columns.values()}
        if len(lengths) > 1:
            raise ConfigurationError(f'Columns of {self.name} have different lengths')

    @property
    def m_counter_bits(self) -> int:
        """
        Counter width of the histogram, used to print counter labels.
        """
        return 0 if self.histogram is None else self.histogram.bins.bit_length() - 1
