"""
Module containing the d-dimensional rotation operators
    A(phi) = cos(phi/2) I + sin(phi/2) / sqrt(d-1) S
    built from antisymmetric {0, +1, -1} sign matrices S with S S^T = (d-1) I.
"""
import logging
import math

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from scipy.linalg import expm

from src.errors import ConfigurationError, DomainError, InternalInvariantError
from src.models import AngleSchedule, OperatorDiagnostics, SignVariant

__all__ = ['SignMatrix', 'RotationOperator', 'build_sign_matrix', 'build_rotation',
           'total_angle', 'total_multiple', 'rotation_pass', 'validate_operator',
           'preset_schedule', 'default_schedule', 'highest_bit_pi_schedule',
           'exact_match_schedule', 'PRESET_NAMES']

logger = logging.getLogger(__name__)

FIXTURE_DIR = Path(__file__).parent / 'fixtures'

FIXTURE_FILES = {
    SignVariant.FIXED_4: 'signs_4.txt',
    SignVariant.FIXED_8: 'signs_8.txt',
}

# Counter width each fixture is defined for
FIXTURE_COUNTER_BITS = {
    SignVariant.FIXED_4: 2,
    SignVariant.FIXED_8: 3,
}

MAX_SIGN_COUNTER_BITS = 6
ORTHOGONALITY_TOLERANCE = 1e-12

PRESET_NAMES = ('default', 'highest-bit-pi', 'exact-match')


@dataclass(frozen=True)
class SignMatrix:
    """
    Data class to represent a sign pattern. Construction does not validate the
        pattern so that perturbed matrices can be diagnosed.
    """
    variant: SignVariant
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.int64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ConfigurationError(f'Sign matrix must be square, got shape {entries.shape}')
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def dim(self) -> int:
        """
        Dimension d of the counter space.
        """
        return self.entries.shape[0]

    @property
    def normalized(self) -> np.ndarray:
        """
        S / sqrt(d-1), orthogonal for a valid pattern.
        """
        return self.entries / math.sqrt(self.dim - 1)

    def gram_defect(self) -> int:
        """
        Max entry of |S S^T - (d-1) I|, exact in integer arithmetic.
        """
        gram = self.entries @ self.entries.T
        return int(np.abs(gram - (self.dim - 1) * np.eye(self.dim, dtype=np.int64)).max())

    def antisymmetry_defect(self) -> int:
        """
        Max entry of |S + S^T|, which also covers a nonzero diagonal.
        """
        return int(np.abs(self.entries + self.entries.T).max())


@dataclass(frozen=True)
class RotationOperator:
    """
    Data class to represent A(phi) for one sign pattern.
    """
    angle_phi: float
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        """
        Dimension d of the operator.
        """
        return self.matrix.shape[0]


def load_fixture(variant: SignVariant) -> np.ndarray:
    """
    Read a checked-in sign pattern.
    :param variant: The fixture variant.
    :return: The integer entries.
    """
    path = FIXTURE_DIR / FIXTURE_FILES[variant]
    with open(path, 'r', encoding='utf-8') as file:
        rows = [[int(entry) for entry in line.split()] for line in file if line.strip()]

    return np.array(rows, dtype=np.int64)


def doubling_entries(m: int) -> np.ndarray:
    """
    Skew doubling recursion: H = I + W is mapped to [[H, H], [-H^T, H^T]].
    :param m: Number of counter qubits.
    :return: The entries of W for d = 2^m.
    """
    skew = np.array([[1, 1], [-1, 1]], dtype=np.int64)
    for _ in range(m - 1):
        skew = np.block([[skew, skew], [-skew.T, skew.T]])

    return skew - np.eye(2 ** m, dtype=np.int64)


def build_sign_matrix(m: int, variant: SignVariant = SignVariant.DOUBLING) -> SignMatrix:
    """
    Build a validated sign matrix.
    :param m: Number of counter qubits (d = 2^m).
    :param variant: The sign pattern to use.
    :return: The sign matrix.
    """
    if not 1 <= m <= MAX_SIGN_COUNTER_BITS:
        raise ConfigurationError(f'Sign matrices are built for 1 <= m <= {MAX_SIGN_COUNTER_BITS}, got {m}')

    match variant:
        case SignVariant.DOUBLING:
            entries = doubling_entries(m)
        case SignVariant.FIXED_4 | SignVariant.FIXED_8:
            if FIXTURE_COUNTER_BITS[variant] != m:
                raise ConfigurationError(f'{variant.name} is only defined for m={FIXTURE_COUNTER_BITS[variant]}')
            entries = load_fixture(variant)
        case _:
            raise ConfigurationError(f'Unsupported sign variant: {variant}')

    sign = SignMatrix(variant, entries)
    if sign.gram_defect() or sign.antisymmetry_defect():
        raise InternalInvariantError(f'{variant.name} sign matrix for m={m} is not skew-orthogonal')

    return sign


def build_rotation(sign: SignMatrix, phi: float) -> RotationOperator:
    """
    Assemble A(phi) = cos(phi/2) I + sin(phi/2) S / sqrt(d-1).
    :param sign: The sign matrix.
    :param phi: The rotation angle in [0, pi].
    :return: The rotation operator.
    """
    if not 0 <= phi <= math.pi:
        raise DomainError(f'Rotation angle {phi} is outside [0, pi]')

    matrix = math.cos(phi / 2) * np.eye(sign.dim) + math.sin(phi / 2) * sign.normalized

    return RotationOperator(phi, matrix)


def total_multiple(value: int, target_b: int, schedule: AngleSchedule) -> Fraction:
    """
    Accumulated angle, as a multiple of pi, for one value against the target.
    :param value: The data value.
    :param target_b: The target value B.
    :param schedule: The angle schedule.
    :return: The exact multiple of pi.
    """
    if schedule.exact_match:
        return Fraction(0) if value == target_b else Fraction(1)

    n_bits = len(schedule.multiples)
    difference = value ^ target_b
    # schedule index 0 is the most significant bit
    return sum((multiple for position, multiple in enumerate(schedule.multiples)
                if difference >> (n_bits - 1 - position) & 1), Fraction(0))


def total_angle(value: int, target_b: int, schedule: AngleSchedule) -> float:
    """
    Accumulated angle in radians over the bit positions where value and target differ.
    :param value: The data value.
    :param target_b: The target value B.
    :param schedule: The angle schedule.
    :return: The angle, at most pi.
    """
    return float(total_multiple(value, target_b, schedule)) * math.pi


def rotation_pass(sign: SignMatrix, value: int, target_b: int, schedule: AngleSchedule) -> RotationOperator:
    """
    Composite operator a full rotation pass applies to the counter of one data value.
    :param sign: The sign matrix.
    :param value: The data value.
    :param target_b: The target value B.
    :param schedule: The angle schedule.
    :return: A(total_angle), equal to the product of the per-bit rotations.
    """
    return build_rotation(sign, total_angle(value, target_b, schedule))


def validate_operator(op: RotationOperator, sign: SignMatrix,
                      pairs: int = 100, seed: int = 0) -> OperatorDiagnostics:
    """
    Measure how far an operator and its sign pattern are from the expected structure.
    :param op: The operator to check.
    :param sign: The sign matrix the operator family is built from.
    :param pairs: Number of sampled angle pairs for the group property.
    :param seed: Seed of the angle sampler.
    :return: The diagnostics.
    """
    dim = sign.dim
    identity = np.eye(dim)
    normalized = sign.normalized

    orthogonality = float(np.abs(op.matrix.T @ op.matrix - identity).max())
    square = float(np.abs(normalized @ normalized + identity).max())

    def family(phi: float) -> np.ndarray:
        """A(phi) assembled from the normalized signs."""
        return math.cos(phi / 2) * identity + math.sin(phi / 2) * normalized

    rng = np.random.default_rng(seed)
    group = 0.0
    for _ in range(pairs):
        phi_1 = rng.uniform(0, math.pi)
        phi_2 = rng.uniform(0, math.pi - phi_1)
        group = max(group, float(np.abs(family(phi_1) @ family(phi_2) - family(phi_1 + phi_2)).max()))

    exponential = float(np.abs(expm(op.angle_phi / 2 * normalized) - op.matrix).max())

    diagnostics = OperatorDiagnostics(orthogonality, float(sign.gram_defect()),
                                      float(sign.antisymmetry_defect()), square, group, exponential)
    logger.debug('Diagnostics for %s, d=%d: %s', sign.variant.name, dim, diagnostics)

    return diagnostics


def default_schedule(n_bits: int) -> AngleSchedule:
    """
    pi/2 on the most significant bit, pi/4 on the next, and so on.
    :param n_bits: Number of data bits.
    :return: The schedule.
    """
    return AngleSchedule('default', tuple(Fraction(1, 2 ** (position + 1)) for position in range(n_bits)))


def highest_bit_pi_schedule(n_bits: int) -> AngleSchedule:
    """
    A single rotation by pi controlled by the most significant bit.
    :param n_bits: Number of data bits.
    :return: The schedule.
    """
    return AngleSchedule('highest-bit-pi', (Fraction(1),) + (Fraction(0),) * (n_bits - 1))


def exact_match_schedule() -> AngleSchedule:
    """
    Rotation by pi on every value different from the target.
    :return: The schedule.
    """
    return AngleSchedule('exact-match', exact_match=True)


def preset_schedule(name: str, n_bits: int) -> AngleSchedule:
    """
    Expand a named preset.
    :param name: One of PRESET_NAMES.
    :param n_bits: Number of data bits.
    :return: The schedule.
    """
    match name:
        case 'default':
            return default_schedule(n_bits)
        case 'highest-bit-pi':
            return highest_bit_pi_schedule(n_bits)
        case 'exact-match':
            return exact_match_schedule()
        case _:
            raise ConfigurationError(f'Unknown schedule preset: {name}')
