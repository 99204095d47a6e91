"""
Module containing the reload channel: every iteration re-entangles a fresh copy of the
    array with the counter, rotates, and discards the copy. On the counter alone this is
    the channel rho -> sum_c K_c rho K_c^T with K_c = A(phi_c) P_c, where P_c projects
    onto the counter states holding the value c.
"""
import logging

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.errors import ConfigurationError, InternalInvariantError, PreconditionError
from src.models import AngleSchedule, ArraySpec, Register, SignVariant
from src.procedures.search import apply_rotation_pass
from src.rotations import build_sign_matrix, rotation_pass, total_angle
from src.statevector import init_entangled_load, marginal_distribution, reload_data

__all__ = ['DensityState', 'ReloadChannel', 'build_reload_channel', 'apply_channel', 'markov_transition',
           'iterate', 'iterate_markov', 'iterate_pure', 'exact_match_closed_form', 'suppression_ratio']

logger = logging.getLogger(__name__)

TRACE_TOLERANCE = 1e-12
HERMITIAN_TOLERANCE = 1e-12
POSITIVITY_TOLERANCE = 1e-10
COMPLETENESS_TOLERANCE = 1e-12

# Pure-state cross-check keeps one extra data register per reload
MAX_PURE_ITERATIONS = 2


@dataclass
class DensityState:
    """
    Data class to represent the counter's M x M density matrix.
    """
    rho: np.ndarray

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=np.complex128)
        if self.rho.ndim != 2 or self.rho.shape[0] != self.rho.shape[1]:
            raise ConfigurationError(f'Density matrix must be square, got shape {self.rho.shape}')
        self.check()

    @classmethod
    def superposition(cls, size: int) -> 'DensityState':
        """
        The counter before the first load, |+><+| over M states. After one channel step
            it acts like I/M on distinct arrays and keeps the coherence of duplicates.
        :param size: Number of counter states M.
        :return: The density state.
        """
        return cls(np.full((size, size), 1 / size))

    @property
    def size(self) -> int:
        """
        Number of counter states M.
        """
        return self.rho.shape[0]

    @property
    def diagonal(self) -> np.ndarray:
        """
        Counter distribution.
        """
        return np.real(np.diag(self.rho)).copy()

    def check(self):
        """
        Raise if the matrix is no longer a valid density matrix.
        """
        trace = np.trace(self.rho)
        if abs(trace - 1) > TRACE_TOLERANCE:
            raise InternalInvariantError(f'Density trace drifted to {trace:.15f}')
        if np.abs(self.rho - self.rho.conj().T).max() > HERMITIAN_TOLERANCE:
            raise InternalInvariantError('Density matrix is not Hermitian')
        if np.linalg.eigvalsh(self.rho).min() < -POSITIVITY_TOLERANCE:
            raise InternalInvariantError('Density matrix has a negative eigenvalue')


@dataclass(frozen=True)
class ReloadChannel:
    """
    Data class to represent one load-rotate-discard step as Kraus operators.
    """
    values: tuple[int, ...]
    kraus_ops: tuple[np.ndarray, ...]

    def completeness_defect(self) -> float:
        """
        Max entry of |sum_c K_c^T K_c - I|.
        """
        size = self.kraus_ops[0].shape[0]
        total = sum((op.T @ op for op in self.kraus_ops), np.zeros((size, size)))
        return float(np.abs(total - np.eye(size)).max())


def build_reload_channel(array: ArraySpec, schedule: AngleSchedule,
                         signs: SignVariant = SignVariant.DOUBLING) -> ReloadChannel:
    """
    One Kraus operator per distinct array value.
    :param array: The classical array.
    :param schedule: The angle schedule of this iteration.
    :param signs: The sign pattern.
    :return: The channel.
    """
    schedule.check(array.n_data_bits)
    sign = build_sign_matrix(array.m_counter_bits, signs)
    elements = np.array(array.elements)

    values = tuple(sorted(set(array.elements)))
    kraus_ops = []
    for value in values:
        projector = np.diag((elements == value).astype(float))
        kraus_ops.append(rotation_pass(sign, value, array.target_b, schedule).matrix @ projector)

    channel = ReloadChannel(values, tuple(kraus_ops))
    defect = channel.completeness_defect()
    if defect > COMPLETENESS_TOLERANCE:
        raise InternalInvariantError(f'Kraus operators are incomplete by {defect:.3e}')

    return channel


def apply_channel(state: DensityState, channel: ReloadChannel) -> DensityState:
    """
    rho' = sum_c K_c rho K_c^T.
    """
    if channel.kraus_ops[0].shape[0] != state.size:
        raise ConfigurationError(f'Channel acts on {channel.kraus_ops[0].shape[0]} counter states, '
                                 f'the density matrix has {state.size}')

    return DensityState(sum(op @ state.rho @ op.T for op in channel.kraus_ops))


def markov_transition(array: ArraySpec, schedule: AngleSchedule) -> np.ndarray:
    """
    Column-stochastic transition of the counter distribution for distinct elements:
        T[j, k] = cos^2(phi_k/2) if j == k else sin^2(phi_k/2) / (M-1).
    :param array: An array of distinct elements.
    :param schedule: The angle schedule.
    :return: The M x M transition matrix.
    """
    if not array.is_distinct:
        raise PreconditionError('The Markov oracle ignores interference and needs distinct elements')

    phis = np.array([total_angle(element, array.target_b, schedule) for element in array.elements])
    stay = np.cos(phis / 2) ** 2
    leave = np.sin(phis / 2) ** 2 / (array.size - 1)

    transition = np.tile(leave, (array.size, 1))
    np.fill_diagonal(transition, stay)

    return transition


def schedule_at(schedules: Sequence[AngleSchedule], iteration: int) -> AngleSchedule:
    """
    Schedule of one iteration; the last schedule repeats once the list runs out.
    """
    if not schedules:
        raise ConfigurationError('At least one schedule is required')

    return schedules[min(iteration, len(schedules) - 1)]


def check_iterations(array: ArraySpec, iterations: int):
    """
    Refuse a non-positive count and warn when it exceeds the number of elements.
    :param array: The classical array.
    :param iterations: The requested iteration count.
    """
    if iterations < 1:
        raise ConfigurationError(f'At least one iteration is required, got {iterations}')
    if iterations > array.size:
        logger.warning('%d iterations exceed the %d elements', iterations, array.size)


def iterate(array: ArraySpec, schedules: Sequence[AngleSchedule], iterations: int,
            signs: SignVariant = SignVariant.DOUBLING) -> list[np.ndarray]:
    """
    Apply the reload channel `iterations` times to the unloaded counter.
    :param array: The classical array.
    :param schedules: Per-iteration schedules.
    :param iterations: Number of iterations t.
    :param signs: The sign pattern.
    :return: The counter distribution after each iteration.
    """
    check_iterations(array, iterations)
    logger.info('Iterating the reload channel %d time(s) on %d elements', iterations, array.size)

    state = DensityState.superposition(array.size)
    marginals = []
    for iteration in range(iterations):
        state = apply_channel(state, build_reload_channel(array, schedule_at(schedules, iteration), signs))
        marginals.append(state.diagonal)
        logger.debug('Iteration %d: %s', iteration + 1, np.round(marginals[-1], 6))

    return marginals


def iterate_markov(array: ArraySpec, schedules: Sequence[AngleSchedule], iterations: int) -> list[np.ndarray]:
    """
    Markov-chain oracle of `iterate` for distinct elements.
    """
    check_iterations(array, iterations)

    probabilities = np.full(array.size, 1 / array.size)
    marginals = []
    for iteration in range(iterations):
        probabilities = markov_transition(array, schedule_at(schedules, iteration)) @ probabilities
        marginals.append(probabilities)

    return marginals


def iterate_pure(array: ArraySpec, schedules: Sequence[AngleSchedule],
                 signs: SignVariant = SignVariant.DOUBLING) -> tuple[list[np.ndarray], float]:
    """
    Run at most two iterations on the pure-state engine, keeping the reloaded copy of the
        array in an extra register instead of discarding it.
    :param array: The classical array.
    :param schedules: One schedule per iteration (one or two).
    :param signs: The sign pattern.
    :return: The counter distribution after each iteration and the largest deviation
        from the channel engine.
    """
    iterations = len(schedules)
    if not 1 <= iterations <= MAX_PURE_ITERATIONS:
        raise ConfigurationError(f'The pure-state cross-check runs 1 to {MAX_PURE_ITERATIONS} iterations')

    n_bits = array.n_data_bits
    sign = build_sign_matrix(array.m_counter_bits, signs)
    state = init_entangled_load(array, array.layout(n_bits if iterations > 1 else 0))
    state = apply_rotation_pass(state, array.target_b, schedules[0], sign)
    marginals = [marginal_distribution(state, Register.COUNTER)]

    if iterations > 1:
        state = reload_data(state, 0, array.elements)
        state = apply_rotation_pass(state, array.target_b, schedules[1], sign,
                                    value_of=lambda ancilla, _: ancilla & (2 ** n_bits - 1))
        marginals.append(marginal_distribution(state, Register.COUNTER))

    reference = iterate(array, schedules, iterations, signs)
    deviation = max(float(np.abs(pure - mixed).max()) for pure, mixed in zip(marginals, reference))
    if deviation > TRACE_TOLERANCE:
        logger.warning('Pure-state iteration deviates from the reload channel by %.3e', deviation)

    return marginals, deviation


def exact_match_closed_form(size: int, iterations: int) -> float:
    """
    P(target) after t exact-match iterations from uniform with a unique match:
        p_t = 1 - (1 - 1/M) ((M-2)/(M-1))^t.
    """
    return 1 - (1 - 1 / size) * ((size - 2) / (size - 1)) ** iterations


def suppression_ratio(probabilities: np.ndarray, suppressed: np.ndarray) -> float:
    """
    Mean probability of the kept elements over the mean probability of the suppressed ones.
    :param probabilities: The counter distribution.
    :param suppressed: Boolean mask of the suppressed elements.
    :return: The ratio (infinite once the suppressed elements vanish).
    """
    probabilities = np.asarray(probabilities, dtype=float)
    suppressed = np.asarray(suppressed, dtype=bool)
    if suppressed.all() or not suppressed.any():
        raise ConfigurationError('Both kept and suppressed elements are needed for a ratio')

    denominator = probabilities[suppressed].mean()
    return float('inf') if denominator == 0 else float(probabilities[~suppressed].mean() / denominator)
