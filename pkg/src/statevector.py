"""
Module containing the dense pure-state simulator of the data register C, the counter
    register D and the ancilla qubits.

Amplitudes are stored as a complex tensor indexed (ancilla, data, counter); bit 0 of
    every register is its least significant qubit.
"""
import logging
import math

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from src.errors import ConfigurationError, InternalInvariantError
from src.models import ArraySpec, Histogram, Register, RegisterLayout
from src.rotations import RotationOperator

__all__ = ['PureState', 'init_entangled_load', 'apply_counter_operator', 'apply_conditioned_rotation',
           'mark_flag', 'record_counter', 'reload_data', 'marginal_distribution',
           'measure_and_collapse', 'sample_histogram', 'sample_counts', 'spawn_generators']

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10

# Shots drawn per generator stream; block b uses child b of SeedSequence(seed)
SHOT_BLOCK = 8192

REGISTER_AXIS = {
    Register.ANCILLA: 0,
    Register.DATA: 1,
    Register.COUNTER: 2,
}

ControlPredicate = Callable[[np.ndarray, np.ndarray], np.ndarray]
LabelPredicate = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


class PureState:
    """
    Class to represent a normalized pure state over a register layout.
    """
    def __init__(self, amplitudes: np.ndarray, layout: RegisterLayout):
        self.__layout = layout
        self.__tensor = np.asarray(amplitudes, dtype=np.complex128).reshape(layout.shape)
        self.check_norm()

    @property
    def layout(self) -> RegisterLayout:
        """
        Getter for the register layout.
        :return: The register layout.
        """
        return self.__layout

    @property
    def tensor(self) -> np.ndarray:
        """
        Getter for a copy of the amplitude tensor, shaped (ancilla, data, counter).
        :return: The amplitude tensor.
        """
        return self.__tensor.copy()

    @property
    def amplitudes(self) -> np.ndarray:
        """
        Getter for a copy of the flat amplitude vector.
        :return: The amplitude vector.
        """
        return self.__tensor.reshape(-1).copy()

    @property
    def norm(self) -> float:
        """
        L2 norm of the amplitudes.
        :return: The norm.
        """
        return float(np.linalg.norm(self.__tensor))

    def check_norm(self):
        """
        Raise if the state drifted away from unit norm.
        """
        if abs(self.norm - 1) > NORM_TOLERANCE:
            raise InternalInvariantError(f'State norm drifted to {self.norm:.15f}')

    def amplitude(self, data: int, counter: int, ancilla: int = 0) -> complex:
        """
        Amplitude of one computational basis state.
        :param data: The data register value.
        :param counter: The counter value.
        :param ancilla: The ancilla bits.
        :return: The amplitude.
        """
        return complex(self.__tensor[ancilla, data, counter])


def labels(layout: RegisterLayout) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Basis labels of every tensor entry.
    :param layout: The layout.
    :return: Ancilla, data and counter label grids that broadcast to the tensor shape.
    """
    ancilla, data, counter = np.indices(layout.shape, sparse=True)
    return ancilla, data, counter


def init_entangled_load(array: ArraySpec, layout: RegisterLayout) -> PureState:
    """
    Prepare (1/sqrt(M)) sum_k |A_k>_C |k>_D |0...0>_anc by direct construction.
    :param array: The classical array.
    :param layout: The layout to load into.
    :return: The loaded state.
    """
    array.check(layout)

    tensor = np.zeros(layout.shape, dtype=np.complex128)
    tensor[0, list(array.elements), np.arange(array.size)] = 1 / math.sqrt(array.size)
    logger.debug('Loaded %d elements into n=%d, m=%d, ancilla=%d', array.size,
                 layout.n_data_bits, layout.m_counter_bits, layout.n_ancilla)

    return PureState(tensor, layout)


def apply_counter_operator(state: PureState, op: np.ndarray, control: ControlPredicate) -> PureState:
    """
    Apply an operator to D on every branch whose (ancilla, data) labels satisfy a control.
    :param state: The input state.
    :param op: A 2^m x 2^m operator.
    :param control: Predicate over (ancilla, data) label grids.
    :return: The new state.
    """
    layout = state.layout
    if op.shape != (layout.counter_size, layout.counter_size):
        raise ConfigurationError(f'Operator of shape {op.shape} does not act on a '
                                 f'{layout.counter_size}-dimensional counter')

    ancilla, data = np.indices(layout.shape[:2])
    mask = np.asarray(control(ancilla, data), dtype=bool)

    tensor = state.tensor
    tensor[mask] = tensor[mask] @ op.T

    return PureState(tensor, layout)


def apply_conditioned_rotation(state: PureState, data_bit: int, bit_value_of_b: int,
                               op: RotationOperator) -> PureState:
    """
    Rotate D on every branch where bit `data_bit` of C differs from the same bit of B.
    :param state: The input state.
    :param data_bit: Data bit index, 0 being the least significant.
    :param bit_value_of_b: The value (0 or 1) of that bit in B.
    :param op: The rotation, A(phi) on the counter.
    :return: The new state.
    """
    if not 0 <= data_bit < state.layout.n_data_bits:
        raise ConfigurationError(f'Data bit {data_bit} is outside the {state.layout.n_data_bits}-bit register')

    return apply_counter_operator(state, op.matrix,
                                  lambda _, data: ((data >> data_bit) & 1) != bit_value_of_b)


def xor_into_ancilla(state: PureState, values: np.ndarray) -> PureState:
    """
    Permute amplitudes so that |a, c, k> becomes |a XOR v(a, c, k), c, k>.
    :param state: The input state.
    :param values: Ancilla bit patterns, broadcastable to the tensor shape.
    :return: The new state.
    """
    ancilla, data, counter = labels(state.layout)
    values = np.broadcast_to(values, state.layout.shape)
    if np.any(values >= state.layout.ancilla_size):
        raise ConfigurationError('Ancilla pattern does not fit in the reserved ancilla qubits')

    source = state.tensor
    tensor = np.zeros_like(source)
    tensor[ancilla ^ values, data, counter] = source

    return PureState(tensor, state.layout)


def mark_flag(state: PureState, qubit: int, predicate: LabelPredicate) -> PureState:
    """
    Flip one ancilla qubit on every branch satisfying a predicate (X, multi-controlled NOT, X).
    :param state: The input state.
    :param qubit: Ancilla qubit index.
    :param predicate: Predicate over (ancilla, data, counter) label grids.
    :return: The new state.
    """
    ancilla, data, counter = labels(state.layout)
    flags = np.asarray(predicate(ancilla, data, counter), dtype=np.int64)

    return xor_into_ancilla(state, flags << qubit)


def record_counter(state: PureState, offset: int) -> PureState:
    """
    Deferred measurement of D: copy every counter qubit into a fresh ancilla with CNOTs.
    :param state: The input state.
    :param offset: First ancilla qubit of the record block.
    :return: The new state.
    """
    _, _, counter = labels(state.layout)

    return xor_into_ancilla(state, counter << offset)


def reload_data(state: PureState, offset: int, elements: tuple[int, ...]) -> PureState:
    """
    Re-entangle an ancilla block with the array: |k>_D |x> -> |k>_D |x XOR A_k>.
    :param state: The input state.
    :param offset: First ancilla qubit of the reload block.
    :param elements: The array elements, one per counter state.
    :return: The new state.
    """
    _, _, counter = labels(state.layout)
    values = np.asarray(elements, dtype=np.int64)[counter]

    return xor_into_ancilla(state, values << offset)


def marginal_distribution(state: PureState, register: Register) -> np.ndarray:
    """
    Born-rule marginal of one register.
    :param state: The state.
    :param register: The register to keep.
    :return: Probability vector indexed by the register value.
    """
    axis = REGISTER_AXIS[register]
    others = tuple(index for index in range(3) if index != axis)

    return np.sum(np.abs(state.tensor) ** 2, axis=others)


def measure_and_collapse(state: PureState, register: Register,
                         rng: np.random.Generator) -> tuple[int, PureState]:
    """
    Projectively measure one register.
    :param state: The state.
    :param register: The register to measure.
    :param rng: The random generator.
    :return: The outcome and the renormalized post-measurement state.
    """
    probabilities = marginal_distribution(state, register)
    outcome = int(rng.choice(len(probabilities), p=probabilities / probabilities.sum()))
    if probabilities[outcome] <= 0:
        raise InternalInvariantError(f'Measured outcome {outcome} has zero probability')

    register_labels = labels(state.layout)[REGISTER_AXIS[register]]
    tensor = np.where(register_labels == outcome, state.tensor, 0) / math.sqrt(probabilities[outcome])

    return outcome, PureState(tensor, state.layout)


def spawn_generators(seed: int, shots: int) -> list[tuple[int, np.random.Generator]]:
    """
    Split a shot budget into fixed blocks, each with its own child stream.
    :param seed: The root seed.
    :param shots: Number of shots.
    :return: (block size, generator) pairs in block order.
    """
    blocks = [min(SHOT_BLOCK, shots - start) for start in range(0, shots, SHOT_BLOCK)]
    children = np.random.SeedSequence(seed).spawn(len(blocks))

    return [(size, np.random.default_rng(child)) for size, child in zip(blocks, children)]


def sample_counts(probabilities: np.ndarray, shots: int, seed: int, workers: int = 1) -> np.ndarray:
    """
    Draw multinomial counts block by block; the result does not depend on `workers`.
    :param probabilities: The distribution to sample.
    :param shots: Number of shots.
    :param seed: The root seed.
    :param workers: Number of threads drawing blocks.
    :return: Counts per outcome.
    """
    if shots < 1:
        raise ConfigurationError(f'At least one shot is required, got {shots}')

    pvals = np.clip(np.asarray(probabilities, dtype=float), 0, None)
    pvals = pvals / pvals.sum()

    def draw(block: tuple[int, np.random.Generator]) -> np.ndarray:
        """Multinomial counts of one shot block."""
        size, rng = block
        return rng.multinomial(size, pvals)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        partial_counts = list(executor.map(draw, spawn_generators(seed, shots)))

    return np.sum(partial_counts, axis=0)


def sample_histogram(state: PureState, register: Register, shots: int, seed: int,
                     workers: int = 1) -> Histogram:
    """
    Non-collapsing seeded sampling of one register.
    :param state: The state.
    :param register: The register to sample.
    :param shots: Number of shots.
    :param seed: The root seed.
    :param workers: Number of threads drawing shot blocks.
    :return: The histogram, with the exact marginal attached.
    """
    probabilities = marginal_distribution(state, register)
    counts = sample_counts(probabilities, shots, seed, workers)
    exact = probabilities / probabilities.sum()

    return Histogram({index: int(count) for index, count in enumerate(counts)}, shots, seed,
                     tuple(float(p) for p in exact))
