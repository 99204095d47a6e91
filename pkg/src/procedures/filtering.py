"""
Module containing filter mode: a pi rotation conditioned on equality with an
    unwanted value drives its counter bin to zero.
"""
import logging
import math

import numpy as np

from src.models import ArraySpec, Register, SignVariant
from src.rotations import build_rotation, build_sign_matrix
from src.statevector import PureState, apply_counter_operator, init_entangled_load, marginal_distribution

__all__ = ['filter_exclude']

logger = logging.getLogger(__name__)


def filter_exclude(array: ArraySpec, exclude: int,
                   signs: SignVariant = SignVariant.DOUBLING) -> tuple[PureState, np.ndarray]:
    """
    Apply A(pi) to D on the branches where C equals the excluded value.
    :param array: The classical array.
    :param exclude: The value to filter out.
    :param signs: The sign pattern of the rotation.
    :return: The final state and the exact counter distribution.
    """
    state = init_entangled_load(array, array.layout())
    matches = array.indices_of(exclude)

    if not matches:
        logger.warning('Value %d is not in the array, nothing to filter', exclude)
        return state, marginal_distribution(state, Register.COUNTER)
    if len(matches) > 1:
        logger.warning('Value %d occurs at indices %s; their bins reach zero only without interference',
                       exclude, matches)

    logger.info('Filtering %d out of %d elements', exclude, array.size)
    flip = build_rotation(build_sign_matrix(array.m_counter_bits, signs), math.pi).matrix
    state = apply_counter_operator(state, flip, lambda _, data: data == exclude)

    return state, marginal_distribution(state, Register.COUNTER)
