"""
Module containing the exceptions raised by the simulation library.
"""


class AmplitudeSearchError(Exception):
    """
    Base class for all errors raised by the library.
    """


class ConfigurationError(AmplitudeSearchError, ValueError):
    """
    Invalid layout, array, schedule or experiment configuration.
    """


class DomainError(AmplitudeSearchError, ValueError):
    """
    A numeric argument lies outside its mathematical domain (e.g. an angle above pi).
    """


class PreconditionError(AmplitudeSearchError, ValueError):
    """
    The input is well formed but violates a procedure precondition
    (e.g. no unique exact match, duplicates handed to a distinct-only oracle).
    """


class InternalInvariantError(AmplitudeSearchError, RuntimeError):
    """
    A numerical invariant (norm, trace, completeness) was violated during simulation.
    """
