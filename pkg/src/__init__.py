"""
AmpReduce: simulation of oracle-free amplitude reduction search and filtering.
"""
__version__ = '1.0.0'
