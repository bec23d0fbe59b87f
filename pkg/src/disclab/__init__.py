"""disclab: Set-Splitting reductions to vector balancing, with small exact oracles."""
from . import covariance, oracle, reduce_biased, reduce_zero, setsplit, tail_analysis
from .distribution import SigningDistribution
from .errors import (
    CapacityError,
    ConstructionError,
    DimensionError,
    DisclabError,
    GenerationError,
    ParameterError,
    PreconditionError,
    ValidationError,
)
from .setsplit import Assignment, SetSplitInstance

__version__ = "0.1.0"
