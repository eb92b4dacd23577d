"""Derivative-free proximal point optimisation with adaptive sample-set sizes."""
from ._kernels import USING_NUMBA, backend
from .dfpp import RunResult, SolverConfig, StopReason, solve
from .errors import (
    DegenerateProblem,
    DFOError,
    DimensionMismatch,
    GeometryFailure,
    IncompleteGrid,
    NonPoised,
    SingularSystem,
    UnknownProblem,
    WrongCardinality,
)
from .geometry import GeometryConfig, IterationOutcome
from .model_core import QuadraticModel, SampleSet, build_model
from .problems import CountedObjective, Problem, get_problem, list_problems
from .strategy import SizeRule, Strategy, enumerate_strategies

__version__ = "0.1.0"

__all__ = [
    "CountedObjective",
    "DFOError",
    "DegenerateProblem",
    "DimensionMismatch",
    "GeometryConfig",
    "GeometryFailure",
    "IncompleteGrid",
    "IterationOutcome",
    "NonPoised",
    "Problem",
    "QuadraticModel",
    "RunResult",
    "SampleSet",
    "SingularSystem",
    "SizeRule",
    "SolverConfig",
    "StopReason",
    "Strategy",
    "USING_NUMBA",
    "UnknownProblem",
    "WrongCardinality",
    "backend",
    "build_model",
    "enumerate_strategies",
    "get_problem",
    "list_problems",
    "solve",
]
