"""Exception hierarchy shared by all modules."""


class DFOError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(DFOError, ValueError):
    pass


class WrongCardinality(DFOError, ValueError):
    """Sample set size does not fit the requested model or basis."""


class NonPoised(DFOError, ArithmeticError):
    """Interpolation system is singular or too badly conditioned to trust."""


class GeometryFailure(DFOError, RuntimeError):
    """A well-poised sample set could not be produced."""


class SingularSystem(DFOError, ArithmeticError):
    """The prox system ``H + r I`` could not be factored."""


class UnknownProblem(DFOError, KeyError):
    pass


class DegenerateProblem(DFOError, ValueError):
    """The start point already attains the best known value."""


class IncompleteGrid(DFOError, ValueError):
    pass
