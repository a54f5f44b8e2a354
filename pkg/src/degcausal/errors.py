"""Exception types raised across the package."""


class DegCausalError(Exception):
    """Base class for all package errors."""


class GraphStructureError(DegCausalError, ValueError):
    """Malformed adjacency matrix (non-binary entry, self-loop, bad shape)."""


class ComparisonError(DegCausalError, ValueError):
    """Graphs compared over different variable sets."""


class ArityError(DegCausalError, ValueError):
    """Operation requires a different number of variables."""


class InputError(DegCausalError, ValueError):
    """Empty or otherwise unusable input data."""


class DegenerateInputError(InputError):
    """A column has zero variance."""


class NumericalError(DegCausalError, ArithmeticError):
    """Rank deficiency, non-finite values or divergence in a numerical routine."""


class TestInfeasibleError(DegCausalError, ValueError):
    """Too few observations for the requested statistical test."""

    __test__ = False  # keep pytest from collecting this class


class SimulationDomainError(DegCausalError, ValueError):
    """A generative model was evaluated outside its domain."""


class ConvergenceError(DegCausalError, RuntimeError):
    """An iterative solver stopped without meeting its tolerance."""


class MetricError(DegCausalError, ValueError):
    """Metric requested on an empty or inconsistent result list."""


class ConfigError(DegCausalError, ValueError):
    """Invalid run or sweep configuration."""


class ParseError(DegCausalError, ValueError):
    """Malformed line in an input data file."""


class MappingValidationError(ParseError):
    """Columns assumed constant turned out not to be."""


class WindowError(DegCausalError, ValueError):
    """A unit is too short for the requested window."""


class ChoiceError(ConfigError):
    """A configuration value is not one of the enumerated choices."""
