"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: input-type errors exit 2, numeric
errors exit 3.
"""


class GraphGeomError(Exception):
    """Base class for all toolkit errors."""


class GraphInputError(GraphGeomError, ValueError):
    """Malformed or inconsistent input (bad endpoints, shape mismatch, missing labels)."""


class DegenerateLabelsError(GraphInputError):
    """The label distribution leaves a metric undefined (one effective class)."""


class ConfigurationError(GraphInputError):
    """A parameter combination cannot be satisfied for the given graph."""


class InsufficientSpectrumError(ConfigurationError):
    """Fewer nontrivial Laplacian modes exist than were requested."""


class NumericError(GraphGeomError, ArithmeticError):
    """A numerical routine failed (e.g. eigensolver non-convergence)."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
