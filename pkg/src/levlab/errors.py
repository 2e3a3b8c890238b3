"""Exception hierarchy shared by all levlab modules.

The CLI maps these onto process exit codes: ParameterError -> 2,
ConvergenceError -> 3, CostGuardError -> 4.
"""


class LevlabError(Exception):
    """Base class for all levlab-specific failures."""


class ParameterError(LevlabError, ValueError):
    """Input violates a documented precondition (bad theta, R=0, imprimitive
    character where a primitive one is required, ...)."""


class ConvergenceError(LevlabError, RuntimeError):
    """A numerical routine could not reach its accuracy target: quadrature
    refused to settle, an Euler-Maclaurin tail bound would not shrink, or a
    contour passed too close to a zero."""


class CostGuardError(LevlabError, RuntimeError):
    """Requested computation exceeds the documented desk-scale cost guard."""
