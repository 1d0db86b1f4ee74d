"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class CritGradError(Exception):
    """Base class for every error raised by the package."""


class InvalidMeshError(CritGradError, ValueError):
    pass


class DimensionError(CritGradError, ValueError):
    pass


class ExprError(CritGradError, ValueError):
    """Parse or evaluation failure; ``offset`` is the byte offset when known."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (at offset {offset})")
        self.offset = offset


class ExprSyntaxError(ExprError):
    pass


class UnknownIdentifierError(ExprError):
    pass


class ArityError(ExprError):
    pass


class EvalDomainError(ExprError):
    """Evaluation left the domain of a function; ``point`` holds the coordinates."""

    def __init__(self, message: str, point: tuple[float, ...] | None = None):
        super().__init__(message if point is None else f"{message} at point {point}")
        self.point = point


class AssumptionError(CritGradError, ValueError):
    """Problem data violate the sign or splitting assumptions; ``nodes`` lists offenders."""

    def __init__(self, message: str, nodes: list[int] | None = None):
        super().__init__(message)
        self.nodes = list(nodes or [])


class TransformDomainError(CritGradError, ValueError):
    def __init__(self, message: str, node: int | None = None):
        super().__init__(message)
        self.node = node


class SolverError(CritGradError, RuntimeError):
    """Base for numerical failures; ``diagnostics`` is a JSON-friendly dict."""

    def __init__(self, message: str, diagnostics: dict | None = None, iterate=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
        self.iterate = iterate


class FactorizationError(SolverError):
    pass


class NoConvergenceError(SolverError):
    pass


class MonotonicityError(SolverError):
    pass


class BarrierError(SolverError):
    pass


class GeometryAbsentError(SolverError):
    pass


class UnboundedIterateError(SolverError):
    pass


class BlowdownNotFoundError(SolverError):
    pass


class NoEigenvalueError(SolverError):
    pass


class BracketError(SolverError):
    pass


class UnknownScenarioError(CritGradError, KeyError):
    pass


class ConfigError(CritGradError, ValueError):
    pass
