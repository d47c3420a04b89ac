"""Exception hierarchy for the analyzer.

Frontend errors carry source positions where available. Gateway errors
distinguish missing fixtures, transport problems, and schema violations
so callers can decide between aborting and degrading to a fallback.
"""

from __future__ import annotations


class AnalysisError(Exception):
    """Base class for every error raised by this package."""


class ParseError(AnalysisError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class UnknownTypeError(AnalysisError):
    """A declaration references a type name that is not declared."""


class DuplicateNameError(AnalysisError):
    """A record, global, function, parameter, or local is declared twice."""


class UnknownCalleeError(AnalysisError):
    """A call targets a name that is neither a declared function nor a modeled API."""


class MissingSummaryError(AnalysisError):
    """solve_function was invoked without a summary for one of the callees."""


class UndeclaredFieldError(AnalysisError):
    """A field access names a field absent from the record layout."""


class UnknownNodeError(AnalysisError):
    """A points-to query names a node that does not exist in the graph."""


class UnresolvedArgError(AnalysisError):
    """An API call argument expression resolves to nothing in scope."""


class InvalidPathError(AnalysisError):
    """An access path fails to parse or type-check against the layouts."""


class UnboundParamError(AnalysisError):
    """A summary op references a parameter index missing from the call binding."""


class RecursiveProgramError(AnalysisError):
    """The inline oracle refuses programs with call-graph cycles."""


class GatewayError(AnalysisError):
    """Base class for model-gateway failures."""


class FixtureMissingError(GatewayError):
    def __init__(self, path: str):
        super().__init__(f"mock fixture not found: {path}")
        self.path = path


class GatewayTransportError(GatewayError):
    """HTTP transport failure or timeout talking to the live provider."""


class SchemaViolationError(GatewayError):
    """A request or response document failed schema validation."""


class UsageError(AnalysisError):
    """Bad run configuration (bad emit target, malformed provider spec, ...)."""
