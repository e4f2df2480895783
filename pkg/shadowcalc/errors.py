from dataclasses import dataclass, field
from typing import Any, List, Tuple


class ShadowcalcError(Exception):
    """Base class for engine errors. `code` is stable and used by the CLI."""

    def __init__(self, message: str = "", **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    @property
    def code(self) -> str:
        return type(self).__name__

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message,
                "details": {k: repr(v) for k, v in self.details.items()}}


# --- graph-core / labeled-graphs ---
class InvalidMorphism(ShadowcalcError): pass
class CompositionMismatch(ShadowcalcError): pass
class GraphMismatch(ShadowcalcError): pass
class OrientationClash(ShadowcalcError): pass
class NotInternalWhite(ShadowcalcError): pass

# --- colorings ---
class UnsupportedGrayCycle(ShadowcalcError): pass
class OrderViolation(ShadowcalcError): pass
class NotAFlipSquare(ShadowcalcError): pass
class InconsistentGlue(ShadowcalcError): pass

# --- base-finset ---
class NotCommuting(ShadowcalcError): pass
class NotSingleFlip(ShadowcalcError): pass

# --- backends ---
class BaseMismatch(ShadowcalcError): pass
class ShapeMismatch(ShadowcalcError): pass
class NotBeckChevalley(ShadowcalcError): pass
class NotDualizable(ShadowcalcError): pass

# --- evaluator / coherence ---
class StampMismatch(ShadowcalcError): pass
class PathMismatch(ShadowcalcError): pass

# --- io ---
class ParseError(ShadowcalcError):
    def __init__(self, message: str = "", line: int = 0, column: int = 0, **details: Any):
        super().__init__(message, line=line, column=column, **details)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Issue:
    code: str
    ids: Tuple[Any, ...]
    message: str

    def to_dict(self) -> dict:
        return {"code": self.code, "ids": list(self.ids), "message": self.message}


@dataclass
class ValidationReport:
    """Result of a total validation operation. Valid iff no issues."""
    issues: List[Issue] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.issues

    def add(self, code: str, ids, message: str) -> None:
        self.issues.append(Issue(code, tuple(ids), message))

    def extend(self, other: "ValidationReport") -> None:
        self.issues.extend(other.issues)

    def codes(self) -> List[str]:
        return [i.code for i in self.issues]

    def to_dict(self) -> dict:
        return {"valid": self.valid, "issues": [i.to_dict() for i in self.issues]}
