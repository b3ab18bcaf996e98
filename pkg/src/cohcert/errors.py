"""Exception hierarchy shared by all cohcert modules.

The CLI maps these onto process exit codes: ValidationError -> 2,
RegimeError (and subclasses) -> 3, CapacityError -> 4.
"""


class CohcertError(Exception):
    """Base class for all package errors."""


class ValidationError(CohcertError):
    """Malformed input: bad shapes, non-finite entries, out-of-range parameters."""


class ShapeError(ValidationError):
    """Matrix or vector dimensions incompatible with the operation."""


class NormalizationError(ValidationError):
    """A column cannot be normalized (zero column) or is not unit norm."""


class DegenerateInputError(ValidationError):
    """Input is degenerate for the requested operation (e.g. all-zero weights)."""


class PoleEvaluationError(ValidationError):
    """Secular function evaluated at (or too close to) one of its poles."""


class RegimeError(CohcertError):
    """A bound was requested outside the regime where its formula is valid.

    Carries the failed inequalities as (name, lhs, relation, rhs) tuples so
    callers can print exactly which condition failed.
    """

    def __init__(self, message, conditions=()):
        super().__init__(message)
        self.conditions = tuple(conditions)

    def detail(self):
        lines = [str(self)]
        for name, lhs, rel, rhs in self.conditions:
            lines.append(f"  {name}: {lhs!r} {rel} {rhs!r} is false")
        return "\n".join(lines)


class AdmissibilityError(RegimeError):
    """A standing coherence / sparsity admissibility assumption is violated."""


class CapacityError(CohcertError):
    """Problem size exceeds what the exact method is allowed to attempt."""
