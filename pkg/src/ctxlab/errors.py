"""Exception hierarchy shared across the package."""


class CtxlabError(Exception):
    """Base class for all package-specific errors."""


class StructuralError(CtxlabError):
    """Shape/dimension mismatches, stale vertex sets, malformed inputs."""


class InvalidInputError(CtxlabError):
    """An operation received a scenario/behavior/operation that fails validation."""


class BudgetExceededError(CtxlabError):
    """A combinatorial enumeration would exceed its configured basis budget."""


class RejectionBudgetError(CtxlabError):
    """Rejection sampling failed to produce a valid object within its retry budget."""


class CompositionError(CtxlabError):
    """Two operations whose chained action is not expressible as a single operation."""
