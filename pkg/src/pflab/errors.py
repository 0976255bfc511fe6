"""Exception types shared across the package.

Everything raised deliberately by this package derives from :class:`PflabError`,
so callers can catch one type at the boundary. The CLI maps subclasses onto
exit codes (see ``pflab.cli``).
"""

from __future__ import annotations


class PflabError(Exception):
    """Base class for all errors raised by this package."""


class SpecError(PflabError):
    """A game specification is malformed (bad sizes, duplicates, bad enums)."""


class SpecFileError(SpecError):
    """A spec file failed to parse or validate."""


class AdmissibleEmpty(PflabError):
    """No admissible collection exists for the given specification."""


class ProtocolViolation(PflabError):
    """A strategy broke the game protocol (illegal label, set, or order)."""


class RealizabilityViolation(PflabError):
    """A finished game violates the realizability mode it declared."""


class EmptyConsistentSet(PflabError):
    """A version space became empty, so the strategy cannot continue."""


class EmptyIntersection(PflabError):
    """A set intersection that a strategy relies on turned out empty."""


class BudgetExceeded(PflabError):
    """A configured work budget was exhausted before the computation finished."""

    def __init__(self, message: str, spent: int | None = None, budget: int | None = None):
        super().__init__(message)
        self.spent = spent
        self.budget = budget


class GridTooLarge(BudgetExceeded):
    """The measure grid for the requested resolution exceeds the grid budget."""


class TreeSpecMismatch(PflabError):
    """A shattering tree does not match the specification it is replayed on."""


class PoolExhausted(PflabError):
    """The collision adversary ran out of usable instances or window labels."""


class LabelPoolExhausted(PflabError):
    """An adversary could not find a label satisfying its reveal rule."""
