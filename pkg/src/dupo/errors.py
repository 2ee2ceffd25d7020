"""Error types shared across the engine.

Every error that crosses a module boundary lives here so that the service
layer can map exception classes onto HTTP status codes without importing
half the package.
"""

from __future__ import annotations


class DupoError(Exception):
    """Base class for all engine errors."""


class SpecSyntaxError(DupoError):
    """The input was not parseable JSON at all."""


class SchemaError(DupoError):
    """Structurally invalid spec, rule, or device payload.

    ``path`` is a dotted/indexed location string such as
    ``layers[0].encodings[1]`` pointing at the offending node.
    """

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class CompileError(DupoError):
    """A transformation rule produced an invalid spec.

    ``rule_index`` is the position of the offending rule in the list that
    was being compiled.
    """

    def __init__(self, message: str, rule_index: int = -1):
        self.rule_index = rule_index
        super().__init__(message)


class EmptyDataError(DupoError):
    """Geometry was requested for a spec whose data pipeline yields no rows."""


class NoCandidatesError(DupoError):
    """Every strategy was pruned; carries counters explaining why."""

    def __init__(self, stats: dict):
        self.stats = dict(stats)
        detail = ", ".join(f"{k}={v}" for k, v in sorted(self.stats.items()))
        super().__init__(f"no candidates survive pruning ({detail})")


class StaleSuggestionError(DupoError):
    """A suggestion was acted on after its generation context went away."""


class LockedArtboardError(DupoError):
    """A mutating operation addressed a locked artboard."""


class ActivateLockedError(LockedArtboardError):
    """Attempt to activate a locked artboard."""


class NoActiveArtboardError(DupoError):
    """An edit arrived while no artboard is active (or a locked one was addressed)."""


class UnknownEditError(DupoError):
    """Edit id not present in the artboard history."""


class UnknownVersionError(DupoError):
    """Version id not present on the artboard."""


class UnknownEntryError(DupoError):
    """Exploration-history entry id unknown or not revertable."""


class ExportError(DupoError):
    """The artboard set cannot be exported (e.g. duplicate device widths)."""
