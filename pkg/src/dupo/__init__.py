"""Mixed-initiative authoring of responsive chart variants.

The package splits into a spec layer (:mod:`dupo.visspec`,
:mod:`dupo.rules`), a scoring layer (:mod:`dupo.geometry`,
:mod:`dupo.ranking`), the recommender (:mod:`dupo.catalog`,
:mod:`dupo.recommender`), and the session layer (:mod:`dupo.studio`,
:mod:`dupo.export`, :mod:`dupo.service`).
"""

from .errors import (
    ActivateLockedError, CompileError, DupoError, EmptyDataError,
    ExportError, LockedArtboardError, NoActiveArtboardError,
    NoCandidatesError, SchemaError, SpecSyntaxError, StaleSuggestionError,
    UnknownEditError, UnknownEntryError, UnknownVersionError,
)
from .visspec import (
    VisSpec, copy_spec, parse_spec, serialize_spec, validate_spec,
)
from .rules import (
    TransformRule, apply_rules, describe_rules, merge_user_edits,
    rule_signature, rules_from_json, suggestion_signature, validate_rule,
)
from .geometry import GeometryEstimate, estimate_geometry, layout_detail
from .ranking import (
    DEFAULT_WEIGHTS, MeasureBreakdown, measure_pair, score_pair, select_top,
)
from .devices import DEVICE_PRESETS, DeviceProfile, display_width, preset
from .catalog import Catalog, StrategyContext, load_catalog
from .recommender import (
    ConstraintStore, QuickEditOffer, Suggestion, generate_suggestions,
    quick_edits_for, violates_locks,
)
from .studio import Session, Studio
from .export import compute_breakpoints, export_session, render_svg
from .service import create_app

__version__ = "0.1.0"

__all__ = [
    "ActivateLockedError", "Catalog", "CompileError", "ConstraintStore",
    "DEFAULT_WEIGHTS", "DEVICE_PRESETS", "DeviceProfile", "DupoError",
    "EmptyDataError", "ExportError", "GeometryEstimate",
    "LockedArtboardError", "MeasureBreakdown",
    "NoActiveArtboardError", "NoCandidatesError", "QuickEditOffer",
    "SchemaError", "Session",
    "SpecSyntaxError", "StaleSuggestionError", "StrategyContext", "Studio",
    "Suggestion", "TransformRule", "UnknownEditError", "UnknownEntryError",
    "UnknownVersionError", "VisSpec", "apply_rules", "compute_breakpoints",
    "copy_spec", "create_app", "describe_rules", "display_width",
    "estimate_geometry", "export_session", "generate_suggestions",
    "layout_detail", "load_catalog", "measure_pair", "merge_user_edits",
    "parse_spec", "preset", "quick_edits_for", "render_svg",
    "rule_signature", "rules_from_json", "score_pair", "select_top",
    "serialize_spec", "suggestion_signature", "validate_rule",
    "validate_spec", "violates_locks", "__version__",
]
