"""Candidate generation for the three recommendation flows.

Exploration proposes whole-design variants of a source spec for a target
device; alteration layers low-level follow-ups on one of those variants;
quick edits react to a single edit the user just made.  All three draw
from the strategy catalog, compile candidates through the rule engine,
score them against the source, and respect the session's constraint
store (locks, hidden transformations, already-served batches).
"""

from __future__ import annotations

import hashlib
import uuid
from dataclasses import dataclass
from typing import Optional

from . import devices
from .catalog import Catalog, StrategyContext, StrategyEntry, instantiate_rules, eval_conditions
from .errors import CompileError, EmptyDataError, NoCandidatesError
from .geometry import annotation_anchor_distance, layout_detail
from .ranking import measure_pair, select_top
from .rules import TransformRule, apply_rules, rule_signature, suggestion_signature
from .visspec import SpecifierPath, VisSpec, resolve_specifier, serialize_spec

ANCHOR_NEAR_PX = 20.0
ANCHOR_FAR_PX = 60.0


@dataclass
class Suggestion:
    id: str
    entryId: str
    level: str
    description: str
    drastic: bool
    rules: list
    signature: str
    scores: dict
    resultSpec: VisSpec
    parentSuggestionId: Optional[str] = None

    def rule_signatures(self) -> set:
        return {rule_signature(r) for r in self.rules}

    def to_dict(self):
        return {
            "id": self.id,
            "entryId": self.entryId,
            "level": self.level,
            "description": self.description,
            "drastic": self.drastic,
            "rules": [r.to_dict() for r in self.rules],
            "signature": self.signature,
            "scores": dict(self.scores),
            "resultSpec": self.resultSpec.to_dict(),
            "parentSuggestionId": self.parentSuggestionId,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Suggestion":
        return cls(
            id=d["id"], entryId=d["entryId"], level=d["level"],
            description=d["description"], drastic=bool(d["drastic"]),
            rules=[TransformRule.from_dict(r, path="suggestion.rules")
                   for r in d["rules"]],
            signature=d["signature"], scores=dict(d["scores"]),
            resultSpec=VisSpec.from_dict(d["resultSpec"], path="suggestion.resultSpec"),
            parentSuggestionId=d.get("parentSuggestionId"),
        )


@dataclass
class QuickEditOffer:
    id: str
    entryId: str
    description: str
    rules: list
    signature: str

    def to_dict(self):
        return {
            "id": self.id,
            "entryId": self.entryId,
            "description": self.description,
            "rules": [r.to_dict() for r in self.rules],
            "signature": self.signature,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QuickEditOffer":
        return cls(
            id=d["id"], entryId=d["entryId"], description=d["description"],
            rules=[TransformRule.from_dict(r, path="quickEdit.rules")
                   for r in d["rules"]],
            signature=d["signature"],
        )


class ConstraintStore:
    """User constraints that shape generation, session-wide.

    ``elementLocks``/``positionLocks`` hold "role|selector" keys.
    ``hiddenSignatures`` holds signatures of individual rules banned by
    hide-this; ``served`` remembers suggestion signatures already shown,
    keyed by scope.
    """

    def __init__(self):
        self.elementLocks = set()
        self.positionLocks = set()
        self.hiddenSignatures = set()
        self.served = {}

    def set_lock(self, key: str, kind: str, on: bool) -> None:
        locks = self.elementLocks if kind == "element" else self.positionLocks
        if on:
            locks.add(key)
        else:
            locks.discard(key)

    def hidden_hit(self, rules) -> bool:
        return any(rule_signature(r) in self.hiddenSignatures for r in rules)

    def register_hidden(self, hidden: "Suggestion", displayed) -> list:
        """Ban rule signatures unique to the hidden suggestion.

        Returns the newly banned signatures so a later revert can lift
        exactly these.
        """
        others = set()
        for s in displayed:
            if s.id != hidden.id:
                others |= s.rule_signatures()
        added = []
        for r in hidden.rules:
            sig = rule_signature(r)
            if sig in others or sig in self.hiddenSignatures:
                continue
            self.hiddenSignatures.add(sig)
            added.append(sig)
        return added

    def revert_hidden(self, signatures) -> None:
        for sig in signatures:
            self.hiddenSignatures.discard(sig)

    def is_served(self, scope: str, signature: str) -> bool:
        return signature in self.served.get(scope, set())

    def mark_served(self, scope: str, signatures) -> None:
        self.served.setdefault(scope, set()).update(signatures)

    def unmark_served(self, scope: str, signature: str) -> None:
        self.served.get(scope, set()).discard(signature)

    def to_dict(self):
        return {
            "elementLocks": sorted(self.elementLocks),
            "positionLocks": sorted(self.positionLocks),
            "hiddenSignatures": sorted(self.hiddenSignatures),
            "served": {k: sorted(v) for k, v in sorted(self.served.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConstraintStore":
        store = cls()
        store.elementLocks = set(d.get("elementLocks", []))
        store.positionLocks = set(d.get("positionLocks", []))
        store.hiddenSignatures = set(d.get("hiddenSignatures", []))
        for scope, sigs in d.get("served", {}).items():
            store.served[scope] = set(sigs)
        return store


@dataclass
class GenerationStats:
    enumerated: int = 0
    conditionRejected: int = 0
    placeholderRejected: int = 0
    compileRejected: int = 0
    emptyData: int = 0
    lockRejected: int = 0
    hiddenRejected: int = 0
    duplicate: int = 0
    alreadyServed: int = 0
    noop: int = 0
    scored: int = 0

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


# ---------------------------------------------------------------------------
# lock enforcement

# properties a position lock pins; an element lock pins everything else
POSITION_PROPS = {
    "annotation": ("dx", "dy", "anchorKey", "anchorX", "anchorY", "placement"),
    "title": ("placement",),
    "legend": ("position",),
    "tooltip": ("fixedPosition",),
    "layout": ("direction", "maxPerRow"),
    "size": ("width", "height"),
}


def _element_state(spec: VisSpec, path: SpecifierPath) -> Optional[dict]:
    el = resolve_specifier(spec, path)
    if el is None:
        return None
    role = path.role
    if role == "size":
        return {"width": spec.width, "height": spec.height, "fontScale": spec.fontScale}
    if role == "layout":
        return {"facet": spec.facet.to_dict() if spec.facet else None}
    if role == "data":
        return {"transform": spec.transform.to_dict() if spec.transform else None}
    if role == "mark":
        return {"markType": el.markType, "style": el.style.to_dict(),
                "tooltip": el.tooltip.to_dict()}
    return el.to_dict()


def _parse_lock_key(key: str) -> SpecifierPath:
    role, _, sel = key.partition("|")
    selector = sel if sel else None
    if role in ("mark", "tooltip") and selector is not None:
        selector = int(selector)
    return SpecifierPath(role=role, selector=selector)


def violates_locks(reference: VisSpec, candidate: VisSpec,
                   element_locks, position_locks) -> bool:
    """True when the candidate disturbs an element the user pinned.

    Judged on outcomes, not rule text: a variant that removes a locked
    legend indirectly (say by dropping its channel) still violates.  An
    element lock pins existence and every non-position property, leaving
    repositioning allowed; a position lock pins the position properties.
    """
    for key in position_locks:
        path = _parse_lock_key(key)
        ref = _element_state(reference, path)
        if ref is None:
            continue
        cand = _element_state(candidate, path)
        if cand is None:
            return True
        for prop in POSITION_PROPS.get(path.role, ()):
            if ref.get(prop) != cand.get(prop):
                return True
    for key in element_locks:
        path = _parse_lock_key(key)
        ref = _element_state(reference, path)
        if ref is None:
            continue
        cand = _element_state(candidate, path)
        if cand is None:
            return True
        pos_props = POSITION_PROPS.get(path.role, ())
        for prop in ref:
            if prop in pos_props:
                continue
            if ref.get(prop) != cand.get(prop):
                return True
    return False


# ---------------------------------------------------------------------------
# exploration and alteration


def _suggestion_id() -> str:
    return "sug-" + uuid.uuid4().hex[:10]


def generate_suggestions(
    source_spec: VisSpec,
    source_device,
    target_device,
    catalog: Catalog,
    constraints: ConstraintStore,
    scope: str,
    *,
    reference_spec: Optional[VisSpec] = None,
    weights: Optional[dict] = None,
    max_n: int = 6,
    drastic_ratio: float = 0.5,
    parent: Optional[Suggestion] = None,
) -> list:
    """Build a ranked batch; raises NoCandidatesError when nothing survives.

    Exploration (no ``parent``) enumerates high-level catalog entries
    against the source spec and never repeats a served signature within
    the scope.  Alteration enumerates low-level entries against the
    parent's compiled spec; served combinations are deferred behind
    fresh ones rather than excluded, so repeated calls walk the space.
    """
    stats = GenerationStats()
    src_detail = layout_detail(source_spec)

    if parent is None:
        entries = catalog.exploration
        direction = devices.edit_direction(source_device.cls)
        if direction == "desktopFirst" and target_device.cls == "tablet":
            entries = [e for e in entries if not e.drastic]
        base_spec = source_spec
        base_rules = []
        parent_rule_sigs = set()
    else:
        entries = catalog.alteration
        base_spec = parent.resultSpec
        base_rules = list(parent.rules)
        parent_rule_sigs = parent.rule_signatures()

    ctx = StrategyContext(spec=base_spec, source_device=source_device,
                          target_device=target_device)
    base_sig = serialize_spec(base_spec)

    fresh = []
    deferred = []
    seen = set()
    for entry in entries:
        stats.enumerated += 1
        if not eval_conditions(entry.when, ctx):
            stats.conditionRejected += 1
            continue
        rules = instantiate_rules(entry, ctx)
        if rules is None:
            stats.placeholderRejected += 1
            continue
        if parent_rule_sigs and any(rule_signature(r) in parent_rule_sigs
                                    for r in rules):
            stats.duplicate += 1
            continue
        try:
            candidate = apply_rules(base_spec, rules)
        except (CompileError, EmptyDataError):
            stats.compileRejected += 1
            continue
        if serialize_spec(candidate) == base_sig:
            stats.noop += 1
            continue
        all_rules = base_rules + rules
        signature = suggestion_signature(all_rules)
        if signature in seen:
            stats.duplicate += 1
            continue
        seen.add(signature)
        if constraints.hidden_hit(all_rules):
            stats.hiddenRejected += 1
            continue
        served = constraints.is_served(scope, signature)
        if served and parent is None:
            stats.alreadyServed += 1
            continue
        if violates_locks(reference_spec or source_spec, candidate,
                          constraints.elementLocks, constraints.positionLocks):
            stats.lockRejected += 1
            continue
        try:
            breakdown = measure_pair(src_detail, layout_detail(candidate), weights)
        except EmptyDataError:
            stats.emptyData += 1
            continue
        stats.scored += 1
        drastic = entry.drastic if parent is None else parent.drastic
        suggestion = Suggestion(
            id=_suggestion_id(),
            entryId=entry.id,
            level="exploration" if parent is None else "alteration",
            description=entry.description,
            drastic=drastic,
            rules=all_rules,
            signature=signature,
            scores=breakdown.to_dict(),
            resultSpec=candidate,
            parentSuggestionId=parent.id if parent else None,
        )
        item = (breakdown.combined, drastic, suggestion)
        if served:
            stats.alreadyServed += 1
            deferred.append(item)
        else:
            fresh.append(item)

    picked = select_top(fresh, max_n, drastic_ratio)
    if len(picked) < max_n and deferred:
        picked.extend(select_top(deferred, max_n - len(picked), drastic_ratio))
    if not picked:
        raise NoCandidatesError(stats.to_dict())
    constraints.mark_served(scope, [s.signature for s in picked])
    return picked


# ---------------------------------------------------------------------------
# quick edits


def _resize_qualifier(spec_before: VisSpec, spec_after: VisSpec) -> Optional[str]:
    before = spec_before.width * spec_before.height
    after = spec_after.width * spec_after.height
    if after < before:
        return "smaller"
    if after > before:
        return "larger"
    return None


def _edit_selector(rule: TransformRule):
    sel = rule.specifier.selector
    if sel is None and rule.specifier.role == "annotation" and rule.option:
        sel = rule.option.get("id")
    return sel


def _trigger_matches(entry: StrategyEntry, rule: TransformRule,
                     spec_before: VisSpec, spec_after: VisSpec) -> bool:
    t = entry.trigger
    if t is None:
        return False
    if t.role != rule.specifier.role or t.action != rule.action:
        return False
    if t.selector is not None and t.selector != rule.specifier.selector:
        return False
    if t.qualifier in ("smaller", "larger"):
        return _resize_qualifier(spec_before, spec_after) == t.qualifier
    if t.qualifier in ("near", "far"):
        sel = _edit_selector(rule)
        if not isinstance(sel, str):
            return False
        dist = annotation_anchor_distance(spec_after, sel)
        if dist is None:
            return False
        return dist < ANCHOR_NEAR_PX if t.qualifier == "near" else dist > ANCHOR_FAR_PX
    return True


def quick_edits_for(
    rule: TransformRule,
    spec_before: VisSpec,
    spec_after: VisSpec,
    device,
    catalog: Catalog,
    constraints: ConstraintStore,
) -> list:
    """Offers reacting to one just-applied edit; may be empty."""
    offers = []
    seen = set()
    ctx = StrategyContext(spec=spec_after, source_device=device,
                          target_device=device,
                          last_selector=_edit_selector(rule))
    after_sig = serialize_spec(spec_after)
    for entry in catalog.quick_edits:
        if entry.devices and device.cls not in entry.devices:
            continue
        if not _trigger_matches(entry, rule, spec_before, spec_after):
            continue
        if not eval_conditions(entry.stateWhen, ctx):
            continue
        qe_rules = instantiate_rules(entry, ctx)
        if qe_rules is None:
            continue
        try:
            result = apply_rules(spec_after, qe_rules)
        except (CompileError, EmptyDataError):
            continue
        if serialize_spec(result) == after_sig:
            continue
        if constraints.hidden_hit(qe_rules):
            continue
        signature = suggestion_signature(qe_rules)
        if signature in seen or constraints.is_served("quickEdit", signature):
            continue
        seen.add(signature)
        offers.append(QuickEditOffer(
            id="qe-" + hashlib.sha1(signature.encode("utf-8")).hexdigest()[:8],
            entryId=entry.id,
            description=entry.description,
            rules=qe_rules,
            signature=signature,
        ))
    return offers


__all__ = [
    "ANCHOR_NEAR_PX", "ANCHOR_FAR_PX", "POSITION_PROPS",
    "Suggestion", "QuickEditOffer", "ConstraintStore", "GenerationStats",
    "violates_locks", "generate_suggestions", "quick_edits_for",
]
