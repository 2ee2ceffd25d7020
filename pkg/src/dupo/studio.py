"""The multi-artboard editing session.

One session holds artboards for different devices, each with an edit
history over a base spec (the invariant: replaying the non-undone history
over the base reproduces the current spec).  Edits land on the active
artboard and propagate to unlocked siblings; suggestions rebase an
artboard's history onto the snapshot they were generated from; versions
are whole-spec snapshots that can be previewed or checked out.

Timestamps are a per-session logical counter, never wall-clock time, so
replays and persisted files are stable.  Every mutation appends a command
record, then rewrites the session state file.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .catalog import Catalog, load_catalog
from .devices import display_width, edit_direction, preset
from .errors import (
    ActivateLockedError, CompileError, LockedArtboardError,
    NoActiveArtboardError, NoCandidatesError, SchemaError,
    StaleSuggestionError, UnknownEditError, UnknownEntryError,
    UnknownVersionError,
)
from .recommender import (
    ConstraintStore, QuickEditOffer, Suggestion, generate_suggestions,
    quick_edits_for,
)
from .rules import (
    Provenance, TransformRule, apply_rules, merge_user_edits, skip_reason,
    validate_rule,
)
from .visspec import (
    SPECIFIER_ROLES, DeviceProfile, VisSpec, copy_spec, serialize_spec,
    validate_spec,
)

EDIT_PROVENANCE = ("manual", "directManipulation")
WARNING_CAP = 100
MIN_ARTBOARD_SIDE = 80

SORT_CRITERIA = ("combined", "trend", "identification", "comparison",
                 "text", "overplot", "occupation")
VERBOSITY_LEVELS = ("transformationsOnly", "withRationales")
HISTORY_ACTIONS = ("applied", "branched", "hidden", "hiddenReverted")


@dataclass
class EditRecord:
    id: str
    rule: TransformRule
    provenance: Provenance
    undone: bool = False
    propagatedFrom: Optional[str] = None

    def to_dict(self):
        return {"id": self.id,
                "rule": self.rule.to_dict(),
                "provenance": self.provenance.to_dict(),
                "undone": self.undone,
                "propagatedFrom": self.propagatedFrom}

    @classmethod
    def from_dict(cls, d: dict) -> "EditRecord":
        return cls(id=d["id"],
                   rule=TransformRule.from_dict(d["rule"], path="editHistory"),
                   provenance=Provenance.from_dict(d["provenance"]),
                   undone=bool(d.get("undone", False)),
                   propagatedFrom=d.get("propagatedFrom"))


@dataclass
class Version:
    id: str
    label: str
    spec: VisSpec
    suggested: bool
    tick: int

    def to_dict(self):
        return {"id": self.id, "label": self.label, "spec": self.spec.to_dict(),
                "suggested": self.suggested, "tick": self.tick}

    @classmethod
    def from_dict(cls, d: dict) -> "Version":
        return cls(id=d["id"], label=d["label"],
                   spec=VisSpec.from_dict(d["spec"], path="version.spec"),
                   suggested=bool(d["suggested"]), tick=int(d["tick"]))


@dataclass
class Artboard:
    """One device-targeted design.

    ``spec`` always equals the non-undone ``editHistory`` replayed over
    ``baseSpec``.  ``baseVersionId`` names the version whose snapshot the
    base came from, when there is one; applying a suggestion rebases the
    history onto the recommendation source spec, which is not a saved
    version, so the pointer goes empty until the next checkout.
    """

    id: str
    device: DeviceProfile
    baseSpec: VisSpec
    spec: VisSpec
    baseVersionId: Optional[str] = None
    editHistory: list = field(default_factory=list)
    versions: list = field(default_factory=list)
    currentVersionId: Optional[str] = None
    locked: bool = False
    editCounter: int = 0

    def active_rules(self):
        return [rec.rule for rec in self.editHistory if not rec.undone]

    def recompile(self) -> VisSpec:
        return apply_rules(self.baseSpec, self.active_rules())

    def next_edit_id(self) -> str:
        self.editCounter += 1
        return f"e{self.editCounter}"

    def version(self, version_id: str) -> Optional[Version]:
        for v in self.versions:
            if v.id == version_id:
                return v
        return None

    def edit(self, edit_id: str) -> Optional[EditRecord]:
        for rec in self.editHistory:
            if rec.id == edit_id:
                return rec
        return None

    def to_dict(self):
        return {
            "id": self.id,
            "device": self.device.to_dict(),
            "baseSpec": self.baseSpec.to_dict(),
            "baseVersionId": self.baseVersionId,
            "spec": self.spec.to_dict(),
            "editHistory": [r.to_dict() for r in self.editHistory],
            "versions": [v.to_dict() for v in self.versions],
            "currentVersionId": self.currentVersionId,
            "locked": self.locked,
            "editCounter": self.editCounter,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Artboard":
        return cls(
            id=d["id"],
            device=DeviceProfile.from_dict(d["device"], path="artboard.device"),
            baseSpec=VisSpec.from_dict(d["baseSpec"], path="artboard.baseSpec"),
            spec=VisSpec.from_dict(d["spec"], path="artboard.spec"),
            baseVersionId=d.get("baseVersionId"),
            editHistory=[EditRecord.from_dict(r) for r in d.get("editHistory", [])],
            versions=[Version.from_dict(v) for v in d.get("versions", [])],
            currentVersionId=d.get("currentVersionId"),
            locked=bool(d.get("locked", False)),
            editCounter=int(d.get("editCounter", len(d.get("editHistory", [])))),
        )


@dataclass
class Batch:
    sourceArtboardId: str
    targetArtboardId: str
    sourceSpec: VisSpec
    sourceSignature: str
    suggestions: list = field(default_factory=list)

    def suggestion(self, sug_id: str) -> Optional[Suggestion]:
        for s in self.suggestions:
            if s.id == sug_id:
                return s
        return None

    def to_dict(self):
        return {
            "sourceArtboardId": self.sourceArtboardId,
            "targetArtboardId": self.targetArtboardId,
            "sourceSpec": self.sourceSpec.to_dict(),
            "sourceSignature": self.sourceSignature,
            "suggestions": [s.to_dict() for s in self.suggestions],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Batch":
        return cls(
            sourceArtboardId=d["sourceArtboardId"],
            targetArtboardId=d["targetArtboardId"],
            sourceSpec=VisSpec.from_dict(d["sourceSpec"], path="batch.sourceSpec"),
            sourceSignature=d["sourceSignature"],
            suggestions=[Suggestion.from_dict(s) for s in d.get("suggestions", [])],
        )


def default_preferences() -> dict:
    return {
        "verbosity": "withRationales",
        "sortCriterion": "combined",
        "maxSuggestions": 6,
        "drasticRatio": 0.5,
        "weights": {},
    }


@dataclass
class Session:
    id: str
    artboards: dict
    sourceArtboardId: str
    activeArtboardId: Optional[str]
    direction: str
    tick: int = 0
    preferences: dict = field(default_factory=default_preferences)
    batch: Optional[Batch] = None
    pendingQuickEdits: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    constraints: ConstraintStore = field(default_factory=ConstraintStore)
    explorationHistory: list = field(default_factory=list)

    def artboard(self, artboard_id: str) -> Artboard:
        ab = self.artboards.get(artboard_id)
        if ab is None:
            raise UnknownEntryError(f"unknown artboard '{artboard_id}'")
        return ab

    @property
    def active(self) -> Artboard:
        if self.activeArtboardId is None:
            raise NoActiveArtboardError("no artboard is active")
        return self.artboards[self.activeArtboardId]

    @property
    def source(self) -> Artboard:
        return self.artboards[self.sourceArtboardId]

    def next_tick(self) -> int:
        self.tick += 1
        return self.tick

    def warn(self, message: str) -> None:
        self.warnings.append({"tick": self.tick, "message": message})
        del self.warnings[:-WARNING_CAP]

    def log_exploration(self, action: str, suggestion: Optional[Suggestion],
                        artboard_id: Optional[str], **extra) -> dict:
        entry = {
            "id": f"x{len(self.explorationHistory) + 1}",
            "action": action,
            "suggestion": suggestion.to_dict() if suggestion else None,
            "artboardId": artboard_id,
            "tick": self.tick,
        }
        entry.update(extra)
        self.explorationHistory.append(entry)
        return entry

    def to_dict(self):
        return {
            "id": self.id,
            "sourceArtboardId": self.sourceArtboardId,
            "activeArtboardId": self.activeArtboardId,
            "direction": self.direction,
            "tick": self.tick,
            "preferences": dict(self.preferences),
            "artboards": [ab.to_dict() for ab in self.artboards.values()],
            "batch": self.batch.to_dict() if self.batch else None,
            "pendingQuickEdits": [q.to_dict() for q in self.pendingQuickEdits],
            "warnings": list(self.warnings),
            "constraints": self.constraints.to_dict(),
            "explorationHistory": list(self.explorationHistory),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Session":
        artboards = {}
        for abd in d["artboards"]:
            ab = Artboard.from_dict(abd)
            artboards[ab.id] = ab
        prefs = default_preferences()
        prefs.update(d.get("preferences", {}))
        return cls(
            id=d["id"],
            artboards=artboards,
            sourceArtboardId=d["sourceArtboardId"],
            activeArtboardId=d.get("activeArtboardId"),
            direction=d["direction"],
            tick=int(d.get("tick", 0)),
            preferences=prefs,
            batch=Batch.from_dict(d["batch"]) if d.get("batch") else None,
            pendingQuickEdits=[QuickEditOffer.from_dict(q)
                               for q in d.get("pendingQuickEdits", [])],
            warnings=list(d.get("warnings", [])),
            constraints=ConstraintStore.from_dict(d.get("constraints", {})),
            explorationHistory=list(d.get("explorationHistory", [])),
        )


# ---------------------------------------------------------------------------
# persistence


class SessionStore:
    """Disk-backed registry: command log first, then the state snapshot."""

    def __init__(self, data_dir: Optional[str] = None):
        self.data_dir = Path(data_dir) if data_dir else None
        self.sessions = {}
        self._locks = {}
        self._registry_lock = threading.Lock()
        if self.data_dir is not None:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            for p in sorted(self.data_dir.glob("*.dupo-session.json")):
                try:
                    session = Session.from_dict(json.loads(p.read_text(encoding="utf-8")))
                except (OSError, json.JSONDecodeError, KeyError, SchemaError):
                    continue
                self.sessions[session.id] = session

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def get(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownEntryError(f"unknown session '{session_id}'")
        return session

    def add(self, session: Session) -> None:
        self.sessions[session.id] = session

    def persist(self, session: Session, op: str, args: dict) -> None:
        if self.data_dir is None:
            return
        record = {"tick": session.tick, "op": op, "args": args}
        log_path = self.data_dir / f"{session.id}.commands.jsonl"
        with open(log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
        state_path = self.data_dir / f"{session.id}.dupo-session.json"
        tmp = state_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(session.to_dict(), sort_keys=True, indent=2),
                       encoding="utf-8")
        os.replace(tmp, state_path)


# ---------------------------------------------------------------------------
# the studio


class Studio:
    def __init__(self, data_dir: Optional[str] = None,
                 catalog: Optional[Catalog] = None):
        self.catalog = catalog or load_catalog()
        self.store = SessionStore(data_dir)

    # -- sessions

    def _resolve_device(self, entry, path: str) -> DeviceProfile:
        if isinstance(entry, DeviceProfile):
            return entry
        if isinstance(entry, str):
            p = preset(entry)
            if p is None:
                raise SchemaError(f"unknown device preset '{entry}'", path=path)
            return p
        return DeviceProfile.from_dict(entry, path=path)

    def create_session(self, payload: dict) -> Session:
        if not isinstance(payload, dict):
            raise SchemaError("session payload must be an object")
        if "spec" not in payload:
            raise SchemaError("session payload needs 'spec'", path="spec")
        spec = VisSpec.from_dict(payload["spec"], path="spec")
        report = validate_spec(spec)
        if not report.ok:
            issue = report.errors()[0]
            raise SchemaError(issue.message, path=issue.path.key())

        if "devices" in payload:
            devices_in = payload["devices"]
            if not isinstance(devices_in, list) or not devices_in:
                raise SchemaError("'devices' must be a non-empty array",
                                  path="devices")
        elif "device" in payload:
            devices_in = [payload["device"]]
        else:
            raise SchemaError("session payload needs 'device' or 'devices'",
                              path="device")
        profiles = [self._resolve_device(e, f"devices[{i}]")
                    for i, e in enumerate(devices_in)]
        names = [p.name for p in profiles]
        if len(set(names)) != len(names):
            raise SchemaError("device names must be unique", path="devices")

        session_id = payload.get("id") or "s-" + uuid.uuid4().hex[:8]
        if session_id in self.store.sessions:
            raise SchemaError(f"session '{session_id}' already exists", path="id")

        first = Artboard(id="ab-" + uuid.uuid4().hex[:8], device=profiles[0],
                         baseSpec=copy_spec(spec), spec=copy_spec(spec))
        session = Session(id=session_id,
                          artboards={first.id: first},
                          sourceArtboardId=first.id,
                          activeArtboardId=first.id,
                          direction=edit_direction(profiles[0].cls))
        self._save_version(session, first, label="initial", suggested=False)
        first.baseVersionId = first.currentVersionId
        self.store.add(session)
        for p in profiles[1:]:
            self.add_artboard(session, p, eager=False, persist=False)
        session.activeArtboardId = first.id
        self.store.persist(session, "createSession", {"id": session_id})
        return session

    def get_session(self, session_id: str) -> Session:
        return self.store.get(session_id)

    def add_artboard(self, session: Session, device, eager: bool = True,
                     persist: bool = True) -> Artboard:
        """Duplicate the source design onto a new device.

        The duplicate starts from the source artboard's current spec with
        one system resize record fitting it to the new display width, and
        becomes active.  When ``eager`` is set an exploration batch for it
        is generated right away (the recommender window opens populated).
        """
        profile = self._resolve_device(device, "device")
        if any(ab.device.name == profile.name for ab in session.artboards.values()):
            raise SchemaError(f"device '{profile.name}' already has an artboard",
                              path="device")
        source = session.source
        base = copy_spec(source.spec)
        ab = Artboard(id="ab-" + uuid.uuid4().hex[:8], device=profile,
                      baseSpec=base, spec=copy_spec(base))
        session.artboards[ab.id] = ab
        self._save_version(session, ab, label="initial", suggested=False)
        ab.baseVersionId = ab.currentVersionId

        scale = display_width(profile) / display_width(source.device)
        resize = TransformRule.from_dict({
            "specifier": {"role": "size"},
            "action": "resize",
            "option": {
                "width": max(MIN_ARTBOARD_SIDE, round(base.width * scale)),
                "height": max(MIN_ARTBOARD_SIDE, round(base.height * scale)),
                "fontScale": round(min(1.25, max(0.8, scale)), 2),
            },
        }, path="resize")
        tick = session.next_tick()
        ab.editHistory.append(EditRecord(
            id=ab.next_edit_id(), rule=resize,
            provenance=Provenance(kind="suggestion", timestamp=tick)))
        ab.spec = ab.recompile()
        session.activeArtboardId = ab.id

        if eager:
            try:
                self.request_suggestions(session, ab.id, persist=False)
            except NoCandidatesError as exc:
                session.warn(f"{ab.id}: no suggestions for the new artboard ({exc})")
        if persist:
            self.store.persist(session, "addArtboard",
                               {"artboardId": ab.id, "device": profile.to_dict()})
        return ab

    def set_source(self, session: Session, artboard_id: str) -> None:
        session.artboard(artboard_id)
        session.sourceArtboardId = artboard_id
        session.next_tick()
        self.store.persist(session, "setSource", {"artboardId": artboard_id})

    # -- artboard state

    def set_active(self, session: Session, artboard_id: str) -> None:
        ab = session.artboard(artboard_id)
        if ab.locked:
            raise ActivateLockedError(f"artboard '{artboard_id}' is locked")
        session.activeArtboardId = artboard_id
        session.next_tick()
        self.store.persist(session, "setActive", {"artboardId": artboard_id})

    def toggle_lock(self, session: Session, artboard_id: str) -> bool:
        ab = session.artboard(artboard_id)
        ab.locked = not ab.locked
        if ab.locked and session.activeArtboardId == artboard_id:
            session.activeArtboardId = None
        session.next_tick()
        self.store.persist(session, "toggleLock",
                           {"artboardId": artboard_id, "locked": ab.locked})
        return ab.locked

    def solo_lock(self, session: Session, artboard_id: str) -> None:
        """Lock every other artboard and activate this one."""
        target = session.artboard(artboard_id)
        for ab in session.artboards.values():
            ab.locked = ab.id != artboard_id
        target.locked = False
        session.activeArtboardId = artboard_id
        session.next_tick()
        self.store.persist(session, "soloLock", {"artboardId": artboard_id})

    def set_lock(self, session: Session, key: str, kind: str, on: bool) -> None:
        """Session-wide element or position lock on a spec element."""
        role = key.partition("|")[0]
        if role not in SPECIFIER_ROLES:
            raise SchemaError(f"unknown lock role '{role}'", path="key")
        if kind not in ("element", "position"):
            raise SchemaError(f"unknown lock kind '{kind}'", path="kind")
        session.constraints.set_lock(key, kind, on)
        session.next_tick()
        self.store.persist(session, "setLock",
                           {"key": key, "kind": kind, "on": bool(on)})

    # -- editing

    def _propagation_targets(self, session: Session) -> list:
        active_id = session.activeArtboardId
        return [ab for ab in session.artboards.values()
                if ab.id != active_id and not ab.locked]

    def _apply_to_artboard(self, session: Session, ab: Artboard,
                           rule: TransformRule, kind: str,
                           propagated_from: str) -> bool:
        """Propagation-side application: skips report a warning, never raise."""
        reason = skip_reason(ab.spec, rule)
        if reason is not None:
            session.warn(f"{ab.id}: skipped propagated edit, {reason}")
            return False
        try:
            new_spec = apply_rules(ab.spec, [rule])
        except CompileError as exc:
            session.warn(f"{ab.id}: skipped propagated edit, {exc}")
            return False
        ab.editHistory.append(EditRecord(
            id=ab.next_edit_id(), rule=rule,
            provenance=Provenance(kind=kind, timestamp=session.tick),
            propagatedFrom=propagated_from))
        ab.spec = new_spec
        return True

    def apply_edit(self, session: Session, rule_dict: dict, kind: str,
                   propagate: bool = True,
                   regenerate_quick_edits: bool = True) -> dict:
        if kind not in EDIT_PROVENANCE:
            raise SchemaError(
                f"edit provenance must be one of {EDIT_PROVENANCE}", path="provenance")
        rule = TransformRule.from_dict(rule_dict, path="rule")
        validate_rule(rule)
        active = session.active
        reason = skip_reason(active.spec, rule)
        if reason is not None:
            raise CompileError(f"edit does not apply: {reason}", 0)
        spec_before = active.spec
        new_spec = apply_rules(active.spec, [rule])

        tick = session.next_tick()
        active.editHistory.append(EditRecord(
            id=active.next_edit_id(), rule=rule,
            provenance=Provenance(kind=kind, timestamp=tick)))
        active.spec = new_spec

        updated = [active.id]
        if propagate:
            for ab in self._propagation_targets(session):
                if self._apply_to_artboard(session, ab, rule, kind, active.id):
                    updated.append(ab.id)

        if regenerate_quick_edits:
            session.pendingQuickEdits = quick_edits_for(
                rule, spec_before, active.spec, active.device,
                self.catalog, session.constraints)

        self.store.persist(session, "applyEdit",
                           {"rule": rule.to_dict(), "provenance": kind})
        return {
            "updatedArtboards": updated,
            "quickEdits": [q.to_dict() for q in session.pendingQuickEdits],
            "warnings": session.warnings[-8:],
        }

    def set_edit_undone(self, session: Session, artboard_id: str,
                        edit_id: str, undone: bool) -> None:
        ab = session.artboard(artboard_id)
        if ab.locked:
            raise LockedArtboardError(f"artboard '{artboard_id}' is locked")
        record = ab.edit(edit_id)
        if record is None:
            raise UnknownEditError(f"no edit '{edit_id}'")
        previous = record.undone
        record.undone = bool(undone)
        try:
            ab.spec = ab.recompile()
        except CompileError:
            record.undone = previous
            raise
        session.next_tick()
        self.store.persist(session, "setEditUndone",
                           {"artboardId": artboard_id, "editId": edit_id,
                            "undone": bool(undone)})

    # -- versions

    def _save_version(self, session: Session, ab: Artboard, label: str,
                      suggested: bool) -> Version:
        version = Version(
            id=f"v{len(ab.versions) + 1}",
            label=label,
            spec=copy_spec(ab.spec),
            suggested=suggested,
            tick=session.tick,
        )
        ab.versions.append(version)
        ab.currentVersionId = version.id
        return version

    def save_version(self, session: Session, artboard_id: str,
                     label: str = "") -> Version:
        ab = session.artboard(artboard_id)
        version = self._save_version(session, ab, label=label or "saved",
                                     suggested=False)
        session.next_tick()
        self.store.persist(session, "saveVersion",
                           {"artboardId": artboard_id, "versionId": version.id})
        return version

    def preview_version(self, session: Session, artboard_id: str,
                        version_id: str) -> VisSpec:
        ab = session.artboard(artboard_id)
        version = ab.version(version_id)
        if version is None:
            raise UnknownVersionError(f"unknown version '{version_id}'")
        return version.spec

    def _current_version_matches(self, ab: Artboard) -> bool:
        if ab.currentVersionId is None:
            return False
        current = ab.version(ab.currentVersionId)
        return (current is not None
                and serialize_spec(current.spec) == serialize_spec(ab.spec))

    def checkout_version(self, session: Session, artboard_id: str,
                         version_id: str) -> None:
        """Restore a snapshot; the pre-checkout state is auto-saved first."""
        ab = session.artboard(artboard_id)
        if ab.locked:
            raise LockedArtboardError(f"artboard '{artboard_id}' is locked")
        version = ab.version(version_id)
        if version is None:
            raise UnknownVersionError(f"unknown version '{version_id}'")
        if not self._current_version_matches(ab):
            self._save_version(session, ab, label="before checkout",
                               suggested=False)
        ab.baseSpec = copy_spec(version.spec)
        ab.baseVersionId = version.id
        ab.spec = copy_spec(version.spec)
        ab.editHistory = []
        ab.currentVersionId = version.id
        session.next_tick()
        self.store.persist(session, "checkoutVersion",
                           {"artboardId": artboard_id, "versionId": version_id})

    # -- suggestions

    def request_suggestions(self, session: Session, artboard_id: str,
                            max_n: Optional[int] = None,
                            drastic_ratio: Optional[float] = None,
                            persist: bool = True) -> Batch:
        """Exploration batch for one artboard, seeded by the source design."""
        target = session.artboard(artboard_id)
        source = session.source
        prefs = session.preferences
        suggestions = generate_suggestions(
            source.spec, source.device, target.device,
            self.catalog, session.constraints,
            scope="exploration",
            weights=prefs.get("weights") or None,
            max_n=max_n if max_n is not None else prefs["maxSuggestions"],
            drastic_ratio=(drastic_ratio if drastic_ratio is not None
                           else prefs["drasticRatio"]),
        )
        session.batch = Batch(
            sourceArtboardId=source.id,
            targetArtboardId=artboard_id,
            sourceSpec=copy_spec(source.spec),
            sourceSignature=serialize_spec(source.spec),
            suggestions=suggestions,
        )
        session.next_tick()
        if persist:
            self.store.persist(session, "requestSuggestions",
                               {"artboardId": artboard_id})
        return session.batch

    def _find_suggestion(self, session: Session, sug_id: str) -> Suggestion:
        if session.batch is None:
            raise UnknownEntryError(f"unknown suggestion '{sug_id}'")
        sug = session.batch.suggestion(sug_id)
        if sug is None:
            raise UnknownEntryError(f"unknown suggestion '{sug_id}'")
        return sug

    def _check_fresh(self, session: Session) -> None:
        batch = session.batch
        if session.activeArtboardId != batch.targetArtboardId:
            raise StaleSuggestionError(
                "the active artboard changed after these suggestions were made")
        source = session.artboards.get(batch.sourceArtboardId)
        if source is None or serialize_spec(source.spec) != batch.sourceSignature:
            raise StaleSuggestionError(
                "the source design changed after these suggestions were made")

    def see_similar(self, session: Session, sug_id: str,
                    max_n: Optional[int] = None) -> list:
        parent = self._find_suggestion(session, sug_id)
        self._check_fresh(session)
        batch = session.batch
        source = session.artboard(batch.sourceArtboardId)
        target = session.artboard(batch.targetArtboardId)
        prefs = session.preferences
        children = generate_suggestions(
            batch.sourceSpec, source.device, target.device,
            self.catalog, session.constraints,
            scope=f"alteration:{parent.id}",
            weights=prefs.get("weights") or None,
            max_n=max_n if max_n is not None else prefs["maxSuggestions"],
            drastic_ratio=prefs["drasticRatio"],
            parent=parent,
        )
        batch.suggestions.extend(children)
        session.next_tick()
        self.store.persist(session, "seeSimilar", {"suggestionId": sug_id})
        return children

    def apply_suggestion(self, session: Session, sug_id: str,
                         bring_edits: bool = False) -> Artboard:
        sug = self._find_suggestion(session, sug_id)
        self._check_fresh(session)
        batch = session.batch
        target = session.artboard(batch.targetArtboardId)

        if not self._current_version_matches(target):
            self._save_version(session, target, label="before suggestion",
                               suggested=False)

        tick = session.next_tick()
        user_records = [rec for rec in target.editHistory
                        if not rec.undone
                        and rec.provenance.kind in EDIT_PROVENANCE]
        target.baseSpec = copy_spec(batch.sourceSpec)
        target.baseVersionId = None
        target.editHistory = []
        target.editCounter = 0
        for r in sug.rules:
            target.editHistory.append(EditRecord(
                id=target.next_edit_id(), rule=r,
                provenance=Provenance("suggestion", tick)))
        if bring_edits:
            _, dropped = merge_user_edits(
                batch.sourceSpec, sug.rules, [rec.rule for rec in user_records])
            dropped_ids = {id(r) for r, _ in dropped}
            for rec in user_records:
                if id(rec.rule) in dropped_ids:
                    continue
                target.editHistory.append(EditRecord(
                    id=target.next_edit_id(), rule=rec.rule,
                    provenance=rec.provenance))
            for r, reason in dropped:
                session.warn(f"{target.id}: dropped user edit "
                             f"({r.specifier.key()} {r.action}): {reason}")
        target.spec = target.recompile()
        self._save_version(session, target, label=sug.description, suggested=True)
        session.log_exploration("applied", sug, target.id)
        self.store.persist(session, "applySuggestion",
                           {"suggestionId": sug_id, "bringEdits": bool(bring_edits)})
        return target

    def branch_suggestion(self, session: Session, sug_id: str) -> Artboard:
        """Open the suggestion as a new artboard, leaving the target alone."""
        sug = self._find_suggestion(session, sug_id)
        self._check_fresh(session)
        batch = session.batch
        target = session.artboard(batch.targetArtboardId)

        ab = Artboard(id="ab-" + uuid.uuid4().hex[:8],
                      device=DeviceProfile.from_dict(target.device.to_dict(),
                                                     path="device"),
                      baseSpec=copy_spec(batch.sourceSpec),
                      spec=copy_spec(sug.resultSpec))
        tick = session.next_tick()
        for r in sug.rules:
            ab.editHistory.append(EditRecord(
                id=ab.next_edit_id(), rule=r,
                provenance=Provenance("suggestion", tick)))
        session.artboards[ab.id] = ab
        self._save_version(session, ab, label=sug.description, suggested=True)
        session.activeArtboardId = ab.id
        session.log_exploration("branched", sug, ab.id)
        self.store.persist(session, "branchSuggestion",
                           {"suggestionId": sug_id, "artboardId": ab.id})
        return ab

    def hide_suggestion(self, session: Session, sug_id: str) -> dict:
        """Ban the suggestion's batch-unique transformations from search."""
        sug = self._find_suggestion(session, sug_id)
        added = session.constraints.register_hidden(
            sug, session.batch.suggestions)
        # no longer shown: drop the served mark so a revert can resurface it
        scope = ("exploration" if sug.level == "exploration"
                 else f"alteration:{sug.parentSuggestionId}")
        session.constraints.unmark_served(scope, sug.signature)
        session.batch.suggestions = [s for s in session.batch.suggestions
                                     if s.id != sug_id]
        session.next_tick()
        entry = session.log_exploration("hidden", sug, session.batch.targetArtboardId,
                                        hiddenSignatures=added, reverted=False)
        self.store.persist(session, "hideSuggestion", {"suggestionId": sug_id})
        return entry

    def revert_hidden(self, session: Session, entry_id: str) -> None:
        for entry in session.explorationHistory:
            if entry["id"] != entry_id:
                continue
            if entry["action"] != "hidden" or entry.get("reverted"):
                raise UnknownEntryError(
                    f"entry '{entry_id}' is not a revertable hide")
            session.constraints.revert_hidden(entry.get("hiddenSignatures", []))
            entry["reverted"] = True
            session.next_tick()
            session.log_exploration("hiddenReverted", None, entry.get("artboardId"),
                                    revertedEntryId=entry_id)
            self.store.persist(session, "revertHidden", {"entryId": entry_id})
            return
        raise UnknownEntryError(f"unknown exploration-history entry '{entry_id}'")

    def sorted_suggestions(self, session: Session) -> list:
        if session.batch is None:
            return []
        criterion = session.preferences.get("sortCriterion", "combined")
        return sorted(session.batch.suggestions,
                      key=lambda s: s.scores.get(criterion, 0.0))

    # -- quick edits

    def _find_quick_edit(self, session: Session, qe_id: str) -> QuickEditOffer:
        for q in session.pendingQuickEdits:
            if q.id == qe_id:
                return q
        raise UnknownEntryError(f"unknown quick edit '{qe_id}'")

    def apply_quick_edit(self, session: Session, qe_id: str,
                         scope: str = "here") -> dict:
        if scope not in ("here", "allUnlocked"):
            raise SchemaError("scope must be 'here' or 'allUnlocked'", path="scope")
        offer = self._find_quick_edit(session, qe_id)
        active = session.active
        propagate = scope == "allUnlocked"
        updated = {active.id}
        for rule in offer.rules:
            reason = skip_reason(active.spec, rule)
            if reason is not None:
                raise CompileError(f"quick edit does not apply: {reason}", 0)
            new_spec = apply_rules(active.spec, [rule])
            tick = session.next_tick()
            active.editHistory.append(EditRecord(
                id=active.next_edit_id(), rule=rule,
                provenance=Provenance("quickEdit", tick)))
            active.spec = new_spec
            if propagate:
                for ab in self._propagation_targets(session):
                    if self._apply_to_artboard(session, ab, rule, "quickEdit",
                                               active.id):
                        updated.add(ab.id)
        session.constraints.mark_served("quickEdit", [offer.signature])
        session.pendingQuickEdits = [q for q in session.pendingQuickEdits
                                     if q.id != qe_id]
        self.store.persist(session, "applyQuickEdit",
                           {"quickEditId": qe_id, "scope": scope})
        return {"updatedArtboards": sorted(updated)}

    def dismiss_quick_edit(self, session: Session, qe_id: str) -> None:
        offer = self._find_quick_edit(session, qe_id)
        session.constraints.mark_served("quickEdit", [offer.signature])
        session.pendingQuickEdits = [q for q in session.pendingQuickEdits
                                     if q.id != qe_id]
        session.next_tick()
        self.store.persist(session, "dismissQuickEdit", {"quickEditId": qe_id})

    # -- preferences

    def update_preferences(self, session: Session, updates: dict) -> dict:
        prefs = session.preferences
        for key, value in updates.items():
            if key == "verbosity":
                if value not in VERBOSITY_LEVELS:
                    raise SchemaError(f"unknown verbosity '{value}'", path="verbosity")
            elif key == "sortCriterion":
                if value not in SORT_CRITERIA:
                    raise SchemaError(f"unknown sort criterion '{value}'",
                                      path="sortCriterion")
            elif key == "maxSuggestions":
                if not isinstance(value, int) or value < 1:
                    raise SchemaError("maxSuggestions must be a positive integer",
                                      path="maxSuggestions")
            elif key == "drasticRatio":
                if not isinstance(value, (int, float)) or not 0 <= value <= 1:
                    raise SchemaError("drasticRatio must be between 0 and 1",
                                      path="drasticRatio")
            elif key == "weights":
                from .ranking import DEFAULT_WEIGHTS
                if not isinstance(value, dict):
                    raise SchemaError("weights must be an object", path="weights")
                for k, v in value.items():
                    if k not in DEFAULT_WEIGHTS:
                        raise SchemaError(f"unknown measure '{k}'", path="weights")
                    if not isinstance(v, (int, float)) or v < 0:
                        raise SchemaError("weights must be non-negative numbers",
                                          path="weights")
            else:
                raise SchemaError(f"unknown preference '{key}'", path=key)
            prefs[key] = value
        session.next_tick()
        self.store.persist(session, "updatePreferences", dict(updates))
        return prefs


__all__ = [
    "EDIT_PROVENANCE", "SORT_CRITERIA", "VERBOSITY_LEVELS", "HISTORY_ACTIONS",
    "EditRecord", "Version", "Artboard", "Batch", "Session", "SessionStore",
    "Studio", "default_preferences",
]
