"""HTTP facade over the studio.

Every response is an envelope: ``{"ok": true, "data": ...}`` on success,
``{"ok": false, "error": {"code", "message", "details"}}`` on failure.
Schema problems map to 400, unknown ids to 404, state conflicts to 409,
and rule or data failures to 422 with the failing rule index.

Artboard and suggestion ids are unique across sessions, so the routes
that address them directly (``/artboards/{id}/...``,
``/suggestions/{id}/...``) resolve their session by lookup.
"""

from __future__ import annotations

import functools
import json
import os
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import devices as devices_mod
from .catalog import load_catalog
from .errors import (
    CompileError, DupoError, EmptyDataError, ExportError,
    LockedArtboardError, NoActiveArtboardError, NoCandidatesError,
    SchemaError, SpecSyntaxError, StaleSuggestionError, UnknownEditError,
    UnknownEntryError, UnknownVersionError,
)
from .export import export_session, render_svg
from .rules import describe_rules
from .studio import Session, Studio

DEFAULT_PORT = 8787

_STATUS = (
    (404, (UnknownEntryError, UnknownVersionError, UnknownEditError)),
    (409, (StaleSuggestionError, LockedArtboardError, NoActiveArtboardError)),
    (422, (CompileError, NoCandidatesError, EmptyDataError, ExportError)),
    (400, (SchemaError, SpecSyntaxError)),
)


def _ok(data) -> JSONResponse:
    return JSONResponse({"ok": True, "data": data})


def _fail(status: int, code: str, message: str, details=None) -> JSONResponse:
    error = {"code": code, "message": message}
    if details is not None:
        error["details"] = details
    return JSONResponse({"ok": False, "error": error}, status_code=status)


def _fail_from(exc: DupoError) -> JSONResponse:
    details = None
    if isinstance(exc, CompileError):
        details = {"ruleIndex": exc.rule_index}
    elif isinstance(exc, NoCandidatesError):
        details = {"stats": exc.stats}
    elif isinstance(exc, SchemaError) and exc.path:
        details = {"path": exc.path}
    for status, types in _STATUS:
        if isinstance(exc, types):
            return _fail(status, type(exc).__name__, str(exc), details)
    return _fail(500, type(exc).__name__, str(exc), details)


async def _body(request: Request) -> dict:
    raw = await request.body()
    if not raw:
        return {}
    try:
        parsed = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"request body is not valid JSON: {exc}")
    if not isinstance(parsed, dict):
        raise SchemaError("request body must be a JSON object")
    return parsed


def create_app(data_dir: Optional[str] = None,
               catalog_path: Optional[str] = None) -> FastAPI:
    studio = Studio(
        data_dir=data_dir if data_dir is not None
        else os.environ.get("DUPO_DATA_DIR", ".dupo-data"),
        catalog=load_catalog(catalog_path),
    )
    app = FastAPI(title="dupo", docs_url=None, redoc_url=None)
    app.state.studio = studio

    def guarded(fn):
        @functools.wraps(fn)
        async def inner(*args, **kwargs):
            try:
                return await fn(*args, **kwargs)
            except DupoError as exc:
                return _fail_from(exc)
        return inner

    def locked_session(session: Session):
        return studio.store.lock(session.id)

    def session_for_artboard(aid: str) -> Session:
        for session in studio.store.sessions.values():
            if aid in session.artboards:
                return session
        raise UnknownEntryError(f"unknown artboard '{aid}'")

    def session_for_suggestion(sugid: str) -> Session:
        for session in studio.store.sessions.values():
            if session.batch is not None and session.batch.suggestion(sugid):
                return session
        raise UnknownEntryError(f"unknown suggestion '{sugid}'")

    def _suggestion_payload(session, suggestion) -> dict:
        d = suggestion.to_dict()
        verbosity = session.preferences.get("verbosity", "withRationales")
        described = describe_rules(suggestion.rules, verbosity)
        d["descriptions"] = [desc.to_dict() for desc in described]
        return d

    def _batch_payload(session) -> Optional[dict]:
        if session.batch is None:
            return None
        data = session.batch.to_dict()
        data["suggestions"] = [_suggestion_payload(session, s)
                               for s in session.batch.suggestions]
        return data

    @app.get("/health")
    async def health():
        return _ok({"status": "up"})

    # -- sessions

    @app.post("/sessions")
    @guarded
    async def create_session(request: Request):
        payload = await _body(request)
        session = studio.create_session(payload)
        return _ok(session.to_dict())

    @app.get("/sessions/{sid}")
    @guarded
    async def get_session(sid: str):
        return _ok(studio.get_session(sid).to_dict())

    @app.post("/sessions/{sid}/artboards")
    @guarded
    async def add_artboard(sid: str, request: Request):
        payload = await _body(request)
        if "device" not in payload:
            return _fail(400, "SchemaError", "missing 'device'")
        session = studio.get_session(sid)
        with locked_session(session):
            ab = studio.add_artboard(session, payload["device"])
            return _ok({"artboard": ab.to_dict(),
                        "batch": _batch_payload(session),
                        "warnings": session.warnings[-8:]})

    @app.post("/sessions/{sid}/active")
    @guarded
    async def set_active(sid: str, request: Request):
        payload = await _body(request)
        if "artboardId" not in payload:
            return _fail(400, "SchemaError", "missing 'artboardId'")
        session = studio.get_session(sid)
        with locked_session(session):
            studio.set_active(session, payload["artboardId"])
            return _ok({"activeArtboardId": session.activeArtboardId})

    @app.post("/sessions/{sid}/source")
    @guarded
    async def set_source(sid: str, request: Request):
        payload = await _body(request)
        if "artboardId" not in payload:
            return _fail(400, "SchemaError", "missing 'artboardId'")
        session = studio.get_session(sid)
        with locked_session(session):
            studio.set_source(session, payload["artboardId"])
            return _ok({"sourceArtboardId": session.sourceArtboardId})

    @app.post("/sessions/{sid}/locks")
    @guarded
    async def set_lock(sid: str, request: Request):
        payload = await _body(request)
        if "key" not in payload or "kind" not in payload:
            return _fail(400, "SchemaError", "missing 'key' or 'kind'")
        session = studio.get_session(sid)
        with locked_session(session):
            studio.set_lock(session, payload["key"], payload["kind"],
                            bool(payload.get("on", True)))
            return _ok({"elementLocks": sorted(session.constraints.elementLocks),
                        "positionLocks": sorted(session.constraints.positionLocks)})

    # -- artboards

    @app.post("/artboards/{aid}/lock")
    @guarded
    async def toggle_lock(aid: str):
        session = session_for_artboard(aid)
        with locked_session(session):
            locked = studio.toggle_lock(session, aid)
            return _ok({"artboardId": aid, "locked": locked,
                        "activeArtboardId": session.activeArtboardId})

    @app.post("/artboards/{aid}/solo-lock")
    @guarded
    async def solo_lock(aid: str):
        session = session_for_artboard(aid)
        with locked_session(session):
            studio.solo_lock(session, aid)
            return _ok({"activeArtboardId": session.activeArtboardId,
                        "locks": {ab.id: ab.locked
                                  for ab in session.artboards.values()}})

    @app.post("/artboards/{aid}/edits")
    @guarded
    async def apply_edit(aid: str, request: Request):
        payload = await _body(request)
        if "rule" not in payload:
            return _fail(400, "SchemaError", "missing 'rule'")
        session = session_for_artboard(aid)
        with locked_session(session):
            if session.activeArtboardId is None:
                return _fail(409, "NotActiveArtboard", "no artboard is active")
            if aid != session.activeArtboardId:
                return _fail(409, "NotActiveArtboard",
                             f"artboard '{aid}' is not active; activate it first")
            result = studio.apply_edit(
                session, payload["rule"], payload.get("provenance", "manual"))
            result["artboards"] = {
                ab_id: session.artboards[ab_id].to_dict()
                for ab_id in result["updatedArtboards"]
            }
            return _ok(result)

    @app.post("/artboards/{aid}/edits/{eid}/undo")
    @guarded
    async def undo_edit(aid: str, eid: str, request: Request):
        payload = await _body(request)
        session = session_for_artboard(aid)
        with locked_session(session):
            studio.set_edit_undone(session, aid, eid,
                                   bool(payload.get("undone", True)))
            return _ok(session.artboard(aid).to_dict())

    @app.post("/artboards/{aid}/versions")
    @guarded
    async def save_version(aid: str, request: Request):
        payload = await _body(request)
        session = session_for_artboard(aid)
        with locked_session(session):
            version = studio.save_version(session, aid, payload.get("label", ""))
            return _ok(version.to_dict())

    @app.get("/artboards/{aid}/versions/{vid}/preview")
    @guarded
    async def preview_version(aid: str, vid: str):
        session = session_for_artboard(aid)
        spec = studio.preview_version(session, aid, vid)
        return _ok({"spec": spec.to_dict(), "svg": render_svg(spec)})

    @app.post("/artboards/{aid}/versions/{vid}/checkout")
    @guarded
    async def checkout_version(aid: str, vid: str):
        session = session_for_artboard(aid)
        with locked_session(session):
            studio.checkout_version(session, aid, vid)
            return _ok(session.artboard(aid).to_dict())

    @app.get("/artboards/{aid}/preview")
    @guarded
    async def preview_artboard(aid: str):
        session = session_for_artboard(aid)
        ab = session.artboard(aid)
        return _ok({
            "artboardId": aid,
            "displayWidth": devices_mod.display_width(ab.device),
            "displayHeight": devices_mod.display_height(ab.device),
            "svg": render_svg(ab.spec),
        })

    @app.post("/artboards/{aid}/recommend")
    @guarded
    async def recommend(aid: str, request: Request, mode: str = "exploration"):
        if mode != "exploration":
            return _fail(400, "SchemaError", f"unknown recommend mode '{mode}'")
        payload = await _body(request)
        session = session_for_artboard(aid)
        with locked_session(session):
            batch = studio.request_suggestions(
                session, aid,
                max_n=payload.get("maxSuggestions"),
                drastic_ratio=payload.get("drasticRatio"))
            data = batch.to_dict()
            data["suggestions"] = [_suggestion_payload(session, s)
                                   for s in batch.suggestions]
            return _ok(data)

    # -- suggestions

    @app.get("/sessions/{sid}/suggestions")
    @guarded
    async def list_suggestions(sid: str):
        session = studio.get_session(sid)
        return _ok({"suggestions": [_suggestion_payload(session, s)
                                    for s in studio.sorted_suggestions(session)],
                    "targetArtboardId": (session.batch.targetArtboardId
                                         if session.batch else None)})

    @app.post("/suggestions/{sugid}/similar")
    @guarded
    async def see_similar(sugid: str, request: Request):
        payload = await _body(request)
        session = session_for_suggestion(sugid)
        with locked_session(session):
            children = studio.see_similar(session, sugid,
                                          max_n=payload.get("maxSuggestions"))
            return _ok({"suggestions": [_suggestion_payload(session, s)
                                        for s in children]})

    @app.post("/suggestions/{sugid}/apply")
    @guarded
    async def apply_suggestion(sugid: str, request: Request):
        payload = await _body(request)
        session = session_for_suggestion(sugid)
        with locked_session(session):
            artboard = studio.apply_suggestion(
                session, sugid, bring_edits=bool(payload.get("bringEdits", False)))
            return _ok({"artboard": artboard.to_dict(),
                        "warnings": session.warnings[-8:]})

    @app.post("/suggestions/{sugid}/branch")
    @guarded
    async def branch_suggestion(sugid: str):
        session = session_for_suggestion(sugid)
        with locked_session(session):
            artboard = studio.branch_suggestion(session, sugid)
            return _ok({"artboard": artboard.to_dict(),
                        "activeArtboardId": session.activeArtboardId})

    @app.post("/suggestions/{sugid}/hide")
    @guarded
    async def hide_suggestion(sugid: str):
        session = session_for_suggestion(sugid)
        with locked_session(session):
            entry = studio.hide_suggestion(session, sugid)
            return _ok({"hidden": sugid, "entryId": entry["id"],
                        "hiddenSignatures": entry["hiddenSignatures"]})

    @app.post("/sessions/{sid}/hidden/{entry}/revert")
    @guarded
    async def revert_hidden(sid: str, entry: str):
        session = studio.get_session(sid)
        with locked_session(session):
            studio.revert_hidden(session, entry)
            return _ok({"reverted": entry,
                        "hiddenSignatures":
                            sorted(session.constraints.hiddenSignatures)})

    # -- quick edits

    @app.post("/sessions/{sid}/quick-edits/{qid}/apply")
    @guarded
    async def apply_quick_edit(sid: str, qid: str, request: Request):
        payload = await _body(request)
        session = studio.get_session(sid)
        with locked_session(session):
            result = studio.apply_quick_edit(session, qid,
                                             scope=payload.get("scope", "here"))
            result["artboards"] = {
                ab_id: session.artboards[ab_id].to_dict()
                for ab_id in result["updatedArtboards"]
            }
            return _ok(result)

    @app.post("/sessions/{sid}/quick-edits/{qid}/dismiss")
    @guarded
    async def dismiss_quick_edit(sid: str, qid: str):
        session = studio.get_session(sid)
        with locked_session(session):
            studio.dismiss_quick_edit(session, qid)
            return _ok({"dismissed": qid})

    # -- preferences, preview, export

    @app.get("/sessions/{sid}/preferences")
    @guarded
    async def get_preferences(sid: str):
        return _ok(studio.get_session(sid).preferences)

    @app.put("/sessions/{sid}/preferences")
    @guarded
    async def put_preferences(sid: str, request: Request):
        payload = await _body(request)
        session = studio.get_session(sid)
        with locked_session(session):
            return _ok(studio.update_preferences(session, payload))

    @app.get("/sessions/{sid}/preview")
    @guarded
    async def preview_session(sid: str):
        session = studio.get_session(sid)
        rows = []
        for ab in session.artboards.values():
            rows.append({
                "artboardId": ab.id,
                "displayWidth": devices_mod.display_width(ab.device),
                "displayHeight": devices_mod.display_height(ab.device),
                "svg": render_svg(ab.spec),
            })
        return _ok({"artboards": rows})

    @app.get("/sessions/{sid}/export")
    @guarded
    async def export(sid: str):
        session = studio.get_session(sid)
        return _ok(export_session(session))

    return app


def run_server(port: Optional[int] = None, data_dir: Optional[str] = None,
               host: str = "127.0.0.1") -> None:
    import uvicorn
    app = create_app(data_dir=data_dir)
    resolved = port if port is not None else int(
        os.environ.get("DUPO_PORT", DEFAULT_PORT))
    uvicorn.run(app, host=host, port=resolved, log_level="warning")


__all__ = ["DEFAULT_PORT", "create_app", "run_server"]
