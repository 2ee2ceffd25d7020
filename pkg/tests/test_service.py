import pytest
from fastapi.testclient import TestClient

import fixtures as fx
from dupo.service import create_app


@pytest.fixture
def client(tmp_path):
    app = create_app(data_dir=str(tmp_path / "data"))
    with TestClient(app) as c:
        yield c


def ok(resp, status=200):
    assert resp.status_code == status, resp.text
    body = resp.json()
    assert body["ok"] is True
    return body["data"]


def fail(resp, status, code=None):
    assert resp.status_code == status, resp.text
    body = resp.json()
    assert body["ok"] is False
    assert {"code", "message"} <= set(body["error"])
    if code:
        assert body["error"]["code"] == code
    return body["error"]


def make_session(client, devices=("desktop",), spec=None):
    payload = {"spec": (spec or fx.line_chart()).to_dict(),
               "devices": list(devices)}
    return ok(client.post("/sessions", json=payload))


def test_health(client):
    assert ok(client.get("/health")) == {"status": "up"}


def test_create_and_fetch_session(client):
    data = make_session(client)
    assert set(data) >= {"id", "sourceArtboardId", "activeArtboardId",
                         "direction", "tick", "preferences", "artboards"}
    assert data["direction"] == "desktopFirst"
    fetched = ok(client.get(f"/sessions/{data['id']}"))
    assert fetched == data


def test_create_session_validation_errors(client):
    fail(client.post("/sessions", json={"device": "desktop"}),
         400, "SchemaError")
    err = fail(client.post("/sessions",
                           content=b"{not json",
                           headers={"content-type": "application/json"}),
               400, "SchemaError")
    assert "JSON" in err["message"]
    bad = fx.line_chart().to_dict()
    del bad["dataset"]["rows"]
    fail(client.post("/sessions", json={"spec": bad, "device": "desktop"}),
         400, "SchemaError")


def test_unknown_ids_map_to_404(client):
    fail(client.get("/sessions/s-ghost"), 404, "UnknownEntryError")
    fail(client.post("/artboards/ab-ghost/lock"), 404, "UnknownEntryError")
    fail(client.post("/suggestions/sug-ghost/apply", json={}), 404)


def test_add_artboard_returns_batch(client):
    data = make_session(client)
    out = ok(client.post(f"/sessions/{data['id']}/artboards",
                         json={"device": "phone"}))
    assert out["artboard"]["device"]["name"] == "phone"
    batch = out["batch"]
    assert batch["targetArtboardId"] == out["artboard"]["id"]
    assert len(batch["suggestions"]) == 6
    sug = batch["suggestions"][0]
    assert {"id", "entryId", "rules", "scores", "resultSpec",
            "descriptions"} <= set(sug)
    assert sug["descriptions"][0]["rationale"]
    fail(client.post(f"/sessions/{data['id']}/artboards", json={}),
         400, "SchemaError")


def test_edit_gated_on_active_artboard(client):
    data = make_session(client, devices=("desktop", "phone"))
    abs_ = {ab["device"]["name"]: ab["id"] for ab in data["artboards"]}
    rule = {"specifier": {"role": "legend", "selector": "color"},
            "action": "reposition", "option": {"position": "bottom"}}

    fail(client.post(f"/artboards/{abs_['phone']}/edits",
                     json={"rule": rule}), 409, "NotActiveArtboard")
    out = ok(client.post(f"/artboards/{abs_['desktop']}/edits",
                         json={"rule": rule}))
    assert set(out["updatedArtboards"]) == set(abs_.values())
    for ab in out["artboards"].values():
        assert ab["spec"]["legends"]["color"]["position"] == "bottom"

    ok(client.post(f"/artboards/{abs_['desktop']}/lock"))
    fail(client.post(f"/artboards/{abs_['desktop']}/edits",
                     json={"rule": rule}), 409, "NotActiveArtboard")


def test_edit_error_codes(client):
    data = make_session(client)
    aid = data["sourceArtboardId"]
    fail(client.post(f"/artboards/{aid}/edits", json={}), 400)
    fail(client.post(f"/artboards/{aid}/edits",
                     json={"rule": {"specifier": {"role": "sprocket"},
                                    "action": "remove"}}), 400, "SchemaError")
    err = fail(client.post(f"/artboards/{aid}/edits",
                           json={"rule": {"specifier": {"role": "annotation",
                                                        "selector": "ghost"},
                                          "action": "remove"}}),
               422, "CompileError")
    assert err["details"]["ruleIndex"] == 0


def test_undo_and_versions_roundtrip(client):
    data = make_session(client)
    aid = data["sourceArtboardId"]
    rule = {"specifier": {"role": "title"}, "action": "modify",
            "option": {"text": "Retitled"}}
    ok(client.post(f"/artboards/{aid}/edits", json={"rule": rule}))
    saved = ok(client.post(f"/artboards/{aid}/versions",
                           json={"label": "retitled"}))
    assert saved["label"] == "retitled"

    board = ok(client.post(
        f"/artboards/{aid}/edits/e1/undo", json={"undone": True}))
    assert board["spec"]["title"]["text"] != "Retitled"

    preview = ok(client.get(f"/artboards/{aid}/versions/{saved['id']}/preview"))
    assert preview["spec"]["title"]["text"] == "Retitled"
    assert preview["svg"].startswith("<svg")

    board = ok(client.post(
        f"/artboards/{aid}/versions/{saved['id']}/checkout"))
    assert board["spec"]["title"]["text"] == "Retitled"
    assert board["editHistory"] == []
    fail(client.get(f"/artboards/{aid}/versions/v99/preview"),
         404, "UnknownVersionError")


def test_locks_route(client):
    data = make_session(client)
    sid = data["id"]
    out = ok(client.post(f"/sessions/{sid}/locks",
                         json={"key": "legend|color", "kind": "element"}))
    assert out["elementLocks"] == ["legend|color"]
    out = ok(client.post(f"/sessions/{sid}/locks",
                         json={"key": "legend|color", "kind": "element",
                               "on": False}))
    assert out["elementLocks"] == []
    fail(client.post(f"/sessions/{sid}/locks",
                     json={"key": "legend|color", "kind": "padlock"}),
         400, "SchemaError")


def test_recommend_matches_module_results(client):
    data = make_session(client, devices=("desktop", "phone"))
    phone = next(ab["id"] for ab in data["artboards"]
                 if ab["device"]["name"] == "phone")
    ok(client.post(f"/sessions/{data['id']}/active",
                   json={"artboardId": phone}))
    out = ok(client.post(f"/artboards/{phone}/recommend",
                         json={"maxSuggestions": 5, "drasticRatio": 0.6}))
    sugs = out["suggestions"]
    assert len(sugs) == 5
    assert sum(s["drastic"] for s in sugs) == 3
    combined = [s["scores"]["combined"] for s in sugs]
    assert combined == sorted(combined)
    listed = ok(client.get(f"/sessions/{data['id']}/suggestions"))
    assert [s["id"] for s in listed["suggestions"]] == [s["id"] for s in sugs]
    fail(client.post(f"/artboards/{phone}/recommend?mode=quickEdit", json={}),
         400)


def test_suggestion_apply_branch_hide_revert(client):
    data = make_session(client, devices=("desktop", "phone"))
    sid = data["id"]
    phone = next(ab["id"] for ab in data["artboards"]
                 if ab["device"]["name"] == "phone")
    ok(client.post(f"/sessions/{sid}/active", json={"artboardId": phone}))
    sugs = ok(client.post(f"/artboards/{phone}/recommend", json={}))["suggestions"]

    kids = ok(client.post(f"/suggestions/{sugs[0]['id']}/similar",
                          json={"maxSuggestions": 3}))["suggestions"]
    assert kids and all(k["level"] == "alteration" for k in kids)

    heat = next(s for s in sugs if s["entryId"] == "lines-to-heatmap")
    hidden = ok(client.post(f"/suggestions/{heat['id']}/hide"))
    assert hidden["hiddenSignatures"]
    reverted = ok(client.post(f"/sessions/{sid}/hidden/{hidden['entryId']}/revert"))
    assert reverted["hiddenSignatures"] == []

    branched = ok(client.post(f"/suggestions/{sugs[0]['id']}/branch"))
    assert branched["activeArtboardId"] == branched["artboard"]["id"]

    ok(client.post(f"/sessions/{sid}/active", json={"artboardId": phone}))
    sugs = ok(client.post(f"/artboards/{phone}/recommend", json={}))["suggestions"]
    applied = ok(client.post(f"/suggestions/{sugs[0]['id']}/apply", json={}))
    assert applied["artboard"]["id"] == phone
    assert applied["artboard"]["spec"] == sugs[0]["resultSpec"]


def test_stale_suggestion_conflict(client):
    data = make_session(client, devices=("desktop", "phone"))
    sid = data["id"]
    phone = next(ab["id"] for ab in data["artboards"]
                 if ab["device"]["name"] == "phone")
    desktop = data["sourceArtboardId"]
    ok(client.post(f"/sessions/{sid}/active", json={"artboardId": phone}))
    sugs = ok(client.post(f"/artboards/{phone}/recommend", json={}))["suggestions"]
    ok(client.post(f"/sessions/{sid}/active", json={"artboardId": desktop}))
    fail(client.post(f"/suggestions/{sugs[0]['id']}/apply", json={}),
         409, "StaleSuggestionError")


def test_quick_edit_routes(client):
    data = make_session(client, devices=("desktop", "phone"))
    sid = data["id"]
    phone = next(ab["id"] for ab in data["artboards"]
                 if ab["device"]["name"] == "phone")
    ok(client.post(f"/sessions/{sid}/active", json={"artboardId": phone}))
    out = ok(client.post(f"/artboards/{phone}/edits",
                         json={"rule": {"specifier": {"role": "tooltip"},
                                        "action": "add",
                                        "option": {"enabled": True}}}))
    offers = {q["entryId"]: q["id"] for q in out["quickEdits"]}
    assert "quick-pin-tooltip" in offers

    applied = ok(client.post(
        f"/sessions/{sid}/quick-edits/{offers['quick-pin-tooltip']}/apply",
        json={"scope": "here"}))
    spec = applied["artboards"][phone]["spec"]
    assert spec["layers"][0]["tooltip"]["fixedPosition"] == "bottom"
    fail(client.post(
        f"/sessions/{sid}/quick-edits/{offers['quick-pin-tooltip']}/apply",
        json={}), 404)


def test_preferences_routes(client):
    data = make_session(client)
    sid = data["id"]
    prefs = ok(client.get(f"/sessions/{sid}/preferences"))
    assert prefs["maxSuggestions"] == 6
    updated = ok(client.put(f"/sessions/{sid}/preferences",
                            json={"maxSuggestions": 4,
                                  "verbosity": "transformationsOnly"}))
    assert updated["maxSuggestions"] == 4
    fail(client.put(f"/sessions/{sid}/preferences",
                    json={"drasticRatio": 7}), 400, "SchemaError")


def test_preview_and_export_routes(client):
    data = make_session(client, devices=("desktop", "phone"))
    sid = data["id"]
    previews = ok(client.get(f"/sessions/{sid}/preview"))["artboards"]
    assert len(previews) == 2
    for row in previews:
        assert row["svg"].startswith("<svg")
        assert row["displayWidth"] > 0
    single = ok(client.get(f"/artboards/{data['sourceArtboardId']}/preview"))
    assert single["displayWidth"] == 1280

    out = ok(client.get(f"/sessions/{sid}/export"))
    assert len(out["breakpoints"]) == 2
    assert out["html"].count("@media") == 2
    again = ok(client.get(f"/sessions/{sid}/export"))
    assert again["html"] == out["html"]


def test_no_candidates_maps_to_422(client):
    data = make_session(client)
    aid = data["sourceArtboardId"]
    err = fail(client.post(f"/artboards/{aid}/recommend", json={}),
               422, "NoCandidatesError")
    assert "stats" in err["details"]


def test_verbosity_changes_descriptions(client):
    data = make_session(client, devices=("desktop", "phone"))
    sid = data["id"]
    phone = next(ab["id"] for ab in data["artboards"]
                 if ab["device"]["name"] == "phone")
    ok(client.post(f"/sessions/{sid}/active", json={"artboardId": phone}))
    ok(client.put(f"/sessions/{sid}/preferences",
                  json={"verbosity": "transformationsOnly"}))
    sugs = ok(client.post(f"/artboards/{phone}/recommend", json={}))["suggestions"]
    assert all(d["rationale"] is None
               for s in sugs for d in s["descriptions"])
