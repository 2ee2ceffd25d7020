"""Acceptance gate: one test per shipped guarantee, one verdict line each.

Run with ``pytest -v tests/test_acceptance.py``; the per-test PASSED/FAILED
column is the per-criterion verdict. Each test also prints its own
``criterion NN: PASS`` line for ``-s`` runs.
"""

import csv
import json
import math
import random
import time

import pytest
from click.testing import CliRunner

import fixtures as fx
from test_ranking import (
    TREND_SLOPE_1_TO_2, random_rects, rect_scene, series_detail, union_areas,
)
from dupo import Studio, load_catalog, preset
from dupo.cli import main as cli_main
from dupo.errors import (
    CompileError, LockedArtboardError, NoActiveArtboardError,
    NoCandidatesError, SchemaError, UnknownVersionError,
)
from dupo.export import compute_breakpoints, export_session, media_query
from dupo.geometry import layout_detail
from dupo.ranking import (
    identification_loss, measure_pair, occupation_ratio, overplot_ratio,
    trend_loss,
)
from dupo.recommender import ConstraintStore, generate_suggestions, quick_edits_for
from dupo.rules import apply_rules, rule
from dupo.visspec import parse_spec, serialize_spec


def verdict(n: int, text: str) -> None:
    print(f"criterion {n:02d}: PASS - {text}")


def explore(spec, catalog, scope, store=None, src="desktop", tgt="phone",
            **kw):
    return generate_suggestions(
        spec, preset(src), preset(tgt), catalog,
        store if store is not None else ConstraintStore(), scope=scope, **kw)


def test_criterion_01_drastic_split(line_spec, catalog):
    started = time.perf_counter()
    sugs = explore(line_spec, catalog, "c1", max_n=5, drastic_ratio=0.6)
    elapsed = time.perf_counter() - started
    drastic = sum(s.drastic for s in sugs)
    assert len(sugs) == 5
    assert drastic == 3
    assert len(sugs) - drastic == 2
    assert elapsed < 1.0
    verdict(1, f"5 suggestions split 3 drastic / 2 gentle in {elapsed:.2f}s")


def test_criterion_02_pie_source_pruning(pie_spec, catalog):
    batches = 0
    suggestions = 0
    violations = 0
    for i in range(100):
        try:
            sugs = explore(pie_spec, catalog, f"c2-{i}", max_n=6,
                           drastic_ratio=0.5)
        except NoCandidatesError:
            continue
        batches += 1
        for s in sugs:
            suggestions += 1
            has_transpose = any(r.action == "transpose" for r in s.rules)
            changes_mark = any(r.specifier.role == "mark"
                               and "markType" in (r.option or {})
                               for r in s.rules)
            if has_transpose and not changes_mark:
                violations += 1
    assert batches == 100
    assert suggestions > 0
    assert violations == 0
    verdict(2, f"{batches} pie batches, {suggestions} suggestions, "
               f"0 bare transposes")


def test_criterion_03_tablet_stays_within_resize_transpose(catalog,
                                                           corpus_specs):
    checked = 0
    violations = []
    for name, spec in corpus_specs:
        try:
            sugs = explore(spec, catalog, f"c3-{name}", tgt="tablet",
                           max_n=8, drastic_ratio=0.6)
        except NoCandidatesError:
            continue
        for s in sugs:
            checked += 1
            for r in s.rules:
                if r.action not in ("resize", "transpose"):
                    violations.append((name, s.entryId, r.action))
    assert checked > 0
    assert violations == []
    verdict(3, f"{checked} tablet suggestions, all rules in "
               f"{{resize, transpose}}")


def test_criterion_04_lock_soundness(line_spec, catalog):
    element_store = ConstraintStore()
    element_store.set_lock("legend|color", "element", True)
    kept = 0
    for i in range(20):
        try:
            sugs = explore(line_spec, catalog, f"c4e-{i}",
                           store=element_store, max_n=6, drastic_ratio=0.5)
        except NoCandidatesError:
            break
        for s in sugs:
            legend = s.resultSpec.legends.get("color")
            assert legend is not None and legend.visible, s.entryId
            kept += 1

    both_store = ConstraintStore()
    both_store.set_lock("legend|color", "element", True)
    both_store.set_lock("legend|color", "position", True)
    pinned = 0
    for i in range(20):
        try:
            sugs = explore(line_spec, catalog, f"c4p-{i}", store=both_store,
                           max_n=6, drastic_ratio=0.5)
        except NoCandidatesError:
            break
        for s in sugs:
            legend = s.resultSpec.legends.get("color")
            assert legend is not None and legend.visible, s.entryId
            assert legend.position == line_spec.legends["color"].position
            pinned += 1
    assert kept > 0 and pinned > 0
    verdict(4, f"legend survived {kept} element-locked and {pinned} "
               f"position-locked suggestions")


def test_criterion_05_hide_semantics(line_spec, catalog):
    studio = Studio(catalog=catalog)
    session = studio.create_session({"spec": line_spec.to_dict(),
                                     "device": "desktop"})
    phone = studio.add_artboard(session, "phone")
    heat = next(s for s in session.batch.suggestions
                if s.entryId == "lines-to-heatmap")
    sig = heat.signature
    entry = studio.hide_suggestion(session, heat.id)
    assert entry["hiddenSignatures"]

    later = []
    for _ in range(30):
        try:
            batch = studio.request_suggestions(session, phone.id)
        except NoCandidatesError:
            break
        later.extend(batch.suggestions)
    assert all(s.signature != sig for s in later)

    studio.revert_hidden(session, entry["id"])
    revived = studio.request_suggestions(session, phone.id)
    assert any(s.signature == sig for s in revived.suggestions)
    verdict(5, f"hidden signature absent from {len(later)} later "
               f"suggestions, reappeared after revert")


def test_criterion_06_quick_edit_triggers(line_spec, catalog):
    fired = []

    tooltip_rule = rule("tooltip", None, "add", {"enabled": True})
    after = apply_rules(line_spec, [tooltip_rule])
    offers = quick_edits_for(tooltip_rule, line_spec, after, preset("phone"),
                             catalog, ConstraintStore())
    offer = next(o for o in offers if o.entryId == "quick-pin-tooltip")
    out = apply_rules(after, offer.rules)
    assert out.layers[0].tooltip.fixedPosition == "bottom"
    fired.append("tooltip/phone")

    near_rule = rule("annotation", "note-peak", "reposition",
                     {"dx": 4, "dy": -6})
    after = apply_rules(line_spec, [near_rule])
    offers = quick_edits_for(near_rule, line_spec, after, preset("desktop"),
                             catalog, ConstraintStore())
    offer = next(o for o in offers if o.entryId == "quick-drop-anchor-line")
    out = apply_rules(after, offer.rules)
    assert out.annotation("note-peak").tickLine is False
    fired.append("annotation-near")

    far_rule = rule("annotation", "note-launch", "reposition",
                    {"dx": 150, "dy": -90})
    after = apply_rules(line_spec, [far_rule])
    offers = quick_edits_for(far_rule, line_spec, after, preset("desktop"),
                             catalog, ConstraintStore())
    offer = next(o for o in offers if o.entryId == "quick-add-anchor-line")
    out = apply_rules(after, offer.rules)
    assert out.annotation("note-launch").tickLine is True
    fired.append("annotation-far")

    base = fx.bar_chart().to_dict()
    base["title"] = {"text": "", "placement": "external"}
    spec = fx.spec_of(base)
    title_rule = rule("title", None, "add", {"text": "Numbers",
                                             "placement": "external"})
    after = apply_rules(spec, [title_rule])
    for device in ("desktop", "tablet"):
        offers = quick_edits_for(title_rule, spec, after, preset(device),
                                 catalog, ConstraintStore())
        offer = next(o for o in offers if o.entryId == "quick-title-inside")
        out = apply_rules(after, offer.rules)
        assert out.title.placement == "internal"
    fired.append("title/desktop+tablet")

    assert len(fired) == 4
    verdict(6, "all four quick-edit triggers fired and compiled: "
               + ", ".join(fired))


def test_criterion_07_ranking_math(corpus_specs):
    for name, spec in corpus_specs:
        d = layout_detail(spec)
        m = measure_pair(d, d)
        assert (m.identification, m.comparison, m.trend, m.text) == \
            (0.0, 0.0, 0.0, 0.0), name

    src = layout_detail(fx.ten_row_bars())
    tgt = layout_detail(fx.ten_row_bars_aggregated())
    assert identification_loss(src, tgt) == pytest.approx(0.8, abs=0.0)

    rng = random.Random(1204)
    worst = 0.0
    for _ in range(50):
        w = rng.choice((120, 160, 200))
        h = rng.choice((90, 140, 180))
        rects = random_rects(rng, w, h, rng.randrange(1, 7))
        detail = rect_scene(rects, w, h)
        area1, area2 = union_areas(rects)
        want_over = 0.0 if area1 == 0 else area2 / area1
        want_occ = area1 / (w * h)
        worst = max(worst,
                    abs(overplot_ratio(detail) - want_over),
                    abs(occupation_ratio(detail) - want_occ))
    assert worst <= 0.01

    got = trend_loss(series_detail(1.0), series_detail(2.0))
    assert got == pytest.approx(TREND_SLOPE_1_TO_2, abs=1e-3)
    assert TREND_SLOPE_1_TO_2 == pytest.approx(
        abs(math.atan(1) - math.atan(2)) / math.pi, abs=1e-12)
    verdict(7, f"identity zeros, identification 0.8, raster error "
               f"{worst:.4f} <= 0.01, trend within 1e-3")


def test_criterion_08_propagation_and_history(catalog):
    studio = Studio(catalog=catalog)
    session = studio.create_session({
        "spec": fx.line_chart(60).to_dict(),
        "devices": ["desktop", "tablet", "phone"],
    })
    rng = random.Random(808)
    ab_ids = list(session.artboards)
    frozen = {}
    titles = ("Traffic", "Visitors", "Channels", "Overview")
    positions = ("right", "bottom", "left", "top")

    def random_edit():
        choice = rng.randrange(6)
        if choice == 0:
            return {"specifier": {"role": "legend", "selector": "color"},
                    "action": "reposition",
                    "option": {"position": rng.choice(positions)}}
        if choice == 1:
            return {"specifier": {"role": "title"}, "action": "modify",
                    "option": {"text": rng.choice(titles)}}
        if choice == 2:
            return {"specifier": {"role": "tooltip"},
                    "action": "add" if rng.random() < 0.5 else "remove",
                    "option": {"enabled": True} if rng.random() < 0.5 else None}
        if choice == 3:
            return {"specifier": {"role": "annotation",
                                  "selector": "note-peak"},
                    "action": "reposition",
                    "option": {"dx": rng.randrange(-40, 80),
                               "dy": rng.randrange(-60, 10)}}
        if choice == 4:
            return {"specifier": {"role": "size"}, "action": "resize",
                    "option": {"width": rng.randrange(240, 900),
                               "height": rng.randrange(200, 700)}}
        return {"specifier": {"role": "axis", "selector": "x"},
                "action": "modify",
                "option": {"tickCount": rng.randrange(2, 9)}}

    def op_edit():
        kind = rng.choice(("manual", "directManipulation"))
        studio.apply_edit(session, random_edit(), kind,
                          propagate=rng.random() < 0.8)

    def op_set_active():
        studio.set_active(session, rng.choice(ab_ids))

    def op_toggle_lock():
        studio.toggle_lock(session, rng.choice(ab_ids))

    def op_solo_lock():
        studio.solo_lock(session, rng.choice(ab_ids))

    def op_undo():
        ab = session.artboards[rng.choice(ab_ids)]
        if ab.editHistory:
            rec = rng.choice(ab.editHistory)
            studio.set_edit_undone(session, ab.id, rec.id,
                                   not rec.undone)

    def op_save():
        studio.save_version(session, rng.choice(ab_ids))

    def op_checkout():
        ab = session.artboards[rng.choice(ab_ids)]
        if ab.versions:
            studio.checkout_version(session, ab.id,
                                    rng.choice(ab.versions).id)

    def op_recommend():
        studio.request_suggestions(session, rng.choice(ab_ids))

    ops = ([op_edit] * 8 + [op_set_active] * 3 + [op_toggle_lock] * 3 +
           [op_solo_lock] + [op_undo] * 3 + [op_save] * 2 +
           [op_checkout] * 2 + [op_recommend])
    tolerated = (CompileError, LockedArtboardError, NoActiveArtboardError,
                 NoCandidatesError, UnknownVersionError, SchemaError)

    started = time.perf_counter()
    attempted = 0
    for _ in range(200):
        attempted += 1
        try:
            rng.choice(ops)()
        except tolerated:
            pass

        for ab in session.artboards.values():
            if ab.locked and ab.id not in frozen:
                frozen[ab.id] = serialize_spec(ab.spec)
            elif not ab.locked:
                frozen.pop(ab.id, None)

        active_id = session.activeArtboardId
        assert active_id is None or active_id in session.artboards
        if active_id is not None:
            assert not session.artboards[active_id].locked
        for ab in session.artboards.values():
            if ab.locked:
                assert serialize_spec(ab.spec) == frozen[ab.id], ab.id
            assert serialize_spec(ab.recompile()) == serialize_spec(ab.spec)
    elapsed = time.perf_counter() - started
    assert attempted == 200
    assert elapsed < 10.0
    verdict(8, f"200 randomized ops on 3 artboards held all three "
               f"invariants in {elapsed:.2f}s")


def test_criterion_09_alteration_separation(catalog, corpus_specs):
    checked = 0
    violations = []
    for name, spec in corpus_specs:
        store = ConstraintStore()
        try:
            parents = explore(spec, catalog, f"c9-{name}", store=store,
                              max_n=6, drastic_ratio=0.5)
        except NoCandidatesError:
            continue
        for parent in parents[:2]:
            try:
                kids = explore(spec, catalog, f"c9-{name}:{parent.id}",
                               store=store, max_n=6, drastic_ratio=0.5,
                               parent=parent)
            except NoCandidatesError:
                continue
            pd = parent.resultSpec
            for kid in kids:
                checked += 1
                ks = kid.resultSpec
                same_marks = ([l.markType for l in ks.layers]
                              == [l.markType for l in pd.layers])
                same_enc = all(
                    [(e.channel, e.field, e.aggregate, e.bin)
                     for e in kl.encodings]
                    == [(e.channel, e.field, e.aggregate, e.bin)
                        for e in pl.encodings]
                    for kl, pl in zip(ks.layers, pd.layers))
                same_facet = (
                    (ks.facet.to_dict() if ks.facet else None)
                    == (pd.facet.to_dict() if pd.facet else None))
                same_filter = (
                    (ks.transform.to_dict() if ks.transform else None)
                    == (pd.transform.to_dict() if pd.transform else None))
                if not (same_marks and same_enc and same_facet
                        and same_filter):
                    violations.append((name, kid.entryId))
    assert checked > 0
    assert violations == []
    verdict(9, f"{checked} alteration children left mark, encodings, "
               f"aggregate, filter, and facet untouched")


def test_criterion_10_export_breakpoints(catalog, line_spec):
    studio = Studio(catalog=catalog)
    session = studio.create_session({"spec": line_spec.to_dict(),
                                     "devices": ["phone", "tablet", "desktop"]})
    widths = sorted(ab.device.screenWidth
                    for ab in session.artboards.values())
    assert widths == [375, 768, 1280]

    out = export_session(session)
    bps = out["breakpoints"]
    assert len(bps) == 3
    assert out["html"].count("@media") == 3
    assert bps[0]["maxWidth"] == 571.5 and bps[1]["minWidth"] == 571.5
    assert bps[1]["maxWidth"] == 1024 and bps[2]["minWidth"] == 1024
    assert bps[0]["minWidth"] is None and bps[2]["maxWidth"] is None
    for left, right in zip(bps, bps[1:]):
        assert left["maxWidth"] == right["minWidth"]
    assert "@media (width < 571.5px)" in out["html"]
    assert "@media (571.5px <= width < 1024px)" in out["html"]
    assert "@media (width >= 1024px)" in out["html"]

    assert export_session(session)["html"] == out["html"]
    verdict(10, "3 media blocks at 571.5/1024 partition (0, inf), "
                "byte-identical rerun")


def test_criterion_11_cli_end_to_end(tmp_path):
    spec_path = tmp_path / "line200.json"
    spec_path.write_text(json.dumps(fx.line_chart(200).to_dict()),
                         encoding="utf-8")
    out_dir = tmp_path / "out"
    runner = CliRunner()
    started = time.perf_counter()
    result = runner.invoke(cli_main, [
        "recommend", "--spec", str(spec_path), "--target-device", "phone",
        "--out", str(out_dir)])
    elapsed = time.perf_counter() - started
    assert result.exit_code == 0, result.output
    assert elapsed < 2.0

    suggestion_files = sorted(out_dir.glob("suggestion-*.json"))
    assert len(suggestion_files) >= 4
    aggregated = 0
    for p in suggestion_files:
        payload = json.loads(p.read_text(encoding="utf-8"))
        assert {"id", "entryId", "level", "drastic", "rules", "scores",
                "resultSpec"} <= set(payload)
        parse_spec(json.dumps(payload["resultSpec"]))
        if any("aggregate" in (r.get("option") or {})
               for r in payload["rules"]):
            aggregated += 1
    assert aggregated >= 1
    with open(out_dir / "scores.csv", newline="", encoding="utf-8") as fh:
        assert len(list(csv.DictReader(fh))) == len(suggestion_files)
    verdict(11, f"{len(suggestion_files)} well-formed suggestions "
                f"({aggregated} with aggregation) in {elapsed:.2f}s")
