import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fixtures as fx
from dupo import Studio
from dupo.devices import DeviceProfile, preset
from dupo.errors import ExportError
from dupo.export import (
    compute_breakpoints, export_html, export_session, media_query, render_svg,
)


def profile(width, name=None):
    return DeviceProfile(name=name or f"w{width}", cls="desktop",
                         screenWidth=width, screenHeight=width, ppi=96.0)


def pairs_for(widths):
    spec = fx.bar_chart(6)
    return [(profile(w), spec) for w in widths]


def test_midpoint_breakpoints():
    bps = compute_breakpoints(pairs_for([375, 768, 1280]))
    assert [bp["device"] for bp in bps] == ["w375", "w768", "w1280"]
    assert bps[0]["minWidth"] is None and bps[0]["maxWidth"] == 571.5
    assert bps[1] == {"device": "w768", "minWidth": 571.5, "maxWidth": 1024}
    assert bps[2]["minWidth"] == 1024 and bps[2]["maxWidth"] is None


def test_media_query_range_syntax():
    bps = compute_breakpoints(pairs_for([375, 768, 1280]))
    assert media_query(bps[0]) == "@media (width < 571.5px)"
    assert media_query(bps[1]) == "@media (571.5px <= width < 1024px)"
    assert media_query(bps[2]) == "@media (width >= 1024px)"
    only = compute_breakpoints(pairs_for([800]))
    assert media_query(only[0]) is None


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(min_value=80, max_value=4000), min_size=1,
                max_size=7, unique=True))
def test_breakpoints_partition_the_width_axis(widths):
    bps = compute_breakpoints(pairs_for(widths))
    assert bps[0]["minWidth"] is None
    assert bps[-1]["maxWidth"] is None
    for left, right in zip(bps, bps[1:]):
        assert left["maxWidth"] == right["minWidth"]
        assert left["maxWidth"] is not None
    bounds = [bp["maxWidth"] for bp in bps[:-1]]
    assert bounds == sorted(bounds)
    for w, bp in zip(sorted(widths), bps):
        lo = bp["minWidth"] if bp["minWidth"] is not None else float("-inf")
        hi = bp["maxWidth"] if bp["maxWidth"] is not None else float("inf")
        assert lo < w <= hi or lo <= w < hi


def test_empty_export_raises():
    with pytest.raises(ExportError):
        compute_breakpoints([])
    with pytest.raises(ExportError):
        compute_breakpoints(pairs_for([375]) + pairs_for([375]))


def test_html_has_one_media_block_per_device():
    html = export_html(pairs_for([375, 768, 1280]))
    assert html.count("@media") == 3
    assert "@media (width < 571.5px)" in html
    assert "@media (571.5px <= width < 1024px)" in html
    assert "@media (width >= 1024px)" in html
    assert html.count('class="artboard"') == 3
    assert html.count("<svg") == 3


def test_export_is_byte_identical_across_runs():
    first = export_html(pairs_for([375, 768, 1280]))
    second = export_html(pairs_for([375, 768, 1280]))
    assert first == second
    third = export_html([(profile(w), fx.bar_chart(6))
                         for w in (375, 768, 1280)])
    assert first == third


def test_render_svg_shapes():
    svg = render_svg(fx.bar_chart(5))
    assert svg.count("<rect") >= 6
    svg = render_svg(fx.line_chart(24))
    assert "<line" in svg
    svg = render_svg(fx.pie_chart())
    assert svg.count("arcWedge") == 0 and svg.count("<path") == 4
    assert "<text" in svg


def test_svg_escapes_text():
    d = fx.bar_chart(4).to_dict()
    d["title"] = {"text": 'A <b>"bold"</b> & plain title',
                  "placement": "external"}
    svg = render_svg(fx.spec_of(d))
    assert "&lt;b&gt;" in svg and "&amp;" in svg and "&quot;" in svg
    assert "<b>" not in svg


def test_export_session_prefers_newest_duplicate(catalog, line_spec):
    studio = Studio(catalog=catalog)
    session = studio.create_session({"spec": line_spec.to_dict(),
                                     "devices": ["desktop", "phone"]})
    phone_ab = next(ab for ab in session.artboards.values()
                    if ab.device.name == "phone")
    studio.set_active(session, phone_ab.id)
    batch = studio.request_suggestions(session, phone_ab.id)
    branch = studio.branch_suggestion(session, batch.suggestions[0].id)

    out = export_session(session)
    assert len(out["breakpoints"]) == 2
    assert out["html"].count("<svg") == 2
    phone_div = out["html"].split('<div id="ab-phone"')[1]
    width = re.search(r'<svg[^>]*width="([0-9.]+)"', phone_div).group(1)
    assert float(width) == branch.spec.width


def test_export_session_uses_title(catalog, line_spec):
    studio = Studio(catalog=catalog)
    session = studio.create_session({"spec": line_spec.to_dict(),
                                     "device": "desktop"})
    out = export_session(session)
    assert "<title>Monthly visitors by acquisition channel</title>" \
        in out["html"]
    assert out["breakpoints"][0]["device"] == "desktop"


def test_preset_trio_boundaries(catalog, line_spec):
    studio = Studio(catalog=catalog)
    session = studio.create_session({"spec": line_spec.to_dict(),
                                     "devices": ["phone", "tablet", "desktop"]})
    out = export_session(session)
    bounds = [(bp["minWidth"], bp["maxWidth"]) for bp in out["breakpoints"]]
    assert bounds == [(None, 571.5), (571.5, 1024.0), (1024.0, None)]
    again = export_session(session)
    assert again["html"] == out["html"]
