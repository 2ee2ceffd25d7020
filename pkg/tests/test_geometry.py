import pytest

import fixtures as fx
from dupo.errors import EmptyDataError
from dupo.geometry import (
    annotation_anchor_distance, estimate_geometry, layout_detail,
)
from dupo.rules import apply_rules, rule


def test_chart_area_fits_inside_canvas(corpus_specs):
    for name, spec in corpus_specs:
        chart = estimate_geometry(spec).chartArea
        assert chart.x >= 0 and chart.y >= 0, name
        assert chart.x2 <= spec.width + 0.01, name
        assert chart.y2 <= spec.height + 0.01, name
        assert chart.w > 0 and chart.h > 0, name


def test_line_chart_emits_one_glyph_per_datum(line_spec):
    d = layout_detail(line_spec)
    assert len(d.geom.glyphs) == 200
    assert len(d.positions) == 200
    assert set(d.series) == {"organic", "paid", "referral"}
    assert all(g.shape == "segment" or g.bbox.w >= 1 for g in d.geom.glyphs)


def test_series_keys_ordered_along_x(line_spec):
    d = layout_detail(line_spec)
    for skey, keys in d.series.items():
        xs = [d.positions[k]["x"] for k in keys if k in d.positions]
        assert xs == sorted(xs), skey


def test_bar_chart_band_geometry(bar_spec):
    d = layout_detail(bar_spec)
    bars = [g for g in d.geom.glyphs if g.shape == "rect"]
    assert len(bars) == 14
    chart = d.geom.chartArea
    for g in bars:
        assert g.bbox.x >= chart.x - 0.01
        assert g.bbox.x2 <= chart.x2 + 0.01
    # disjoint bands
    spans = sorted((g.bbox.x, g.bbox.x2) for g in bars)
    for (_, right), (left, _) in zip(spans, spans[1:]):
        assert right <= left + 0.01


def test_pie_emits_wedges(pie_spec):
    d = layout_detail(pie_spec)
    wedges = [g for g in d.geom.glyphs if g.shape == "arcWedge"]
    assert len(wedges) == 4
    spans = []
    for g in wedges:
        (cx, cy), (radius, a0, a1) = g.path
        assert radius > 0 and a1 > a0
        spans.append(a1 - a0)
    assert sum(spans) == pytest.approx(2 * 3.141592653589793, abs=1e-6)


def test_facet_cells_partition_datums():
    spec = fx.faceted_chart()
    d = layout_detail(spec)
    assert len(d.geom.glyphs) == 3 * 18
    # three non-overlapping columns
    xs = sorted({round(g.bbox.x, 1) for g in d.geom.glyphs})
    assert xs[0] < xs[-1]


def test_heatmap_rect_grid():
    spec = fx.heatmap_chart()
    d = layout_detail(spec)
    rects = [g for g in d.geom.glyphs if g.shape == "rect"]
    assert len(rects) == 72


def test_value_positions_track_the_quantitative_channel(bar_spec):
    d = layout_detail(bar_spec)
    assert d.value_channel == "y"
    values = {r["product"]: r["units"] for r in bar_spec.dataset.rows}
    # higher value -> higher pixel value (value axis grows upward)
    items = sorted(d.positions.items(), key=lambda kv: kv[1]["value"])
    assert items[0][1]["value"] <= items[-1][1]["value"]
    assert len(values) == len(items)


def test_aggregated_line_collapses_positions(line_spec):
    out = apply_rules(line_spec, [
        rule("data", None, "modify", {"aggregate": "mean", "bins": 8})])
    d = layout_detail(out)
    assert len(d.positions) < 40
    assert d.source_count == 200


def test_empty_dataset_raises(bar_spec):
    d = bar_spec.to_dict()
    d["dataset"]["rows"] = []
    empty = fx.spec_of(d)
    with pytest.raises(EmptyDataError):
        layout_detail(empty)


def test_annotation_anchor_distance(line_spec):
    # box-to-anchor distance: zero when the anchor sits inside the box
    near = annotation_anchor_distance(line_spec, "note-peak")
    far = annotation_anchor_distance(line_spec, "note-launch")
    assert near is not None and far is not None
    assert 0 < near < 30
    assert far > near + 20
    assert annotation_anchor_distance(line_spec, "ghost") is None


def test_out_of_chart_annotations_do_not_overlap_marks(line_spec):
    moved = apply_rules(line_spec, [
        rule("annotation", "note-peak", "modify",
             {"placement": "outOfChart"}),
        rule("annotation", "note-launch", "modify",
             {"placement": "outOfChart"}),
    ])
    d = layout_detail(moved)
    chart = d.geom.chartArea
    notes = [b for b in d.geom.textBoxes if b.role == "annotation"]
    assert notes
    for b in notes:
        assert b.bbox.y >= chart.y2 - 0.01


def test_title_placement_moves_text_box(line_spec):
    internal = apply_rules(line_spec, [
        rule("title", None, "reposition", {"placement": "internal"})])
    d_ext = layout_detail(line_spec)
    d_int = layout_detail(internal)
    t_ext = next(b for b in d_ext.geom.textBoxes if b.role == "title")
    t_int = next(b for b in d_int.geom.textBoxes if b.role == "title")
    chart_int = d_int.geom.chartArea
    assert t_ext.bbox.y < d_ext.geom.chartArea.y
    assert t_int.bbox.y >= chart_int.y - 0.01


def test_font_scale_grows_text_boxes(line_spec):
    big = apply_rules(line_spec, [rule("size", None, "resize",
                                       {"width": 640, "height": 400,
                                        "fontScale": 1.25})])
    t1 = next(b for b in layout_detail(line_spec).geom.textBoxes
              if b.role == "title")
    t2 = next(b for b in layout_detail(big).geom.textBoxes
              if b.role == "title")
    assert t2.bbox.h > t1.bbox.h


def test_tiny_canvas_still_compiles(line_spec):
    small = apply_rules(line_spec, [rule("size", None, "resize",
                                         {"width": 96, "height": 96})])
    d = layout_detail(small)
    assert d.geom.chartArea.w >= 1
    assert d.geom.chartArea.h >= 1
