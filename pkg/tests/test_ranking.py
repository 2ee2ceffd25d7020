"""Measure math against independent oracles.

The rect scenes use integer corners on purpose: center-sampled 1 px cells
then cover exactly the continuous area, so the raster ratios must agree
with the coordinate-compression oracle to float precision.
"""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dupo.geometry import GeometryEstimate, Glyph, LayoutDetail, Rect, TextBox
from dupo.ranking import (
    DEFAULT_WEIGHTS, comparison_loss, drastic_quota, identification_loss,
    measure_pair, occupation_ratio, overplot_ratio, select_top, text_loss,
    trend_loss,
)

# frozen: |atan(1) - atan(2)| / pi
TREND_SLOPE_1_TO_2 = 0.10241638234956672


# ---------------------------------------------------------------------------
# oracles


def union_areas(rects):
    """Exact (depth>=1, depth>=2) areas of axis-aligned rectangles.

    Coordinate compression: every cell of the induced grid is uniformly
    covered, so probing its center gives the exact depth.
    """
    xs = sorted({r[0] for r in rects} | {r[2] for r in rects})
    ys = sorted({r[1] for r in rects} | {r[3] for r in rects})
    area1 = 0.0
    area2 = 0.0
    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            cx = (xs[i] + xs[i + 1]) / 2
            cy = (ys[j] + ys[j + 1]) / 2
            depth = sum(1 for r in rects
                        if r[0] <= cx <= r[2] and r[1] <= cy <= r[3])
            cell = (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j])
            if depth >= 1:
                area1 += cell
            if depth >= 2:
                area2 += cell
    return area1, area2


def rect_scene(rects, w, h, ox=0.0, oy=0.0, text_boxes=()):
    glyphs = [Glyph(f"d{i}", "rect",
                    Rect(ox + x0, oy + y0, x1 - x0, y1 - y0))
              for i, (x0, y0, x1, y1) in enumerate(rects)]
    boxes = [TextBox("annotation", Rect(ox + x0, oy + y0, x1 - x0, y1 - y0), t)
             for (x0, y0, x1, y1, t) in text_boxes]
    geom = GeometryEstimate(chartArea=Rect(ox, oy, w, h), glyphs=glyphs,
                            textBoxes=boxes)
    return LayoutDetail(geom=geom, positions={}, value_channel=None,
                        series={}, glyph_layer=[0] * len(glyphs),
                        overflow=[], source_count=len(glyphs))


def series_detail(slope, n=12):
    """Straight series in screen space; slope is in value space (-y)."""
    positions = {f"p{i}": {"x": float(i * 10), "y": float(-slope * i * 10),
                           "value": float(slope * i * 10)}
                 for i in range(n)}
    geom = GeometryEstimate(chartArea=Rect(0, 0, 100, 100), glyphs=[],
                            textBoxes=[])
    return LayoutDetail(geom=geom, positions=positions, value_channel="y",
                        series={"s": sorted(positions)}, glyph_layer=[],
                        overflow=[], source_count=n)


def random_rects(rng, w, h, k):
    rects = []
    for _ in range(k):
        x0 = rng.randrange(0, w - 8)
        y0 = rng.randrange(0, h - 8)
        x1 = rng.randrange(x0 + 4, min(w, x0 + w // 2) + 1)
        y1 = rng.randrange(y0 + 4, min(h, y0 + h // 2) + 1)
        rects.append((x0, y0, x1, y1))
    return rects


# ---------------------------------------------------------------------------
# raster ratios vs oracle


def test_overplot_occupation_match_rect_oracle_on_random_scenes():
    rng = random.Random(1204)
    for scene in range(50):
        w = rng.choice((120, 160, 200))
        h = rng.choice((90, 140, 180))
        rects = random_rects(rng, w, h, rng.randrange(1, 7))
        detail = rect_scene(rects, w, h, ox=rng.choice((0.0, 31.0)),
                            oy=rng.choice((0.0, 17.0)))
        area1, area2 = union_areas(rects)
        want_over = 0.0 if area1 == 0 else area2 / area1
        want_occ = area1 / (w * h)
        assert overplot_ratio(detail) == pytest.approx(want_over, abs=0.01)
        assert occupation_ratio(detail) == pytest.approx(want_occ, abs=0.01)


def test_occupation_counts_text_boxes():
    detail = rect_scene([(0, 0, 10, 10)], 100, 100,
                        text_boxes=[(50, 50, 60, 60, "note")])
    assert occupation_ratio(detail) == pytest.approx(200 / 10000)
    # text is not glyph ink
    assert overplot_ratio(detail) == 0.0


def test_overplot_zero_without_overlap():
    detail = rect_scene([(0, 0, 10, 10), (20, 20, 30, 30)], 100, 100)
    assert overplot_ratio(detail) == 0.0


def test_overplot_full_overlap():
    detail = rect_scene([(10, 10, 30, 30), (10, 10, 30, 30)], 100, 100)
    assert overplot_ratio(detail) == 1.0


# ---------------------------------------------------------------------------
# loss measures


def test_identity_scores_zero_on_the_four_comparative_losses(corpus_specs):
    from dupo.geometry import layout_detail
    for name, spec in corpus_specs:
        d = layout_detail(spec)
        m = measure_pair(d, d)
        assert m.identification == 0.0, name
        assert m.comparison == 0.0, name
        assert m.trend == 0.0, name
        assert m.text == 0.0, name


def test_identification_ten_rows_to_two_groups_is_point_eight():
    import fixtures as fx
    from dupo.geometry import layout_detail
    src = layout_detail(fx.ten_row_bars())
    tgt = layout_detail(fx.ten_row_bars_aggregated())
    assert len(src.positions) == 10
    assert len(tgt.positions) == 2
    assert identification_loss(src, tgt) == pytest.approx(0.8, abs=0.0)


def test_identification_clamped_when_target_grows():
    import fixtures as fx
    from dupo.geometry import layout_detail
    src = layout_detail(fx.ten_row_bars_aggregated())
    tgt = layout_detail(fx.ten_row_bars())
    assert identification_loss(src, tgt) == 0.0


def test_trend_closed_form_slope_one_to_two():
    src = series_detail(1.0)
    tgt = series_detail(2.0)
    want = abs(math.atan(1.0) - math.atan(2.0)) / math.pi
    assert want == pytest.approx(TREND_SLOPE_1_TO_2, abs=1e-12)
    assert trend_loss(src, tgt) == pytest.approx(TREND_SLOPE_1_TO_2, abs=1e-3)


def test_trend_ignores_series_missing_on_either_side():
    src = series_detail(1.0)
    tgt = series_detail(1.0)
    tgt.series["extra"] = []
    assert trend_loss(src, tgt) == 0.0


def test_comparison_counts_flipped_and_collapsed_pairs():
    src = series_detail(1.0, n=4)     # value steps of 10 px, all legible
    flipped = series_detail(-1.0, n=4)
    collapsed = series_detail(0.0, n=4)
    assert comparison_loss(src, src) == 0.0
    assert comparison_loss(src, flipped) == 1.0
    assert comparison_loss(src, collapsed) == 1.0


def test_text_loss_is_word_retention():
    a = rect_scene([], 100, 100, text_boxes=[(0, 0, 10, 10, "peak month"),
                                             (0, 20, 10, 30, "low")])
    b = rect_scene([], 100, 100, text_boxes=[(0, 0, 10, 10, "peak")])
    assert text_loss(a, b) == pytest.approx(2 / 3)
    assert text_loss(a, a) == 0.0
    assert text_loss(b, a) == 0.0   # target keeps every source word


# ---------------------------------------------------------------------------
# weights and selection


def test_measure_pair_rejects_unknown_or_degenerate_weights():
    d = rect_scene([(0, 0, 10, 10)], 100, 100)
    with pytest.raises(ValueError):
        measure_pair(d, d, {"sparkle": 1.0})
    with pytest.raises(ValueError):
        measure_pair(d, d, {k: 0.0 for k in DEFAULT_WEIGHTS})


def test_combined_is_weighted_mean():
    d1 = rect_scene([(0, 0, 50, 50), (0, 0, 50, 50)], 100, 100)
    d2 = rect_scene([(0, 0, 10, 10)], 100, 100)
    m = measure_pair(d1, d2, {"overplot": 1.0, "occupation": 1.0,
                              "trend": 0.0, "identification": 0.0,
                              "comparison": 0.0, "text": 0.0})
    assert m.combined == pytest.approx((m.overplot + m.occupation) / 2)


def test_drastic_quota_rounds_half_up():
    assert drastic_quota(5, 0.6) == 3
    assert drastic_quota(6, 0.5) == 3
    assert drastic_quota(5, 0.5) == 3
    assert drastic_quota(4, 0.5) == 2
    assert drastic_quota(5, 0.0) == 0
    assert drastic_quota(5, 1.0) == 5


def _entries(n_drastic, n_gentle):
    out = []
    for i in range(n_drastic):
        out.append((i * 0.01 + 0.005, True, f"d{i}"))
    for i in range(n_gentle):
        out.append((i * 0.01, False, f"g{i}"))
    return out


def test_select_top_exact_split_when_both_classes_suffice():
    picked = select_top(_entries(3, 5), 5, 0.6)
    drastic = [p for p in picked if p.startswith("d")]
    assert len(picked) == 5
    assert len(drastic) == 3


def test_select_top_backfills_both_directions():
    picked = select_top(_entries(1, 9), 5, 0.6)
    assert len(picked) == 5
    assert sum(p.startswith("d") for p in picked) == 1

    picked = select_top(_entries(9, 1), 5, 0.6)
    assert len(picked) == 5
    assert sum(p.startswith("d") for p in picked) == 4


@settings(max_examples=200, deadline=None)
@given(
    n_drastic=st.integers(0, 12),
    n_gentle=st.integers(0, 12),
    max_n=st.integers(1, 10),
    ratio=st.floats(0.0, 1.0),
)
def test_select_top_quota_property(n_drastic, n_gentle, max_n, ratio):
    entries = _entries(n_drastic, n_gentle)
    picked = select_top(entries, max_n, ratio)
    take = min(max_n, len(entries))
    assert len(picked) == take
    # independent restatement of the fill rule
    quota = min(int(math.floor(max_n * ratio + 0.5)), take)
    want_d = min(quota, n_drastic)
    want_d += max(0, take - want_d - n_gentle)
    assert sum(p.startswith("d") for p in picked) == want_d
    assert len(set(picked)) == len(picked)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1), st.booleans()), max_size=30))
def test_select_top_is_ascending_by_score(pairs):
    entries = [(s, d, i) for i, (s, d) in enumerate(pairs)]
    picked = select_top(entries, 8, 0.5)
    scores = [entries[i][0] for i in picked]
    assert scores == sorted(scores)
