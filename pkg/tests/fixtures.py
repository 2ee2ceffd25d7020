"""Deterministic chart fixtures shared across the suite.

Everything here goes through ``parse_spec`` so fixtures double as parser
exercises.  Builders are plain functions; conftest wraps the common ones
as pytest fixtures.  No randomness: values come from closed formulas so
tests can freeze expectations.
"""

from __future__ import annotations

import json
import math

from dupo.visspec import VisSpec, datum_key, parse_spec

SEGMENTS = ("organic", "paid", "referral")
_BASE = {"organic": 410.0, "paid": 260.0, "referral": 150.0}
_PHASE = {"organic": 0.0, "paid": 2.1, "referral": 4.2}


def month_iso(k: int) -> str:
    """Month k counting from 2018-01."""
    y, m = divmod(k, 12)
    return f"{2018 + y:04d}-{m + 1:02d}-01"


def spec_of(d: dict) -> VisSpec:
    return parse_spec(json.dumps(d))


def line_rows(n: int = 200) -> list:
    rows = []
    for i in range(n):
        seg = SEGMENTS[i % 3]
        k = i // 3
        value = (_BASE[seg] + 2.5 * k
                 + 60.0 * math.sin(k / 6.0 + _PHASE[seg])
                 + (i * 37) % 23 - 11)
        rows.append({"month": month_iso(k), "visitors": round(value, 1),
                     "segment": seg})
    return rows


def line_chart(n: int = 200) -> VisSpec:
    """3-series monthly line chart sized for a desktop artboard.

    The workhorse fixture: temporal x, quantitative y, nominal color,
    external title, right legend, two anchored in-chart annotations.
    """
    rows = line_rows(n)
    spec = spec_of({
        "dataset": {
            "name": "traffic",
            "fields": [
                {"name": "month", "type": "temporal"},
                {"name": "visitors", "type": "quantitative"},
                {"name": "segment", "type": "nominal"},
            ],
            "rows": rows,
        },
        "layers": [{
            "markType": "line",
            "encodings": [
                {"channel": "x", "field": "month", "type": "temporal"},
                {"channel": "y", "field": "visitors", "type": "quantitative"},
                {"channel": "color", "field": "segment", "type": "nominal"},
            ],
        }],
        "width": 640,
        "height": 400,
        "title": {"text": "Monthly visitors by acquisition channel",
                  "placement": "external"},
        "axes": {"x": {"tickCount": 6}, "y": {"tickCount": 5}},
        "legends": {"color": {"visible": True, "position": "right"}},
    })
    # anchor annotations to real rows so reposition distances are defined
    peak = max(rows, key=lambda r: r["visitors"])
    first = rows[0]
    spec2 = spec.to_dict()
    spec2["annotations"] = [
        {"id": "note-peak", "text": "Seasonal peak",
         "anchorKey": datum_key(spec.dataset, peak),
         "dx": 12, "dy": -18, "tickLine": True, "placement": "inChart"},
        {"id": "note-launch", "text": "Tracking begins",
         "anchorKey": datum_key(spec.dataset, first),
         "dx": 80, "dy": -60, "tickLine": False, "placement": "inChart"},
    ]
    return spec_of(spec2)


def pie_chart() -> VisSpec:
    cats = [("search", 48.0), ("social", 26.0), ("email", 15.0),
            ("direct", 11.0)]
    return spec_of({
        "dataset": {
            "name": "share",
            "fields": [
                {"name": "channel", "type": "nominal"},
                {"name": "share", "type": "quantitative"},
            ],
            "rows": [{"channel": c, "share": v} for c, v in cats],
        },
        "layers": [{
            "markType": "arc",
            "encodings": [
                {"channel": "color", "field": "channel", "type": "nominal"},
                {"channel": "size", "field": "share", "type": "quantitative"},
            ],
        }],
        "width": 420,
        "height": 420,
        "title": {"text": "Traffic share", "placement": "external"},
        "legends": {"color": {"visible": True, "position": "right"}},
    })


def bar_chart(n_cats: int = 14) -> VisSpec:
    rows = [{"product": f"item {chr(97 + i)}",
             "units": round(340.0 - 17.5 * i + (i * i * 3) % 29, 1)}
            for i in range(n_cats)]
    return spec_of({
        "dataset": {
            "name": "sales",
            "fields": [
                {"name": "product", "type": "nominal"},
                {"name": "units", "type": "quantitative"},
            ],
            "rows": rows,
        },
        "layers": [{
            "markType": "bar",
            "encodings": [
                {"channel": "x", "field": "product", "type": "nominal"},
                {"channel": "y", "field": "units", "type": "quantitative"},
            ],
        }],
        "width": 560,
        "height": 360,
        "title": {"text": "Units sold by product", "placement": "external"},
        "axes": {"x": {"tickCount": 6}, "y": {"tickCount": 5}},
    })


def scatter_chart(n: int = 240) -> VisSpec:
    rows = []
    for i in range(n):
        x = (i * 7919) % 997 / 10.0
        y = 18.0 + 0.6 * x + ((i * 104729) % 389) / 12.0
        rows.append({"load": round(x, 2), "latency": round(y, 2)})
    return spec_of({
        "dataset": {
            "name": "perf",
            "fields": [
                {"name": "load", "type": "quantitative"},
                {"name": "latency", "type": "quantitative"},
            ],
            "rows": rows,
        },
        "layers": [{
            "markType": "point",
            "encodings": [
                {"channel": "x", "field": "load", "type": "quantitative"},
                {"channel": "y", "field": "latency", "type": "quantitative"},
            ],
        }],
        "width": 520,
        "height": 380,
        "title": {"text": "Latency under load", "placement": "external"},
    })


def heatmap_chart() -> VisSpec:
    rows = []
    for k in range(24):
        for day in ("mon", "wed", "fri"):
            rows.append({
                "month": month_iso(k), "day": day,
                "count": round(40 + 25 * math.sin(k / 3.0)
                               + {"mon": 0, "wed": 9, "fri": 17}[day], 1),
            })
    return spec_of({
        "dataset": {
            "name": "checkins",
            "fields": [
                {"name": "month", "type": "temporal"},
                {"name": "day", "type": "nominal"},
                {"name": "count", "type": "quantitative"},
            ],
            "rows": rows,
        },
        "layers": [{
            "markType": "rect",
            "encodings": [
                {"channel": "x", "field": "month", "type": "temporal"},
                {"channel": "y", "field": "day", "type": "nominal"},
                {"channel": "color", "field": "count",
                 "type": "quantitative"},
            ],
        }],
        "width": 520,
        "height": 240,
        "title": {"text": "Check-ins heat", "placement": "external"},
        "legends": {"color": {"visible": True, "position": "right"}},
    })


def faceted_chart() -> VisSpec:
    rows = []
    for region in ("north", "south", "west"):
        for k in range(18):
            rows.append({
                "month": month_iso(k), "region": region,
                "orders": round(90 + 6 * k
                                + {"north": 0, "south": 25, "west": -12}[region], 1),
            })
    return spec_of({
        "dataset": {
            "name": "orders",
            "fields": [
                {"name": "month", "type": "temporal"},
                {"name": "orders", "type": "quantitative"},
                {"name": "region", "type": "nominal"},
            ],
            "rows": rows,
        },
        "layers": [{
            "markType": "line",
            "encodings": [
                {"channel": "x", "field": "month", "type": "temporal"},
                {"channel": "y", "field": "orders", "type": "quantitative"},
            ],
        }],
        "facet": {"field": "region", "direction": "columns", "maxPerRow": 3},
        "width": 660,
        "height": 300,
        "title": {"text": "Orders by region", "placement": "external"},
    })


def ten_row_bars() -> VisSpec:
    """Ten bars in two categories; aggregating collapses 10 datums to 2."""
    rows = [{"label": f"p{i}", "group": "a" if i < 5 else "b",
             "score": float(10 + i)} for i in range(10)]
    return spec_of({
        "dataset": {
            "name": "panel",
            "fields": [
                {"name": "label", "type": "nominal"},
                {"name": "group", "type": "nominal"},
                {"name": "score", "type": "quantitative"},
            ],
            "rows": rows,
        },
        "layers": [{
            "markType": "bar",
            "encodings": [
                {"channel": "x", "field": "label", "type": "nominal"},
                {"channel": "y", "field": "score", "type": "quantitative"},
            ],
        }],
        "width": 400,
        "height": 300,
    })


def ten_row_bars_aggregated() -> VisSpec:
    """The ten_row_bars data re-encoded as two mean bars by group."""
    base = ten_row_bars().to_dict()
    base["layers"][0]["encodings"] = [
        {"channel": "x", "field": "group", "type": "nominal"},
        {"channel": "y", "field": "score", "type": "quantitative",
         "aggregate": "mean"},
    ]
    return spec_of(base)


def corpus() -> list:
    """Diverse (name, spec) pairs for whole-catalog property checks."""
    return [
        ("line200", line_chart()),
        ("line40", line_chart(40)),
        ("pie", pie_chart()),
        ("bars", bar_chart()),
        ("scatter", scatter_chart()),
        ("heatmap", heatmap_chart()),
        ("facets", faceted_chart()),
    ]
