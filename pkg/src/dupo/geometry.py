"""Approximate glyph/text geometry for a spec.

This is not a renderer.  It is a deterministic estimate of where marks and
text end up, good enough to score design variants against each other:
linear/band/time scales, a fixed-width character model for text
(0.6 x fontSize per character), greedy word wrap for annotations, and a
simple margin model for axes, title and legends.

All coordinates are canvas pixels with y growing downward.  ``chartArea``
is the data region after margins.  Boxes may overflow the canvas; overflow
is reported on the layout detail, never clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import EmptyDataError
from .visspec import (
    Annotation, AxisDef, Dataset, EncodingDef, MarkLayer, VisSpec,
    datum_key, iso_to_ms,
)

PAD = 4.0
TICK_PAD = 4.0
LEGEND_PAD = 8.0
FACET_GAP = 10.0
FACET_LABEL_H = 14.0

TITLE_FONT = 16.0
AXIS_FONT = 11.0
TICK_FONT = 10.0
ANNOT_FONT = 11.0
LEGEND_FONT = 10.0

CHAR_W = 0.6       # width of one character as a fraction of font size
LINE_H = 1.2       # line height as a fraction of font size

POINT_SIDE = 6.0
BAR_FRACTION = 0.8
LEGEND_ENTRY_CAP = 16

GLYPH_SHAPES = ("rect", "point", "segment", "arcWedge")
TEXT_ROLES = ("title", "axisLabel", "tickLabel", "annotation", "legend")


@dataclass
class Rect:
    x: float
    y: float
    w: float
    h: float

    @property
    def x2(self):
        return self.x + self.w

    @property
    def y2(self):
        return self.y + self.h

    @property
    def cx(self):
        return self.x + self.w / 2

    @property
    def cy(self):
        return self.y + self.h / 2

    def to_dict(self):
        return {"x": round(self.x, 4), "y": round(self.y, 4),
                "w": round(self.w, 4), "h": round(self.h, 4)}


@dataclass
class Glyph:
    datumKey: str
    shape: str
    bbox: Rect
    seriesKey: str = ""
    # endpoints for segments; bboxes lose the diagonal direction
    path: Optional[tuple] = None

    def to_dict(self):
        d = {"datumKey": self.datumKey, "shape": self.shape,
             "bbox": self.bbox.to_dict(), "seriesKey": self.seriesKey}
        if self.path is not None:
            d["path"] = [[round(c, 4) for c in p] for p in self.path]
        return d


@dataclass
class TextBox:
    role: str
    bbox: Rect
    content: str

    def to_dict(self):
        return {"role": self.role, "bbox": self.bbox.to_dict(), "content": self.content}


@dataclass
class GeometryEstimate:
    chartArea: Rect
    glyphs: list
    textBoxes: list

    def to_dict(self):
        return {
            "chartArea": self.chartArea.to_dict(),
            "glyphs": [g.to_dict() for g in self.glyphs],
            "textBoxes": [t.to_dict() for t in self.textBoxes],
        }


@dataclass
class LayoutDetail:
    """Geometry plus the lookup tables the ranking measures need."""

    geom: GeometryEstimate
    positions: dict               # datumKey -> {"x":, "y":, "value": | None}
    value_channel: Optional[str]  # positional channel carrying the measure
    series: dict                  # seriesKey -> [datumKey, ...] in x order
    glyph_layer: list             # layer index per glyph
    overflow: list                # boxes that escape the canvas
    source_count: int             # datums surviving the filter, pre-aggregation


# ---------------------------------------------------------------------------
# data pipeline


@dataclass
class _Datum:
    key: str
    values: dict      # field name -> raw value
    series: str
    members: int = 1  # source rows behind this datum (1 unless aggregated)


def _filtered_rows(spec: VisSpec):
    rows = [(datum_key(spec.dataset, r), r) for r in spec.dataset.rows]
    t = spec.transform
    if t is not None and t.filterField and t.filterTopK:
        rows.sort(key=lambda kr: (-_as_number(kr[1].get(t.filterField, 0)), kr[0]))
        rows = rows[: t.filterTopK]
    return rows


def _as_number(v):
    return v if isinstance(v, (int, float)) and not isinstance(v, bool) else 0


def _series_field(layer: MarkLayer) -> Optional[str]:
    for ch in ("color", "detail", "shape"):
        e = layer.encoding(ch)
        if e is not None and e.type in ("nominal", "ordinal"):
            return e.field
    return None


def _bin_start(value: float, width: float) -> float:
    return math.floor(value / width) * width


def _numeric(spec: VisSpec, enc: EncodingDef, raw):
    if enc.type == "temporal":
        # binned groups carry epoch-ms midpoints instead of ISO strings
        if isinstance(raw, (int, float)) and not isinstance(raw, bool):
            return float(raw)
        return iso_to_ms(raw)
    if enc.type == "quantitative":
        return _as_number(raw)
    return raw


def _layer_data(spec: VisSpec, layer: MarkLayer, rows) -> list:
    """Datums for one layer: aggregation collapses rows into groups."""
    series_field = _series_field(layer)
    agg = [e for e in layer.encodings if e.aggregate != "none"]
    if not agg:
        out = []
        for key, r in rows:
            out.append(_Datum(
                key=key, values=dict(r),
                series=str(r.get(series_field, "")) if series_field else "",
            ))
        return out

    group_encs = [e for e in layer.encodings if e.aggregate == "none"]
    groups = {}
    order = []
    for key, r in rows:
        gid_parts = []
        gvals = {}
        for e in group_encs:
            v = r.get(e.field)
            if e.bin is not None and e.type in ("quantitative", "temporal"):
                num = _numeric(spec, e, v)
                start = _bin_start(num, e.bin)
                gid_parts.append(f"{e.field}~{start!r}")
                gvals[e.field] = start + e.bin / 2
                gvals["__bin__" + e.field] = start
            else:
                gid_parts.append(f"{e.field}={v!r}")
                gvals[e.field] = v
        gid = "|".join(gid_parts)
        if gid not in groups:
            groups[gid] = {"values": gvals, "rows": []}
            order.append(gid)
        groups[gid]["rows"].append(r)

    import hashlib
    out = []
    for gid in sorted(order):
        g = groups[gid]
        values = dict(g["values"])
        for e in agg:
            members = [_as_number(r.get(e.field)) for r in g["rows"]]
            if e.aggregate == "count":
                values[e.field] = len(g["rows"])
            elif e.aggregate == "sum":
                values[e.field] = sum(members)
            else:
                values[e.field] = sum(members) / len(members)
        key = "g" + hashlib.sha1(gid.encode("utf-8")).hexdigest()[:10]
        out.append(_Datum(
            key=key, values=values,
            series=str(values.get(series_field, "")) if series_field else "",
            members=len(g["rows"]),
        ))
    return out


# ---------------------------------------------------------------------------
# scales


class _Scale:
    """Maps data values to [0, length] along one axis."""

    def __init__(self, kind: str, domain, bin_width: Optional[float] = None):
        self.kind = kind            # "linear" | "band"
        self.domain = domain        # (lo, hi) or ordered category list
        self.bin_width = bin_width
        if kind == "band":
            self._index = {self._ckey(v): i for i, v in enumerate(domain)}

    @staticmethod
    def _ckey(v):
        return str(v)

    def pos(self, v, length: float) -> float:
        if self.kind == "band":
            i = self._index.get(self._ckey(v))
            if i is None:
                return length / 2
            band = length / max(1, len(self.domain))
            return (i + 0.5) * band
        lo, hi = self.domain
        if hi <= lo:
            return length / 2
        return (v - lo) / (hi - lo) * length

    def band(self, length: float) -> float:
        if self.kind == "band":
            return length / max(1, len(self.domain))
        if self.bin_width is not None:
            lo, hi = self.domain
            if hi > lo:
                return self.bin_width / (hi - lo) * length
        return 0.0

    def span(self, v, length: float):
        """Pixel interval of the bin/band containing ``v`` (for rect marks)."""
        if self.kind == "band":
            band = length / max(1, len(self.domain))
            center = self.pos(v, length)
            return center - band / 2, center + band / 2
        if self.bin_width is not None:
            start = _bin_start(v, self.bin_width)
            return self.pos(start, length), self.pos(start + self.bin_width, length)
        center = self.pos(v, length)
        return center - 2, center + 2


def _collect_channel(spec: VisSpec, layer_datums, channel: str):
    """(encoding, numeric values across layers) for a positional channel."""
    enc = spec.encoding(channel)
    if enc is None:
        return None, []
    vals = []
    for layer, datums in layer_datums:
        e = layer.encoding(channel)
        if e is None:
            continue
        for d in datums:
            raw = d.values.get(e.field)
            if raw is None:
                continue
            vals.append(_numeric(spec, e, raw))
    return enc, vals


def _zero_based(spec: VisSpec, channel: str) -> bool:
    for layer in spec.layers:
        if layer.markType in ("bar", "area") and layer.encoding(channel) is not None:
            e = layer.encoding(channel)
            if e.type == "quantitative":
                return True
    return False


def _make_scale(spec: VisSpec, layer_datums, channel: str) -> Optional[_Scale]:
    enc, vals = _collect_channel(spec, layer_datums, channel)
    if enc is None:
        return None
    if enc.type in ("nominal", "ordinal") and enc.bin is None:
        cats = spec.dataset.distinct(enc.field)
        return _Scale("band", cats)
    if enc.scaleHints and enc.scaleHints.domain and len(enc.scaleHints.domain) == 2:
        lo, hi = enc.scaleHints.domain
        if enc.type == "temporal":
            lo, hi = iso_to_ms(lo), iso_to_ms(hi)
        return _Scale("linear", (lo, hi), bin_width=enc.bin)
    numbers = [v for v in vals if isinstance(v, (int, float))]
    if not numbers:
        return _Scale("linear", (0.0, 1.0))
    lo, hi = min(numbers), max(numbers)
    if enc.bin is not None:
        lo = _bin_start(lo, enc.bin)
        hi = _bin_start(hi, enc.bin) + enc.bin
    elif _zero_based(spec, channel):
        lo, hi = min(0, lo), max(0, hi)
    if hi <= lo:
        lo, hi = lo - 1, hi + 1
    return _Scale("linear", (lo, hi), bin_width=enc.bin)


# ---------------------------------------------------------------------------
# text helpers


def text_width(text: str, font: float) -> float:
    return len(text) * CHAR_W * font

def wrap_text(text: str, width: float, font: float) -> list:
    """Greedy word wrap: keep adding words while the line fits."""
    words = text.split()
    if not words:
        return []
    lines = []
    current = words[0]
    for w in words[1:]:
        candidate = current + " " + w
        if text_width(candidate, font) <= width:
            current = candidate
        else:
            lines.append(current)
            current = w
    lines.append(current)
    return lines


def _format_si(v: float, digits: int = 2) -> str:
    if v == 0:
        return "0"
    suffixes = [(1e9, "G"), (1e6, "M"), (1e3, "k")]
    a = abs(v)
    for scale, suffix in suffixes:
        if a >= scale:
            return f"{v / scale:.{digits}g}{suffix}"
    return f"{v:.{digits}g}"


def format_value(v, fmt: str, temporal: bool) -> str:
    if temporal:
        from datetime import datetime, timezone
        dt = datetime.fromtimestamp(v / 1000.0, tz=timezone.utc)
        if fmt.startswith("%"):
            return dt.strftime(fmt)
        return dt.date().isoformat()
    if fmt == ".2s":
        return _format_si(v)
    if fmt:
        try:
            return format(v, fmt)
        except (ValueError, TypeError):
            return str(v)
    if isinstance(v, float):
        return f"{v:g}"
    return str(v)


def _tick_values(scale: _Scale, axis: AxisDef, temporal: bool):
    if scale.kind == "band":
        return list(scale.domain), False
    lo, hi = scale.domain
    n = max(2, axis.tickCount)
    return [lo + i * (hi - lo) / (n - 1) for i in range(n)], temporal


def _tick_labels(spec: VisSpec, scale: _Scale, channel: str) -> list:
    enc = spec.encoding(channel)
    axis = spec.axes.get(channel, AxisDef())
    temporal = enc is not None and enc.type == "temporal"
    values, is_temporal = _tick_values(scale, axis, temporal)
    return [format_value(v, axis.labelFormat, is_temporal) for v in values]


# ---------------------------------------------------------------------------
# margins


def _legend_channels(spec: VisSpec) -> list:
    out = []
    for ch in sorted(spec.legends):
        legend = spec.legends[ch]
        if legend.visible and spec.encoding(ch) is not None:
            out.append(ch)
    return out


def _legend_entries(spec: VisSpec, channel: str) -> list:
    enc = spec.encoding(channel)
    if enc is None:
        return []
    if enc.type in ("nominal", "ordinal"):
        vals = spec.dataset.distinct(enc.field)[:LEGEND_ENTRY_CAP]
        return [str(v) for v in vals]
    nums = [_as_number(r.get(enc.field)) for r in spec.dataset.rows]
    if not nums:
        return []
    lo, hi = min(nums), max(nums)
    return [format_value(lo + i * (hi - lo) / 3, "", False) for i in range(4)]


def _axis_on(spec: VisSpec, channel: str) -> Optional[AxisDef]:
    if spec.encoding(channel) is None:
        return None
    axis = spec.axes.get(channel, AxisDef())
    return axis if axis.visible else None


def _margins(spec: VisSpec, scales: dict):
    fs = spec.fontScale
    top = PAD
    bottom = PAD
    left = PAD
    right = PAD

    if spec.title.text and spec.title.placement == "external":
        top += TITLE_FONT * fs * LINE_H + 4

    legend_pos = {}
    for ch in _legend_channels(spec):
        legend_pos.setdefault(spec.legends[ch].position, []).append(ch)
    if "top" in legend_pos:
        top += LEGEND_FONT * fs * LINE_H + LEGEND_PAD
    if "bottom" in legend_pos:
        bottom += LEGEND_FONT * fs * LINE_H + LEGEND_PAD
    for ch in legend_pos.get("right", []):
        entries = _legend_entries(spec, ch)
        widest = max([text_width(e, LEGEND_FONT * fs) for e in entries] + [0])
        enc = spec.encoding(ch)
        widest = max(widest, text_width(enc.field if enc else "", LEGEND_FONT * fs))
        right += widest + 14 + LEGEND_PAD

    x_axis = _axis_on(spec, "x")
    if x_axis is not None:
        if x_axis.labelVisible:
            bottom += TICK_FONT * fs * LINE_H + TICK_PAD
        bottom += AXIS_FONT * fs * LINE_H
    y_axis = _axis_on(spec, "y")
    if y_axis is not None:
        if y_axis.labelVisible and scales.get("y") is not None:
            labels = _tick_labels(spec, scales["y"], "y")
            widest = max([text_width(t, TICK_FONT * fs) for t in labels] + [0])
            left += widest + TICK_PAD
        left += AXIS_FONT * fs * LINE_H

    return top, right, bottom, left, legend_pos


# ---------------------------------------------------------------------------
# the estimator


def estimate_geometry(spec: VisSpec) -> GeometryEstimate:
    return layout_detail(spec).geom


def layout_detail(spec: VisSpec) -> LayoutDetail:
    rows = _filtered_rows(spec)
    if not rows:
        raise EmptyDataError("no rows survive the data pipeline")

    layer_datums = [(layer, _layer_data(spec, layer, rows)) for layer in spec.layers]
    scales = {ch: _make_scale(spec, layer_datums, ch) for ch in ("x", "y")}

    top, right, bottom, left, legend_pos = _margins(spec, scales)
    chart = Rect(left, top, max(1.0, spec.width - left - right),
                 max(1.0, spec.height - top - bottom))

    glyphs = []
    glyph_layer = []
    positions = {}
    series_map = {}
    value_channel = None
    for ch in ("y", "x"):
        enc = spec.encoding(ch)
        if enc is not None and enc.type == "quantitative":
            value_channel = ch
            break

    cells = _facet_cells(spec, chart)
    facet_field = spec.facet.field if spec.facet else None

    for li, (layer, datums) in enumerate(layer_datums):
        for cell_value, cell in cells:
            if facet_field is None:
                members = datums
            else:
                members = [d for d in datums
                           if str(d.values.get(facet_field)) == str(cell_value)]
            emitted = _emit_layer(spec, layer, members, scales, cell,
                                  positions, series_map, value_channel)
            glyphs.extend(emitted)
            glyph_layer.extend([li] * len(emitted))

    boxes = _text_boxes(spec, scales, chart, cells, legend_pos, glyphs, positions)

    geom = GeometryEstimate(chartArea=chart, glyphs=glyphs, textBoxes=boxes)
    overflow = []
    canvas = Rect(0, 0, spec.width, spec.height)
    for item in list(glyphs) + list(boxes):
        b = item.bbox
        if b.x < canvas.x - 0.01 or b.y < canvas.y - 0.01 \
                or b.x2 > canvas.x2 + 0.01 or b.y2 > canvas.y2 + 0.01:
            overflow.append(item)
    series = {k: v for k, v in sorted(series_map.items())}
    return LayoutDetail(
        geom=geom, positions=positions, value_channel=value_channel,
        series=series, glyph_layer=glyph_layer, overflow=overflow,
        source_count=len(rows),
    )


def _facet_cells(spec: VisSpec, chart: Rect) -> list:
    if spec.facet is None:
        return [(None, chart)]
    values = spec.dataset.distinct(spec.facet.field)
    n = max(1, len(values))
    per_row = max(1, spec.facet.maxPerRow)
    if spec.facet.direction == "columns":
        ncols = min(per_row, n)
        nrows = math.ceil(n / ncols)
    else:
        nrows = min(per_row, n)
        ncols = math.ceil(n / nrows)
    cw = (chart.w - (ncols - 1) * FACET_GAP) / ncols
    chh = (chart.h - (nrows - 1) * FACET_GAP) / nrows
    cells = []
    for i, v in enumerate(values):
        if spec.facet.direction == "columns":
            r, c = divmod(i, ncols)
        else:
            c, r = divmod(i, nrows)
        x = chart.x + c * (cw + FACET_GAP)
        y = chart.y + r * (chh + FACET_GAP)
        cells.append((v, Rect(x, y + FACET_LABEL_H, cw, max(1.0, chh - FACET_LABEL_H))))
    return cells


def _sorted_for_path(datums, layer, spec, scales, cell):
    """Datums in drawing order along x (band index or numeric value)."""
    enc = layer.encoding("x")

    def sort_key(d):
        if enc is None:
            return (0, d.key)
        raw = d.values.get(enc.field)
        if raw is None:
            return (0, d.key)
        v = _numeric(spec, enc, raw)
        if isinstance(v, (int, float)):
            return (v, d.key)
        sc = scales.get("x")
        if sc is not None and sc.kind == "band":
            return (sc.pos(v, cell.w), d.key)
        return (0, d.key)

    return sorted(datums, key=sort_key)


def _datum_xy(spec, layer, d, scales, cell):
    out = {}
    for ch in ("x", "y"):
        enc = layer.encoding(ch)
        sc = scales.get(ch)
        if enc is None or sc is None:
            out[ch] = None
            continue
        raw = d.values.get(enc.field)
        if raw is None:
            out[ch] = None
            continue
        v = _numeric(spec, enc, raw)
        length = cell.w if ch == "x" else cell.h
        p = sc.pos(v, length)
        out[ch] = cell.x + p if ch == "x" else cell.y + cell.h - p
    return out


def _record_position(positions, d, cx, cy, value_px):
    positions[d.key] = {"x": cx, "y": cy, "value": value_px}


def _emit_layer(spec, layer, datums, scales, cell, positions, series_map,
                value_channel) -> list:
    mk = layer.markType
    if mk == "arc":
        return _emit_arcs(spec, layer, datums, cell, positions)

    glyphs = []
    ordered = _sorted_for_path(datums, layer, spec, scales, cell)
    if mk in ("line", "area"):
        by_series = {}
        for d in ordered:
            by_series.setdefault(d.series, []).append(d)
        for skey in sorted(by_series):
            run = by_series[skey]
            series_map.setdefault(skey, [])
            if mk == "line":
                glyphs.extend(_emit_line_run(spec, layer, run, scales, cell,
                                             positions, value_channel))
            else:
                glyphs.extend(_emit_area_run(spec, layer, run, scales, cell,
                                             positions, value_channel))
            series_map[skey].extend(d.key for d in run)
        return glyphs

    for d in ordered:
        xy = _datum_xy(spec, layer, d, scales, cell)
        g = None
        if mk == "bar":
            g = _bar_glyph(spec, layer, d, xy, scales, cell)
        elif mk == "rect":
            g = _rect_glyph(spec, layer, d, xy, scales, cell)
        elif mk == "text":
            g = _text_glyph(spec, layer, d, xy, cell)
        else:
            g = _point_glyph(spec, layer, d, xy, cell)
        if g is None:
            continue
        g.seriesKey = d.series
        glyphs.append(g)
        series_map.setdefault(d.series, []).append(d.key)
        value_px = _value_pixel(xy, value_channel)
        _record_position(positions, d, g.bbox.cx, g.bbox.cy, value_px)
    return glyphs


def _value_pixel(xy, value_channel):
    if value_channel is None:
        return None
    return xy.get(value_channel)


def _bar_glyph(spec, layer, d, xy, scales, cell):
    x_enc, y_enc = layer.encoding("x"), layer.encoding("y")
    horizontal = (x_enc is not None and x_enc.type == "quantitative"
                  and y_enc is not None and y_enc.type != "quantitative")
    if horizontal:
        base = cell.x + scales["x"].pos(0, cell.w)
        vx = xy["x"] if xy["x"] is not None else base
        band = scales["y"].band(cell.h) * BAR_FRACTION if scales.get("y") else cell.h
        cy = xy["y"] if xy["y"] is not None else cell.cy
        x0, x1 = min(base, vx), max(base, vx)
        return Glyph(d.key, "rect", Rect(x0, cy - band / 2, max(1.0, x1 - x0), band))
    base = cell.y + cell.h - (scales["y"].pos(0, cell.h) if scales.get("y") else 0)
    vy = xy["y"] if xy["y"] is not None else base
    if scales.get("x") is not None and (scales["x"].kind == "band" or scales["x"].bin_width):
        band = scales["x"].band(cell.w) * BAR_FRACTION
    else:
        band = max(2.0, cell.w / max(1, len(spec.dataset.rows)) * 0.6)
    cx = xy["x"] if xy["x"] is not None else cell.cx
    y0, y1 = min(base, vy), max(base, vy)
    return Glyph(d.key, "rect", Rect(cx - band / 2, y0, band, max(1.0, y1 - y0)))


def _rect_glyph(spec, layer, d, xy, scales, cell):
    x_enc, y_enc = layer.encoding("x"), layer.encoding("y")
    if x_enc is not None and scales.get("x") is not None:
        raw = d.values.get(x_enc.field)
        v = _numeric(spec, x_enc, raw) if raw is not None else None
        if v is None:
            x0, x1 = cell.x, cell.x2
        else:
            bin_field = "__bin__" + x_enc.field
            if bin_field in d.values:
                v = d.values[bin_field]
                s0, s1 = scales["x"].pos(v, cell.w), scales["x"].pos(v + x_enc.bin, cell.w)
            else:
                s0, s1 = scales["x"].span(v, cell.w)
            x0, x1 = cell.x + min(s0, s1), cell.x + max(s0, s1)
    else:
        x0, x1 = cell.x, cell.x2
    if y_enc is not None and scales.get("y") is not None:
        raw = d.values.get(y_enc.field)
        v = _numeric(spec, y_enc, raw) if raw is not None else None
        if v is None:
            y0, y1 = cell.y, cell.y2
        else:
            bin_field = "__bin__" + y_enc.field
            if bin_field in d.values:
                v = d.values[bin_field]
                s0, s1 = scales["y"].pos(v, cell.h), scales["y"].pos(v + y_enc.bin, cell.h)
            else:
                s0, s1 = scales["y"].span(v, cell.h)
            y0 = cell.y + cell.h - max(s0, s1)
            y1 = cell.y + cell.h - min(s0, s1)
    else:
        y0, y1 = cell.y, cell.y2
    return Glyph(d.key, "rect", Rect(x0, y0, max(1.0, x1 - x0), max(1.0, y1 - y0)))


def _point_glyph(spec, layer, d, xy, cell):
    side = POINT_SIDE
    size_enc = layer.encoding("size")
    if size_enc is not None and size_enc.type == "quantitative":
        nums = [_as_number(r.get(size_enc.field)) for r in spec.dataset.rows]
        if nums and max(nums) > min(nums):
            v = _as_number(d.values.get(size_enc.field))
            side = 3 + 9 * (v - min(nums)) / (max(nums) - min(nums))
    cx = xy["x"] if xy["x"] is not None else cell.cx
    cy = xy["y"] if xy["y"] is not None else cell.cy
    return Glyph(d.key, "point", Rect(cx - side / 2, cy - side / 2, side, side))


def _text_glyph(spec, layer, d, xy, cell):
    label_enc = layer.encoding("detail") or layer.encoding("color") or layer.encoding("y")
    label = str(d.values.get(label_enc.field, "")) if label_enc else ""
    w = max(4.0, text_width(label, ANNOT_FONT * spec.fontScale))
    h = ANNOT_FONT * spec.fontScale * LINE_H
    cx = xy["x"] if xy["x"] is not None else cell.cx
    cy = xy["y"] if xy["y"] is not None else cell.cy
    return Glyph(d.key, "rect", Rect(cx - w / 2, cy - h / 2, w, h))


def _emit_line_run(spec, layer, run, scales, cell, positions, value_channel):
    stroke = max(layer.style.strokeWidth, 5.0 if layer.style.pointOnLine else 0.0)
    stroke = max(1.0, stroke)
    glyphs = []
    prev = None
    for d in run:
        xy = _datum_xy(spec, layer, d, scales, cell)
        cx = xy["x"] if xy["x"] is not None else cell.cx
        cy = xy["y"] if xy["y"] is not None else cell.cy
        _record_position(positions, d, cx, cy, _value_pixel(xy, value_channel))
        if prev is None:
            side = max(stroke, 3.0)
            glyphs.append(Glyph(d.key, "point",
                                Rect(cx - side / 2, cy - side / 2, side, side),
                                seriesKey=d.series))
        else:
            px, py = prev
            x0, y0 = min(px, cx), min(py, cy)
            glyphs.append(Glyph(
                d.key, "segment",
                Rect(x0 - stroke / 2, y0 - stroke / 2,
                     abs(cx - px) + stroke, abs(cy - py) + stroke),
                seriesKey=d.series,
                path=((px, py), (cx, cy)),
            ))
        prev = (cx, cy)
    return glyphs


def _emit_area_run(spec, layer, run, scales, cell, positions, value_channel):
    baseline = cell.y + cell.h - (scales["y"].pos(0, cell.h) if scales.get("y") else 0)
    xs = []
    for d in run:
        xy = _datum_xy(spec, layer, d, scales, cell)
        xs.append((d, xy))
    glyphs = []
    for i, (d, xy) in enumerate(xs):
        cx = xy["x"] if xy["x"] is not None else cell.cx
        cy = xy["y"] if xy["y"] is not None else cell.cy
        left = xs[i - 1][1]["x"] if i > 0 and xs[i - 1][1]["x"] is not None else cx
        right = xs[i + 1][1]["x"] if i < len(xs) - 1 and xs[i + 1][1]["x"] is not None else cx
        x0 = (left + cx) / 2
        x1 = (cx + right) / 2
        y0, y1 = min(cy, baseline), max(cy, baseline)
        glyphs.append(Glyph(d.key, "rect",
                            Rect(x0, y0, max(1.0, x1 - x0), max(1.0, y1 - y0)),
                            seriesKey=d.series))
        _record_position(positions, d, cx, cy, _value_pixel(xy, value_channel))
    return glyphs


def _emit_arcs(spec, layer, datums, cell, positions):
    size_enc = layer.encoding("size")
    cat_enc = layer.encoding("color")
    cx, cy = cell.cx, cell.cy
    radius = min(cell.w, cell.h) / 2 * 0.8
    if size_enc is None:
        shares = [(d, 1.0) for d in datums]
    else:
        shares = [(d, abs(_as_number(d.values.get(size_enc.field)))) for d in datums]
    shares.sort(key=lambda dv: (str(dv[0].values.get(cat_enc.field)) if cat_enc else "",
                                dv[0].key))
    total = sum(v for _, v in shares) or 1.0
    glyphs = []
    angle = -math.pi / 2
    for d, v in shares:
        sweep = v / total * 2 * math.pi
        bbox = _wedge_bbox(cx, cy, radius, angle, angle + sweep)
        g = Glyph(d.key, "arcWedge", bbox, seriesKey=d.series,
                  path=((cx, cy), (radius, angle, angle + sweep)))
        glyphs.append(g)
        mid = angle + sweep / 2
        px = cx + math.cos(mid) * radius / 2
        py = cy + math.sin(mid) * radius / 2
        _record_position(positions, d, px, py, None)
        angle += sweep
    return glyphs


def _wedge_bbox(cx, cy, r, a0, a1) -> Rect:
    pts = [(cx, cy)]
    steps = 16
    for i in range(steps + 1):
        a = a0 + (a1 - a0) * i / steps
        pts.append((cx + math.cos(a) * r, cy + math.sin(a) * r))
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return Rect(min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))


# ---------------------------------------------------------------------------
# text boxes


def _text_boxes(spec, scales, chart, cells, legend_pos, glyphs, positions) -> list:
    fs = spec.fontScale
    boxes = []

    if spec.title.text:
        w = text_width(spec.title.text, TITLE_FONT * fs)
        h = TITLE_FONT * fs * LINE_H
        if spec.title.placement == "external":
            boxes.append(TextBox("title", Rect(max(0.0, spec.width / 2 - w / 2), PAD, w, h),
                                 spec.title.text))
        else:
            boxes.append(TextBox("title", Rect(chart.x + 6, chart.y + 4, w, h),
                                 spec.title.text))

    x_axis = _axis_on(spec, "x")
    if x_axis is not None and scales.get("x") is not None:
        labels = _tick_labels(spec, scales["x"], "x")
        values, _ = _tick_values(scales["x"], spec.axes.get("x", AxisDef()),
                                 False)
        if x_axis.labelVisible:
            y = chart.y2 + TICK_PAD
            for label, v in zip(labels, values):
                lw = text_width(label, TICK_FONT * fs)
                lh = TICK_FONT * fs * LINE_H
                p = chart.x + scales["x"].pos(v, chart.w)
                if x_axis.labelAngle:
                    lw, lh = lh, lw
                boxes.append(TextBox("tickLabel",
                                     Rect(p - lw / 2, y, max(2.0, lw), lh), label))
        enc = spec.encoding("x")
        if enc is not None:
            nw = text_width(enc.field, AXIS_FONT * fs)
            ny = chart.y2 + TICK_PAD \
                + (TICK_FONT * fs * LINE_H if x_axis.labelVisible else 0)
            boxes.append(TextBox("axisLabel",
                                 Rect(chart.cx - nw / 2, ny, nw, AXIS_FONT * fs * LINE_H),
                                 enc.field))

    y_axis = _axis_on(spec, "y")
    if y_axis is not None and scales.get("y") is not None:
        labels = _tick_labels(spec, scales["y"], "y")
        values, _ = _tick_values(scales["y"], spec.axes.get("y", AxisDef()), False)
        if y_axis.labelVisible:
            for label, v in zip(labels, values):
                lw = text_width(label, TICK_FONT * fs)
                lh = TICK_FONT * fs * LINE_H
                p = chart.y + chart.h - scales["y"].pos(v, chart.h)
                boxes.append(TextBox("tickLabel",
                                     Rect(chart.x - TICK_PAD - lw, p - lh / 2,
                                          max(2.0, lw), lh), label))
        enc = spec.encoding("y")
        if enc is not None:
            nh = text_width(enc.field, AXIS_FONT * fs)
            boxes.append(TextBox("axisLabel",
                                 Rect(PAD, chart.cy - nh / 2,
                                      AXIS_FONT * fs * LINE_H, nh), enc.field))

    if spec.facet is not None:
        for value, cell in cells:
            label = str(value)
            lw = text_width(label, TICK_FONT * fs)
            boxes.append(TextBox("tickLabel",
                                 Rect(cell.x, cell.y - FACET_LABEL_H, lw,
                                      TICK_FONT * fs * LINE_H), label))

    for ch in _legend_channels(spec):
        legend = spec.legends[ch]
        enc = spec.encoding(ch)
        entries = _legend_entries(spec, ch)
        row_h = LEGEND_FONT * fs * LINE_H
        if legend.position == "right":
            widest = max([text_width(e, LEGEND_FONT * fs) for e in entries] + [0])
            widest = max(widest, text_width(enc.field, LEGEND_FONT * fs))
            x = chart.x2 + LEGEND_PAD
            boxes.append(TextBox("legend",
                                 Rect(x, chart.y, widest + 14,
                                      row_h * (1 + len(entries))), enc.field))
        else:
            y = PAD if legend.position == "top" else spec.height - PAD - row_h
            total_w = sum(text_width(e, LEGEND_FONT * fs) + 20 for e in entries)
            total_w = max(total_w, text_width(enc.field, LEGEND_FONT * fs))
            boxes.append(TextBox("legend", Rect(chart.x, y, total_w, row_h), enc.field))

    out_idx = 0
    for a in spec.annotations:
        font = ANNOT_FONT * fs
        if a.placement == "outOfChart":
            lines = wrap_text(a.text, chart.w, font)
            h = max(1, len(lines)) * font * LINE_H
            x_axis_band = spec.height - chart.y2  # everything below the chart
            y = chart.y2 + x_axis_band + out_idx * (h + 4)
            boxes.append(TextBox("annotation", Rect(chart.x, y, chart.w, h), a.text))
            out_idx += 1
            continue
        anchor = _anchor_point(a, chart, positions)
        lines = wrap_text(a.text, a.width, font)
        h = max(1, len(lines)) * font * LINE_H
        boxes.append(TextBox("annotation",
                             Rect(anchor[0] + a.dx, anchor[1] + a.dy, a.width, h),
                             a.text))
    return boxes


def _anchor_point(a: Annotation, chart: Rect, positions: dict):
    if a.anchorKey is not None:
        p = positions.get(a.anchorKey)
        if p is not None:
            return (p["x"], p["y"])
        return (chart.cx, chart.cy)
    return (a.anchorX if a.anchorX is not None else chart.cx,
            a.anchorY if a.anchorY is not None else chart.cy)


def annotation_anchor_distance(spec: VisSpec, annotation_id: str) -> Optional[float]:
    """Distance in px between an annotation's box and its anchor point.

    None when the annotation is missing, absolutely placed, or out of chart.
    """
    a = spec.annotation(annotation_id)
    if a is None or a.anchorKey is None or a.placement != "inChart":
        return None
    detail = layout_detail(spec)
    p = detail.positions.get(a.anchorKey)
    if p is None:
        return None
    for box in detail.geom.textBoxes:
        if box.role == "annotation" and box.content == a.text:
            dx = max(box.bbox.x - p["x"], p["x"] - box.bbox.x2, 0)
            dy = max(box.bbox.y - p["y"], p["y"] - box.bbox.y2, 0)
            return math.hypot(dx, dy)
    return None


__all__ = [
    "Rect", "Glyph", "TextBox", "GeometryEstimate", "LayoutDetail",
    "estimate_geometry", "layout_detail", "wrap_text", "text_width",
    "format_value", "annotation_anchor_distance",
    "GLYPH_SHAPES", "TEXT_ROLES", "PAD",
]
