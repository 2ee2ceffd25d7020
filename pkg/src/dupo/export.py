"""Static export: one self-contained HTML page switching artboards by width.

Breakpoints sit at the midpoints between the sorted device screen widths,
so the artboards partition (0, infinity) exactly; the generated CSS uses
range syntax (`width < Npx`, `Npx <= width < Mpx`, `width >= Npx`).
Rendering is deterministic: same session state, same bytes.
"""

from __future__ import annotations

import math
from typing import Optional

from .errors import ExportError
from .geometry import ANNOT_FONT, AXIS_FONT, LEGEND_FONT, TICK_FONT, TITLE_FONT, LINE_H, layout_detail, wrap_text
from .visspec import DeviceProfile, VisSpec

SERIES_PALETTE = (
    "#4c78a8", "#f58518", "#e45756", "#72b7b2", "#54a24b",
    "#eeca3b", "#b279a2", "#ff9da6", "#9d755d", "#bab0ac",
)

_ROLE_FONTS = {
    "title": TITLE_FONT,
    "axisLabel": AXIS_FONT,
    "tickLabel": TICK_FONT,
    "annotation": ANNOT_FONT,
    "legend": LEGEND_FONT,
}


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _css_number(v: float) -> str:
    return f"{v:g}"


def compute_breakpoints(pairs: list) -> list:
    """[(device, spec)] -> ordered windows keyed by device screen width."""
    if not pairs:
        raise ExportError("nothing to export")
    widths = [p[0].screenWidth for p in pairs]
    if len(set(widths)) != len(widths):
        raise ExportError("duplicate device widths; breakpoints would collide")
    ordered = sorted(pairs, key=lambda p: p[0].screenWidth)
    bounds = []
    for a, b in zip(ordered, ordered[1:]):
        bounds.append((a[0].screenWidth + b[0].screenWidth) / 2)
    out = []
    for i, (device, _spec) in enumerate(ordered):
        out.append({
            "device": device.name,
            "minWidth": bounds[i - 1] if i > 0 else None,
            "maxWidth": bounds[i] if i < len(bounds) else None,
        })
    return out


def media_query(bp: dict) -> Optional[str]:
    lo, hi = bp["minWidth"], bp["maxWidth"]
    if lo is None and hi is None:
        return None
    if lo is None:
        return f"@media (width < {_css_number(hi)}px)"
    if hi is None:
        return f"@media (width >= {_css_number(lo)}px)"
    return f"@media ({_css_number(lo)}px <= width < {_css_number(hi)}px)"


# ---------------------------------------------------------------------------
# SVG


def _series_colors(detail) -> dict:
    keys = [k for k in sorted(detail.series) if k != ""]
    return {k: SERIES_PALETTE[i % len(SERIES_PALETTE)] for i, k in enumerate(keys)}


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def render_svg(spec: VisSpec) -> str:
    detail = layout_detail(spec)
    geom = detail.geom
    colors = _series_colors(detail)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(spec.width)}" '
        f'height="{_fmt(spec.height)}" viewBox="0 0 {_fmt(spec.width)} '
        f'{_fmt(spec.height)}" font-family="sans-serif">',
        f'<rect x="0" y="0" width="{_fmt(spec.width)}" height="{_fmt(spec.height)}" '
        f'fill="#ffffff"/>',
        f'<rect x="{_fmt(geom.chartArea.x)}" y="{_fmt(geom.chartArea.y)}" '
        f'width="{_fmt(geom.chartArea.w)}" height="{_fmt(geom.chartArea.h)}" '
        f'fill="none" stroke="#dddddd"/>',
    ]
    for g, li in zip(geom.glyphs, detail.glyph_layer):
        layer = spec.layers[li]
        fill = colors.get(g.seriesKey, layer.style.fill)
        opacity = layer.style.opacity
        if g.shape == "segment" and g.path is not None:
            (x1, y1), (x2, y2) = g.path
            parts.append(
                f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" '
                f'y2="{_fmt(y2)}" stroke="{fill}" '
                f'stroke-width="{_fmt(layer.style.strokeWidth)}" '
                f'stroke-opacity="{_fmt(opacity)}"/>')
        elif g.shape == "point":
            r = g.bbox.w / 2
            parts.append(
                f'<circle cx="{_fmt(g.bbox.cx)}" cy="{_fmt(g.bbox.cy)}" '
                f'r="{_fmt(r)}" fill="{fill}" fill-opacity="{_fmt(opacity)}"/>')
        elif g.shape == "arcWedge" and g.path is not None:
            (cx, cy), (radius, a0, a1) = g.path
            x0, y0 = cx + math.cos(a0) * radius, cy + math.sin(a0) * radius
            x1, y1 = cx + math.cos(a1) * radius, cy + math.sin(a1) * radius
            large = 1 if (a1 - a0) > math.pi else 0
            parts.append(
                f'<path d="M {_fmt(cx)} {_fmt(cy)} L {_fmt(x0)} {_fmt(y0)} '
                f'A {_fmt(radius)} {_fmt(radius)} 0 {large} 1 {_fmt(x1)} '
                f'{_fmt(y1)} Z" fill="{fill}" fill-opacity="{_fmt(opacity)}" '
                f'stroke="#ffffff"/>')
        else:
            parts.append(
                f'<rect x="{_fmt(g.bbox.x)}" y="{_fmt(g.bbox.y)}" '
                f'width="{_fmt(g.bbox.w)}" height="{_fmt(g.bbox.h)}" '
                f'fill="{fill}" fill-opacity="{_fmt(opacity)}"/>')
    fs = spec.fontScale
    for box in geom.textBoxes:
        font = _ROLE_FONTS.get(box.role, ANNOT_FONT) * fs
        if box.role == "annotation":
            lines = wrap_text(box.content, box.bbox.w, font)
            spans = []
            for i, line in enumerate(lines):
                y = box.bbox.y + (i + 1) * font * LINE_H
                spans.append(f'<tspan x="{_fmt(box.bbox.x)}" y="{_fmt(y)}">'
                             f'{_esc(line)}</tspan>')
            parts.append(f'<text font-size="{_fmt(font)}" fill="#333333">'
                         + "".join(spans) + "</text>")
        else:
            baseline = box.bbox.y + font
            parts.append(
                f'<text x="{_fmt(box.bbox.x)}" y="{_fmt(baseline)}" '
                f'font-size="{_fmt(font)}" fill="#333333">{_esc(box.content)}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


# ---------------------------------------------------------------------------
# HTML


def _slug(name: str) -> str:
    return "".join(c if c.isalnum() else "-" for c in name)


def export_html(pairs: list, page_title: str = "Responsive chart") -> str:
    breakpoints = compute_breakpoints(pairs)
    by_name = {device.name: spec for device, spec in pairs}
    css = [".artboard{display:none;margin:0 auto;}"]
    for bp in breakpoints:
        slug = _slug(bp["device"])
        query = media_query(bp)
        if query is None:
            css.append(f"#ab-{slug}{{display:block;}}")
        else:
            css.append(f"{query}{{#ab-{slug}{{display:block;}}}}")
    body = []
    for bp in breakpoints:
        slug = _slug(bp["device"])
        svg = render_svg(by_name[bp["device"]])
        body.append(f'<div id="ab-{slug}" class="artboard">\n{svg}\n</div>')
    return (
        "<!DOCTYPE html>\n<html>\n<head>\n"
        '<meta charset="utf-8">\n'
        '<meta name="viewport" content="width=device-width, initial-scale=1">\n'
        f"<title>{_esc(page_title)}</title>\n"
        "<style>\n" + "\n".join(css) + "\n</style>\n"
        "</head>\n<body>\n" + "\n".join(body) + "\n</body>\n</html>\n"
    )


def export_session(session) -> dict:
    # branches duplicate a device; the newest variant per width ships
    by_width = {}
    for ab in session.artboards.values():
        by_width[ab.device.screenWidth] = (ab.device, ab.spec)
    pairs = list(by_width.values())
    title = None
    for _, spec in pairs:
        if spec.title.text:
            title = spec.title.text
            break
    html = export_html(pairs, page_title=title or "Responsive chart")
    return {"html": html, "breakpoints": compute_breakpoints(pairs)}


__all__ = ["SERIES_PALETTE", "compute_breakpoints", "media_query",
           "render_svg", "export_html", "export_session"]
