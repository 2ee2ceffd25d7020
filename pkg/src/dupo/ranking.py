"""Scores how much a design variant loses relative to its source.

Six measures, each in [0, 1], combined as a normalized weighted sum:

* trend          change in per-series fitted slope angle
* identification fraction of identifiable units that disappeared
* comparison     pairwise value comparisons that became unreadable
* text           words of visible text that were dropped
* overplot       overdraw in the variant itself (not a delta)
* occupation     change in how much of the chart area carries ink

Rasters are binary per glyph, sampled at pixel centers on a 1 px grid over
the chart area; the 2 px debug dump groups those samples four to a cell.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import LayoutDetail, layout_detail
from .visspec import VisSpec

TAU_PX = 2.0          # minimum pixel gap for a value pair to read as different
PAIR_CAP = 1000
PAIR_SEED = 42

DEFAULT_WEIGHTS = {
    "trend": 0.30,
    "identification": 0.15,
    "comparison": 0.15,
    "text": 0.10,
    "overplot": 0.20,
    "occupation": 0.10,
}

MEASURE_NAMES = tuple(DEFAULT_WEIGHTS)


@dataclass
class MeasureBreakdown:
    trend: float
    identification: float
    comparison: float
    text: float
    overplot: float
    occupation: float
    combined: float

    def to_dict(self):
        return {name: round(getattr(self, name), 6)
                for name in MEASURE_NAMES + ("combined",)}


# ---------------------------------------------------------------------------
# rasterization


def _grid_shape(chart):
    cols = max(1, int(round(chart.w)))
    rows = max(1, int(round(chart.h)))
    return rows, cols


def _col_range(chart, cols, x0, x1):
    c0 = max(0, math.ceil(x0 - chart.x - 0.5))
    c1 = min(cols - 1, math.floor(x1 - chart.x - 0.5))
    return c0, c1


def _row_range(chart, rows, y0, y1):
    r0 = max(0, math.ceil(y0 - chart.y - 0.5))
    r1 = min(rows - 1, math.floor(y1 - chart.y - 0.5))
    return r0, r1


def _mark_rect(counts, chart, bbox):
    rows, cols = counts.shape
    c0, c1 = _col_range(chart, cols, bbox.x, bbox.x2)
    r0, r1 = _row_range(chart, rows, bbox.y, bbox.y2)
    if c1 < c0 or r1 < r0:
        return
    counts[r0:r1 + 1, c0:c1 + 1] += 1


def _mark_segment(counts, chart, glyph):
    (x1, y1), (x2, y2) = glyph.path
    half = max(0.5, min(x1, x2) - glyph.bbox.x)
    rows, cols = counts.shape
    c0, c1 = _col_range(chart, cols, glyph.bbox.x, glyph.bbox.x2)
    r0, r1 = _row_range(chart, rows, glyph.bbox.y, glyph.bbox.y2)
    if c1 < c0 or r1 < r0:
        return
    xs = chart.x + np.arange(c0, c1 + 1) + 0.5
    ys = chart.y + np.arange(r0, r1 + 1) + 0.5
    gx, gy = np.meshgrid(xs, ys)
    dx, dy = x2 - x1, y2 - y1
    denom = dx * dx + dy * dy
    if denom == 0:
        t = np.zeros_like(gx)
    else:
        t = np.clip(((gx - x1) * dx + (gy - y1) * dy) / denom, 0.0, 1.0)
    dist = np.hypot(gx - (x1 + t * dx), gy - (y1 + t * dy))
    counts[r0:r1 + 1, c0:c1 + 1] += (dist <= half).astype(counts.dtype)


def _mark_wedge(counts, chart, glyph):
    (cx, cy), (radius, a0, a1) = glyph.path
    rows, cols = counts.shape
    c0, c1 = _col_range(chart, cols, cx - radius, cx + radius)
    r0, r1 = _row_range(chart, rows, cy - radius, cy + radius)
    if c1 < c0 or r1 < r0:
        return
    xs = chart.x + np.arange(c0, c1 + 1) + 0.5
    ys = chart.y + np.arange(r0, r1 + 1) + 0.5
    gx, gy = np.meshgrid(xs, ys)
    dist = np.hypot(gx - cx, gy - cy)
    sweep = a1 - a0
    if sweep >= 2 * math.pi - 1e-9:
        inside = dist <= radius
    else:
        ang = np.arctan2(gy - cy, gx - cx)
        rel = np.mod(ang - a0, 2 * math.pi)
        inside = (dist <= radius) & (rel <= sweep)
    counts[r0:r1 + 1, c0:c1 + 1] += inside.astype(counts.dtype)


def rasterize_counts(detail: LayoutDetail) -> np.ndarray:
    """Per-pixel overdraw counts of the data glyphs inside the chart area."""
    chart = detail.geom.chartArea
    counts = np.zeros(_grid_shape(chart), dtype=np.int32)
    for g in detail.geom.glyphs:
        if g.shape == "segment" and g.path is not None:
            _mark_segment(counts, chart, g)
        elif g.shape == "arcWedge" and g.path is not None:
            _mark_wedge(counts, chart, g)
        else:
            _mark_rect(counts, chart, g.bbox)
    return counts


def _text_mask(detail: LayoutDetail) -> np.ndarray:
    chart = detail.geom.chartArea
    mask = np.zeros(_grid_shape(chart), dtype=np.int32)
    for box in detail.geom.textBoxes:
        _mark_rect(mask, chart, box.bbox)
    return mask > 0


def overplot_ratio(detail: LayoutDetail) -> float:
    counts = rasterize_counts(detail)
    covered = int((counts >= 1).sum())
    if covered == 0:
        return 0.0
    return float((counts >= 2).sum()) / covered


def occupation_ratio(detail: LayoutDetail) -> float:
    counts = rasterize_counts(detail)
    covered = (counts >= 1) | _text_mask(detail)
    return float(covered.sum()) / covered.size


def dump_coverage_pgm(detail: LayoutDetail, path: str, cell: int = 2) -> None:
    """Write overdraw as an ASCII PGM, one value per ``cell`` px square."""
    counts = rasterize_counts(detail)
    rows, cols = counts.shape
    crows, ccols = math.ceil(rows / cell), math.ceil(cols / cell)
    grid = np.zeros((crows, ccols), dtype=np.int32)
    for r in range(crows):
        for c in range(ccols):
            block = counts[r * cell:(r + 1) * cell, c * cell:(c + 1) * cell]
            grid[r, c] = int(block.max()) if block.size else 0
    peak = max(1, int(grid.max()))
    lines = [f"P2\n{ccols} {crows}\n255\n"]
    for r in range(crows):
        lines.append(" ".join(str(v * 255 // peak) for v in grid[r]) + "\n")
    with open(path, "w", encoding="ascii") as fh:
        fh.writelines(lines)


# ---------------------------------------------------------------------------
# measures


def identification_loss(src: LayoutDetail, tgt: LayoutDetail) -> float:
    units_src = len(src.positions)
    if units_src == 0:
        return 0.0
    units_tgt = len(tgt.positions)
    return max(0.0, 1.0 - units_tgt / units_src)


def _value_diff(detail: LayoutDetail, a: str, b: str) -> Optional[float]:
    pa = detail.positions.get(a)
    pb = detail.positions.get(b)
    if pa is None or pb is None:
        return None
    va, vb = pa.get("value"), pb.get("value")
    if va is None or vb is None:
        return None
    # y grows downward, so flip its sign to compare in value direction
    return (vb - va) if detail.value_channel == "y" else (va - vb)


def _sample_pairs(keys: list) -> list:
    n = len(keys)
    total = n * (n - 1) // 2
    if total <= PAIR_CAP:
        return [(keys[i], keys[j]) for i in range(n) for j in range(i + 1, n)]
    rng = random.Random(PAIR_SEED)
    seen = set()
    pairs = []
    while len(pairs) < PAIR_CAP:
        i = rng.randrange(n)
        j = rng.randrange(n)
        if i == j:
            continue
        key = (min(i, j), max(i, j))
        if key in seen:
            continue
        seen.add(key)
        pairs.append((keys[key[0]], keys[key[1]]))
    return pairs


def comparison_loss(src: LayoutDetail, tgt: LayoutDetail) -> float:
    keys = sorted(k for k, p in src.positions.items() if p.get("value") is not None)
    legible = []
    for a, b in _sample_pairs(keys):
        d = _value_diff(src, a, b)
        if d is not None and abs(d) >= TAU_PX:
            legible.append((a, b, d))
    if not legible:
        return 0.0
    lost = 0
    for a, b, d_src in legible:
        d_tgt = _value_diff(tgt, a, b)
        if d_tgt is None or abs(d_tgt) < TAU_PX:
            lost += 1
        elif d_src * d_tgt < 0:
            lost += 1
    return lost / len(legible)


def _series_slope(detail: LayoutDetail, series_key: str) -> Optional[float]:
    keys = detail.series.get(series_key, [])
    pts = [(detail.positions[k]["x"], -detail.positions[k]["y"])
           for k in keys if k in detail.positions]
    if len(pts) < 2:
        return None
    xs = np.array([p[0] for p in pts], dtype=float)
    ys = np.array([p[1] for p in pts], dtype=float)
    var = float(((xs - xs.mean()) ** 2).sum())
    if var == 0:
        return None
    cov = float(((xs - xs.mean()) * (ys - ys.mean())).sum())
    return cov / var


def trend_loss(src: LayoutDetail, tgt: LayoutDetail) -> float:
    common = sorted(set(src.series) & set(tgt.series))
    losses = []
    for skey in common:
        s_src = _series_slope(src, skey)
        s_tgt = _series_slope(tgt, skey)
        if s_src is None or s_tgt is None:
            continue
        losses.append(abs(math.atan(s_src) - math.atan(s_tgt)) / math.pi)
    if not losses:
        return 0.0
    return sum(losses) / len(losses)


def _word_bag(detail: LayoutDetail) -> Counter:
    bag = Counter()
    for box in detail.geom.textBoxes:
        for word in box.content.lower().split():
            bag[word] += 1
    return bag


def text_loss(src: LayoutDetail, tgt: LayoutDetail) -> float:
    src_bag = _word_bag(src)
    total = sum(src_bag.values())
    if total == 0:
        return 0.0
    kept = sum((src_bag & _word_bag(tgt)).values())
    return 1.0 - kept / total


def occupation_loss(src: LayoutDetail, tgt: LayoutDetail) -> float:
    return abs(occupation_ratio(tgt) - occupation_ratio(src))


def overplot_loss(src: LayoutDetail, tgt: LayoutDetail) -> float:
    return min(1.0, overplot_ratio(tgt))


def measure_pair(src: LayoutDetail, tgt: LayoutDetail,
                 weights: Optional[dict] = None) -> MeasureBreakdown:
    w = dict(DEFAULT_WEIGHTS)
    if weights:
        for k, v in weights.items():
            if k not in w:
                raise ValueError(f"unknown measure weight '{k}'")
            w[k] = float(v)
    total = sum(w.values())
    if total <= 0:
        raise ValueError("measure weights must sum to a positive value")
    values = {
        "trend": trend_loss(src, tgt),
        "identification": identification_loss(src, tgt),
        "comparison": comparison_loss(src, tgt),
        "text": text_loss(src, tgt),
        "overplot": overplot_loss(src, tgt),
        "occupation": occupation_loss(src, tgt),
    }
    combined = sum(w[k] * values[k] for k in values) / total
    return MeasureBreakdown(combined=combined, **values)


def score_pair(source: VisSpec, target: VisSpec,
               weights: Optional[dict] = None) -> MeasureBreakdown:
    return measure_pair(layout_detail(source), layout_detail(target), weights)


# ---------------------------------------------------------------------------
# selection


def drastic_quota(max_n: int, drastic_ratio: float) -> int:
    """Round half up; Python's round() would go to even."""
    return int(math.floor(max_n * drastic_ratio + 0.5))


def select_top(entries, max_n: int, drastic_ratio: float) -> list:
    """Pick up to ``max_n`` of ``(score, is_drastic, payload)`` tuples.

    The drastic quota is rounded half up from ``max_n * drastic_ratio``;
    shortfalls on either side backfill from the other.  The result is the
    payloads in ascending score order; ties keep input order.
    """
    entries = list(entries)
    take = min(max_n, len(entries))
    if take <= 0:
        return []
    quota = min(drastic_quota(max_n, drastic_ratio), take)
    drastic = sorted([e for e in entries if e[1]], key=lambda e: e[0])
    gentle = sorted([e for e in entries if not e[1]], key=lambda e: e[0])
    picked = drastic[:quota]
    picked += gentle[:take - len(picked)]
    if len(picked) < take:
        picked += drastic[quota:quota + take - len(picked)]
    picked.sort(key=lambda e: e[0])
    return [e[2] for e in picked]


__all__ = [
    "TAU_PX", "PAIR_CAP", "PAIR_SEED", "DEFAULT_WEIGHTS", "MEASURE_NAMES",
    "MeasureBreakdown", "rasterize_counts", "overplot_ratio",
    "occupation_ratio", "dump_coverage_pgm",
    "identification_loss", "comparison_loss", "trend_loss", "text_loss",
    "occupation_loss", "overplot_loss", "measure_pair", "score_pair",
    "drastic_quota", "select_top",
]
