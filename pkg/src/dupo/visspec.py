"""Declarative chart specification model.

A ``VisSpec`` is a plain-data description of a single chart: dataset,
mark layers with channel encodings, axes, legends, annotations, optional
faceting, and a couple of view-level transforms.  Everything here is
deliberately dumb data plus pure functions; the rule engine and the
geometry estimator both treat specs as values and never share mutable
state with callers.

Wire format is JSON (``.vspec.json``).  ``serialize_spec`` is canonical:
object keys are sorted and defaults are materialized, so equal specs
serialize to identical bytes and ``parse_spec`` round-trips exactly.
Array order is significant (annotations keep their order).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Any, Optional, Union

from .errors import SchemaError, SpecSyntaxError

FIELD_TYPES = ("quantitative", "nominal", "ordinal", "temporal")
CHANNELS = ("x", "y", "color", "size", "shape", "row", "column", "detail")
POSITIONAL_CHANNELS = ("x", "y")
LEGEND_CHANNELS = ("color", "size", "shape")
MARK_TYPES = ("bar", "line", "area", "point", "rect", "arc", "text")
AGGREGATES = ("none", "sum", "mean", "count")
TITLE_PLACEMENTS = ("external", "internal")
ANNOTATION_PLACEMENTS = ("inChart", "outOfChart")
LEGEND_POSITIONS = ("right", "top", "bottom")
FACET_DIRECTIONS = ("rows", "columns")
DEVICE_CLASSES = ("desktop", "tablet", "phone", "thumbnail", "print", "social")
SPECIFIER_ROLES = (
    "mark", "encoding", "axis", "legend", "annotation",
    "title", "layout", "size", "data", "tooltip",
)
TOOLTIP_POSITIONS = ("none", "bottom")

FACET_CARDINALITY_LIMIT = 24


def _expect(cond: bool, message: str, path: str):
    if not cond:
        raise SchemaError(message, path)


def _get(d: dict, key: str, default=None):
    v = d.get(key, default)
    return default if v is None else v


def _check_keys(d: dict, allowed: tuple, path: str):
    unknown = set(d) - set(allowed)
    _expect(not unknown, f"unknown keys {sorted(unknown)}", path)


def iso_to_ms(value: str) -> float:
    """Parse an ISO-8601 string to epoch milliseconds (UTC).

    Naive timestamps are taken as UTC so that the same string always maps
    to the same number regardless of host timezone.
    """
    text = value.replace("Z", "+00:00") if value.endswith("Z") else value
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp() * 1000.0


def _is_iso(value) -> bool:
    if not isinstance(value, str):
        return False
    try:
        iso_to_ms(value)
        return True
    except ValueError:
        return False


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


# ---------------------------------------------------------------------------
# data model


@dataclass
class FieldDef:
    name: str
    type: str

    def to_dict(self):
        return {"name": self.name, "type": self.type}

    @classmethod
    def from_dict(cls, d: dict, path: str) -> "FieldDef":
        _expect(isinstance(d, dict), "field must be an object", path)
        _check_keys(d, ("name", "type"), path)
        name = d.get("name")
        ftype = d.get("type")
        _expect(isinstance(name, str) and name, "field name must be a non-empty string", path)
        _expect(ftype in FIELD_TYPES, f"type must be one of {FIELD_TYPES}", path)
        return cls(name=name, type=ftype)


@dataclass
class Dataset:
    name: str
    fields: list
    rows: list

    def field(self, name: str) -> Optional[FieldDef]:
        for f in self.fields:
            if f.name == name:
                return f
        return None

    def field_names(self) -> list:
        return [f.name for f in self.fields]

    def cardinality(self, name: str) -> int:
        return len({_hashable(r.get(name)) for r in self.rows})

    def distinct(self, name: str) -> list:
        """Distinct values of a field in canonical (sorted) order."""
        seen = {}
        for r in self.rows:
            seen.setdefault(_hashable(r.get(name)), r.get(name))
        return sorted(seen.values(), key=_sort_key)

    def to_dict(self):
        return {
            "name": self.name,
            "fields": [f.to_dict() for f in self.fields],
            "rows": [dict(r) for r in self.rows],
        }

    @classmethod
    def from_dict(cls, d: dict, path: str) -> "Dataset":
        _expect(isinstance(d, dict), "dataset must be an object", path)
        _check_keys(d, ("name", "fields", "rows"), path)
        name = d.get("name")
        _expect(isinstance(name, str) and name, "dataset name must be a non-empty string", path)
        raw_fields = d.get("fields")
        _expect(isinstance(raw_fields, list) and raw_fields, "fields must be a non-empty array", path)
        fields = [FieldDef.from_dict(f, f"{path}.fields[{i}]") for i, f in enumerate(raw_fields)]
        names = [f.name for f in fields]
        _expect(len(set(names)) == len(names), "duplicate field names", f"{path}.fields")
        raw_rows = d.get("rows")
        _expect(isinstance(raw_rows, list), "rows must be an array", path)
        rows = []
        for i, r in enumerate(raw_rows):
            _expect(isinstance(r, dict), "row must be an object", f"{path}.rows[{i}]")
            rows.append(dict(r))
        return cls(name=name, fields=fields, rows=rows)


def _hashable(v):
    return json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v


def _sort_key(v):
    # mixed-type safe ordering: group by type name, then value
    if _is_number(v):
        return (0, v, "")
    return (1, 0, str(v))


def datum_key(dataset: Dataset, row: dict) -> str:
    """Stable identifier for a row: hash of values in declared field order."""
    payload = json.dumps([row.get(f.name) for f in dataset.fields],
                         sort_keys=True, separators=(",", ":"), default=str)
    return "d" + hashlib.sha1(payload.encode("utf-8")).hexdigest()[:10]


@dataclass
class ScaleHints:
    domain: Optional[list] = None
    range: Optional[list] = None
    scheme: Optional[str] = None

    def to_dict(self):
        return {"domain": self.domain, "range": self.range, "scheme": self.scheme}

    @classmethod
    def from_dict(cls, d: dict, path: str) -> "ScaleHints":
        _expect(isinstance(d, dict), "scaleHints must be an object", path)
        _check_keys(d, ("domain", "range", "scheme"), path)
        for k in ("domain", "range"):
            v = d.get(k)
            _expect(v is None or isinstance(v, list), f"{k} must be an array", path)
        scheme = d.get("scheme")
        _expect(scheme is None or isinstance(scheme, str), "scheme must be a string", path)
        return cls(domain=d.get("domain"), range=d.get("range"), scheme=scheme)


@dataclass
class EncodingDef:
    channel: str
    field: str
    type: str
    aggregate: str = "none"
    bin: Optional[float] = None
    scaleHints: Optional[ScaleHints] = None

    def to_dict(self):
        return {
            "channel": self.channel,
            "field": self.field,
            "type": self.type,
            "aggregate": self.aggregate,
            "bin": self.bin,
            "scaleHints": self.scaleHints.to_dict() if self.scaleHints else None,
        }

    @classmethod
    def from_dict(cls, d: dict, path: str) -> "EncodingDef":
        _expect(isinstance(d, dict), "encoding must be an object", path)
        _check_keys(d, ("channel", "field", "type", "aggregate", "bin", "scaleHints"), path)
        channel = d.get("channel")
        _expect(channel in CHANNELS, f"channel must be one of {CHANNELS}", path)
        fname = d.get("field")
        _expect(isinstance(fname, str) and fname, "field must be a non-empty string", path)
        ftype = d.get("type")
        _expect(ftype in FIELD_TYPES, f"type must be one of {FIELD_TYPES}", path)
        agg = _get(d, "aggregate", "none")
        _expect(agg in AGGREGATES, f"aggregate must be one of {AGGREGATES}", path)
        b = d.get("bin")
        _expect(b is None or (_is_number(b) and b > 0), "bin must be a positive number", path)
        hints = d.get("scaleHints")
        return cls(
            channel=channel, field=fname, type=ftype, aggregate=agg, bin=b,
            scaleHints=ScaleHints.from_dict(hints, f"{path}.scaleHints") if hints else None,
        )


@dataclass
class MarkStyle:
    fill: str = "#4c78a8"
    opacity: float = 1.0
    pointOnLine: bool = False
    strokeWidth: float = 2.0

    def to_dict(self):
        return {
            "fill": self.fill,
            "opacity": self.opacity,
            "pointOnLine": self.pointOnLine,
            "strokeWidth": self.strokeWidth,
        }

    @classmethod
    def from_dict(cls, d: dict, path: str) -> "MarkStyle":
        _expect(isinstance(d, dict), "style must be an object", path)
        _check_keys(d, ("fill", "opacity", "pointOnLine", "strokeWidth"), path)
        fill = _get(d, "fill", cls.fill)
        opacity = _get(d, "opacity", cls.opacity)
        pol = _get(d, "pointOnLine", cls.pointOnLine)
        sw = _get(d, "strokeWidth", cls.strokeWidth)
        _expect(isinstance(fill, str), "fill must be a string", path)
        _expect(_is_number(opacity) and 0 <= opacity <= 1, "opacity must be in [0, 1]", path)
        _expect(isinstance(pol, bool), "pointOnLine must be a boolean", path)
        _expect(_is_number(sw) and sw > 0, "strokeWidth must be positive", path)
        return cls(fill=fill, opacity=opacity, pointOnLine=pol, strokeWidth=sw)


@dataclass
class TooltipConfig:
    enabled: bool = False
    fixedPosition: str = "none"

    def to_dict(self):
        return {"enabled": self.enabled, "fixedPosition": self.fixedPosition}

    @classmethod
    def from_dict(cls, d: dict, path: str) -> "TooltipConfig":
        _expect(isinstance(d, dict), "tooltip must be an object", path)
        _check_keys(d, ("enabled", "fixedPosition"), path)
        enabled = _get(d, "enabled", False)
        pos = _get(d, "fixedPosition", "none")
        _expect(isinstance(enabled, bool), "enabled must be a boolean", path)
        _expect(pos in TOOLTIP_POSITIONS, f"fixedPosition must be one of {TOOLTIP_POSITIONS}", path)
        return cls(enabled=enabled, fixedPosition=pos)


@dataclass
class MarkLayer:
    markType: str
    encodings: list
    style: MarkStyle = field(default_factory=MarkStyle)
    tooltip: TooltipConfig = field(default_factory=TooltipConfig)

    def encoding(self, channel: str) -> Optional[EncodingDef]:
        for e in self.encodings:
            if e.channel == channel:
                return e
        return None

    def to_dict(self):
        return {
            "markType": self.markType,
            "encodings": [e.to_dict() for e in self.encodings],
            "style": self.style.to_dict(),
            "tooltip": self.tooltip.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict, path: str) -> "MarkLayer":
        _expect(isinstance(d, dict), "layer must be an object", path)
        _check_keys(d, ("markType", "encodings", "style", "tooltip"), path)
        mt = d.get("markType")
        _expect(mt in MARK_TYPES, f"markType must be one of {MARK_TYPES}", path)
        raw = _get(d, "encodings", [])
        _expect(isinstance(raw, list), "encodings must be an array", path)
        encodings = [EncodingDef.from_dict(e, f"{path}.encodings[{i}]") for i, e in enumerate(raw)]
        style = d.get("style")
        tooltip = d.get("tooltip")
        return cls(
            markType=mt,
            encodings=encodings,
            style=MarkStyle.from_dict(style, f"{path}.style") if style else MarkStyle(),
            tooltip=TooltipConfig.from_dict(tooltip, f"{path}.tooltip") if tooltip else TooltipConfig(),
        )


@dataclass
class Annotation:
    id: str
    text: str
    anchorKey: Optional[str] = None
    anchorX: Optional[float] = None
    anchorY: Optional[float] = None
    dx: float = 0.0
    dy: float = 0.0
    width: float = 120.0
    tickLine: bool = False
    placement: str = "inChart"

    def to_dict(self):
        return {
            "id": self.id,
            "text": self.text,
            "anchorKey": self.anchorKey,
            "anchorX": self.anchorX,
            "anchorY": self.anchorY,
            "dx": self.dx,
            "dy": self.dy,
            "width": self.width,
            "tickLine": self.tickLine,
            "placement": self.placement,
        }

    @classmethod
    def from_dict(cls, d: dict, path: str) -> "Annotation":
        _expect(isinstance(d, dict), "annotation must be an object", path)
        _check_keys(d, ("id", "text", "anchorKey", "anchorX", "anchorY",
                        "dx", "dy", "width", "tickLine", "placement"), path)
        aid = d.get("id")
        _expect(isinstance(aid, str) and aid, "annotation id must be a non-empty string", path)
        text = d.get("text")
        _expect(isinstance(text, str), "text must be a string", path)
        key = d.get("anchorKey")
        ax, ay = d.get("anchorX"), d.get("anchorY")
        _expect(key is None or isinstance(key, str), "anchorKey must be a string", path)
        for label, v in (("anchorX", ax), ("anchorY", ay)):
            _expect(v is None or _is_number(v), f"{label} must be a number", path)
        dx = _get(d, "dx", 0.0)
        dy = _get(d, "dy", 0.0)
        width = _get(d, "width", 120.0)
        tick = _get(d, "tickLine", False)
        placement = _get(d, "placement", "inChart")
        _expect(_is_number(dx) and _is_number(dy), "dx/dy must be numbers", path)
        _expect(_is_number(width), "width must be a number", path)
        _expect(isinstance(tick, bool), "tickLine must be a boolean", path)
        _expect(placement in ANNOTATION_PLACEMENTS,
                f"placement must be one of {ANNOTATION_PLACEMENTS}", path)
        return cls(id=aid, text=text, anchorKey=key, anchorX=ax, anchorY=ay,
                   dx=dx, dy=dy, width=width, tickLine=tick, placement=placement)


@dataclass
class AxisDef:
    visible: bool = True
    labelVisible: bool = True
    tickCount: int = 5
    labelFormat: str = ""
    labelAngle: float = 0.0

    def to_dict(self):
        return {
            "visible": self.visible,
            "labelVisible": self.labelVisible,
            "tickCount": self.tickCount,
            "labelFormat": self.labelFormat,
            "labelAngle": self.labelAngle,
        }

    @classmethod
    def from_dict(cls, d: dict, path: str) -> "AxisDef":
        _expect(isinstance(d, dict), "axis must be an object", path)
        _check_keys(d, ("visible", "labelVisible", "tickCount", "labelFormat", "labelAngle"), path)
        visible = _get(d, "visible", True)
        label_visible = _get(d, "labelVisible", True)
        ticks = _get(d, "tickCount", 5)
        fmt = _get(d, "labelFormat", "")
        angle = _get(d, "labelAngle", 0.0)
        _expect(isinstance(visible, bool) and isinstance(label_visible, bool),
                "visible/labelVisible must be booleans", path)
        _expect(isinstance(ticks, int) and not isinstance(ticks, bool) and ticks >= 2,
                "tickCount must be an integer >= 2", path)
        _expect(isinstance(fmt, str), "labelFormat must be a string", path)
        _expect(_is_number(angle), "labelAngle must be a number", path)
        return cls(visible=visible, labelVisible=label_visible,
                   tickCount=ticks, labelFormat=fmt, labelAngle=angle)


@dataclass
class LegendDef:
    visible: bool = True
    position: str = "right"

    def to_dict(self):
        return {"visible": self.visible, "position": self.position}

    @classmethod
    def from_dict(cls, d: dict, path: str) -> "LegendDef":
        _expect(isinstance(d, dict), "legend must be an object", path)
        _check_keys(d, ("visible", "position"), path)
        visible = _get(d, "visible", True)
        position = _get(d, "position", "right")
        _expect(isinstance(visible, bool), "visible must be a boolean", path)
        _expect(position in LEGEND_POSITIONS, f"position must be one of {LEGEND_POSITIONS}", path)
        return cls(visible=visible, position=position)


@dataclass
class TitleDef:
    text: str = ""
    placement: str = "external"

    def to_dict(self):
        return {"text": self.text, "placement": self.placement}

    @classmethod
    def from_dict(cls, d: dict, path: str) -> "TitleDef":
        _expect(isinstance(d, dict), "title must be an object", path)
        _check_keys(d, ("text", "placement"), path)
        text = _get(d, "text", "")
        placement = _get(d, "placement", "external")
        _expect(isinstance(text, str), "text must be a string", path)
        _expect(placement in TITLE_PLACEMENTS, f"placement must be one of {TITLE_PLACEMENTS}", path)
        return cls(text=text, placement=placement)


@dataclass
class FacetDef:
    field: str
    direction: str = "columns"
    maxPerRow: int = 3

    def to_dict(self):
        return {"field": self.field, "direction": self.direction, "maxPerRow": self.maxPerRow}

    @classmethod
    def from_dict(cls, d: dict, path: str) -> "FacetDef":
        _expect(isinstance(d, dict), "facet must be an object", path)
        _check_keys(d, ("field", "direction", "maxPerRow"), path)
        fname = d.get("field")
        _expect(isinstance(fname, str) and fname, "facet field must be a non-empty string", path)
        direction = _get(d, "direction", "columns")
        _expect(direction in FACET_DIRECTIONS, f"direction must be one of {FACET_DIRECTIONS}", path)
        mpr = _get(d, "maxPerRow", 3)
        _expect(isinstance(mpr, int) and not isinstance(mpr, bool) and mpr >= 1,
                "maxPerRow must be an integer >= 1", path)
        return cls(field=fname, direction=direction, maxPerRow=mpr)


@dataclass
class DataTransform:
    """View-level row transform attached to the whole spec.

    Only a top-k filter for now.  The underlying dataset is never touched;
    the geometry pipeline applies the filter when laying out glyphs.
    """

    filterField: Optional[str] = None
    filterTopK: Optional[int] = None

    def to_dict(self):
        return {"filterField": self.filterField, "filterTopK": self.filterTopK}

    @classmethod
    def from_dict(cls, d: dict, path: str) -> "DataTransform":
        _expect(isinstance(d, dict), "transform must be an object", path)
        _check_keys(d, ("filterField", "filterTopK"), path)
        fname = d.get("filterField")
        k = d.get("filterTopK")
        _expect(fname is None or isinstance(fname, str), "filterField must be a string", path)
        _expect(k is None or (isinstance(k, int) and not isinstance(k, bool) and k >= 1),
                "filterTopK must be an integer >= 1", path)
        return cls(filterField=fname, filterTopK=k)


@dataclass
class DeviceProfile:
    name: str
    cls: str
    screenWidth: float
    screenHeight: float
    ppi: float = 96.0
    breakpointMin: Optional[float] = None
    breakpointMax: Optional[float] = None

    def to_dict(self):
        return {
            "name": self.name,
            "class": self.cls,
            "screenWidth": self.screenWidth,
            "screenHeight": self.screenHeight,
            "ppi": self.ppi,
            "breakpointMin": self.breakpointMin,
            "breakpointMax": self.breakpointMax,
        }

    @classmethod
    def from_dict(cls, d: dict, path: str = "device") -> "DeviceProfile":
        _expect(isinstance(d, dict), "device must be an object", path)
        _check_keys(d, ("name", "class", "screenWidth", "screenHeight",
                        "ppi", "breakpointMin", "breakpointMax"), path)
        name = d.get("name")
        _expect(isinstance(name, str) and name, "device name must be a non-empty string", path)
        dclass = d.get("class")
        _expect(dclass in DEVICE_CLASSES, f"class must be one of {DEVICE_CLASSES}", path)
        w, h = d.get("screenWidth"), d.get("screenHeight")
        _expect(_is_number(w) and w > 0, "screenWidth must be positive", path)
        _expect(_is_number(h) and h > 0, "screenHeight must be positive", path)
        ppi = _get(d, "ppi", 96.0)
        _expect(_is_number(ppi) and ppi > 0, "ppi must be positive", path)
        bmin, bmax = d.get("breakpointMin"), d.get("breakpointMax")
        for label, v in (("breakpointMin", bmin), ("breakpointMax", bmax)):
            _expect(v is None or (_is_number(v) and v >= 0), f"{label} must be a number >= 0", path)
        if bmin is not None and bmax is not None:
            _expect(bmin < bmax, "breakpointMin must be below breakpointMax", path)
        return cls(name=name, cls=dclass, screenWidth=w, screenHeight=h,
                   ppi=ppi, breakpointMin=bmin, breakpointMax=bmax)


@dataclass
class VisSpec:
    dataset: Dataset
    layers: list
    width: float
    height: float
    title: TitleDef = field(default_factory=TitleDef)
    axes: dict = field(default_factory=dict)          # channel -> AxisDef, keys in {x, y}
    legends: dict = field(default_factory=dict)       # channel -> LegendDef
    annotations: list = field(default_factory=list)
    facet: Optional[FacetDef] = None
    transform: Optional[DataTransform] = None
    fontScale: float = 1.0

    # -- convenience lookups -------------------------------------------------

    def encoding(self, channel: str) -> Optional[EncodingDef]:
        """First encoding on ``channel`` across layers, or None."""
        for layer in self.layers:
            e = layer.encoding(channel)
            if e is not None:
                return e
        return None

    def encodings_on(self, channel: str) -> list:
        return [e for layer in self.layers for e in layer.encodings if e.channel == channel]

    def annotation(self, aid: str) -> Optional[Annotation]:
        for a in self.annotations:
            if a.id == aid:
                return a
        return None

    def to_dict(self):
        return {
            "dataset": self.dataset.to_dict(),
            "layers": [l.to_dict() for l in self.layers],
            "width": self.width,
            "height": self.height,
            "title": self.title.to_dict(),
            "axes": {ch: ax.to_dict() for ch, ax in sorted(self.axes.items())},
            "legends": {ch: lg.to_dict() for ch, lg in sorted(self.legends.items())},
            "annotations": [a.to_dict() for a in self.annotations],
            "facet": self.facet.to_dict() if self.facet else None,
            "transform": self.transform.to_dict() if self.transform else None,
            "fontScale": self.fontScale,
        }

    @classmethod
    def from_dict(cls, d: dict, path: str = "spec") -> "VisSpec":
        _expect(isinstance(d, dict), "spec must be an object", path)
        _check_keys(d, ("dataset", "layers", "width", "height", "title", "axes",
                        "legends", "annotations", "facet", "transform", "fontScale"), path)
        _expect("dataset" in d, "dataset is required", path)
        dataset = Dataset.from_dict(d["dataset"], f"{path}.dataset" if path != "spec" else "dataset")
        prefix = "" if path == "spec" else path + "."
        raw_layers = d.get("layers")
        _expect(isinstance(raw_layers, list) and raw_layers, "layers must be a non-empty array",
                f"{prefix}layers")
        layers = [MarkLayer.from_dict(l, f"{prefix}layers[{i}]") for i, l in enumerate(raw_layers)]
        # field references are a parse-time error with a precise path
        for i, layer in enumerate(layers):
            for j, enc in enumerate(layer.encodings):
                _expect(dataset.field(enc.field) is not None,
                        f"field '{enc.field}' not in dataset",
                        f"{prefix}layers[{i}].encodings[{j}]")
        w, h = d.get("width"), d.get("height")
        _expect(_is_number(w) and w > 0, "width must be positive", f"{prefix}width")
        _expect(_is_number(h) and h > 0, "height must be positive", f"{prefix}height")
        raw_axes = _get(d, "axes", {})
        _expect(isinstance(raw_axes, dict), "axes must be an object", f"{prefix}axes")
        axes = {}
        for ch, ax in raw_axes.items():
            _expect(ch in POSITIONAL_CHANNELS, "axes keys must be positional channels",
                    f"{prefix}axes.{ch}")
            axes[ch] = AxisDef.from_dict(ax, f"{prefix}axes.{ch}")
        raw_legends = _get(d, "legends", {})
        _expect(isinstance(raw_legends, dict), "legends must be an object", f"{prefix}legends")
        legends = {}
        for ch, lg in raw_legends.items():
            _expect(ch in LEGEND_CHANNELS, "legends keys must be non-positional channels",
                    f"{prefix}legends.{ch}")
            legends[ch] = LegendDef.from_dict(lg, f"{prefix}legends.{ch}")
        raw_ann = _get(d, "annotations", [])
        _expect(isinstance(raw_ann, list), "annotations must be an array", f"{prefix}annotations")
        annotations = [Annotation.from_dict(a, f"{prefix}annotations[{i}]")
                       for i, a in enumerate(raw_ann)]
        facet = d.get("facet")
        transform = d.get("transform")
        font_scale = _get(d, "fontScale", 1.0)
        _expect(_is_number(font_scale) and font_scale > 0, "fontScale must be positive",
                f"{prefix}fontScale")
        title = d.get("title")
        return cls(
            dataset=dataset,
            layers=layers,
            width=w,
            height=h,
            title=TitleDef.from_dict(title, f"{prefix}title") if title else TitleDef(),
            axes=axes,
            legends=legends,
            annotations=annotations,
            facet=FacetDef.from_dict(facet, f"{prefix}facet") if facet else None,
            transform=DataTransform.from_dict(transform, f"{prefix}transform") if transform else None,
            fontScale=font_scale,
        )


# ---------------------------------------------------------------------------
# specifier paths


@dataclass
class SpecifierPath:
    """Addresses one element of a spec: a role plus a role-specific selector.

    Selectors by role: ``mark``/``tooltip`` take a layer index (default 0),
    ``encoding``/``axis``/``legend`` take a channel name, ``annotation``
    takes an annotation id, and ``title``/``layout``/``size``/``data``
    ignore the selector.
    """

    role: str
    selector: Union[str, int, None] = None

    def to_dict(self):
        return {"role": self.role, "selector": self.selector}

    @classmethod
    def from_dict(cls, d: dict, path: str = "specifier") -> "SpecifierPath":
        _expect(isinstance(d, dict), "specifier must be an object", path)
        _check_keys(d, ("role", "selector"), path)
        role = d.get("role")
        _expect(role in SPECIFIER_ROLES, f"role must be one of {SPECIFIER_ROLES}", path)
        sel = d.get("selector")
        _expect(sel is None or isinstance(sel, (str, int)), "selector must be a string or int", path)
        return cls(role=role, selector=sel)

    def key(self) -> str:
        return f"{self.role}|{'' if self.selector is None else self.selector}"


class LayoutHandle:
    """Stable handle for layout-level addressing (facet + orientation)."""

    def __init__(self, spec: VisSpec):
        self.spec = spec
        self.facet = spec.facet


class SizeHandle:
    def __init__(self, spec: VisSpec):
        self.width = spec.width
        self.height = spec.height


def _layer_index(sel) -> Optional[int]:
    if sel is None:
        return 0
    if isinstance(sel, bool):
        return None
    if isinstance(sel, int):
        return sel
    if isinstance(sel, str) and sel.isdigit():
        return int(sel)
    return None


def resolve_specifier(spec: VisSpec, path: SpecifierPath):
    """Resolve ``path`` against ``spec``; returns the element or None.

    Total: never raises on a well-formed path, absence is a None result.
    A legend resolves only when its channel is encoded somewhere and the
    legend is visible; a title resolves only when it has text.
    """
    role, sel = path.role, path.selector
    if role == "mark":
        idx = _layer_index(sel)
        if idx is None or not (0 <= idx < len(spec.layers)):
            return None
        return spec.layers[idx]
    if role == "tooltip":
        idx = _layer_index(sel)
        if idx is None or not (0 <= idx < len(spec.layers)):
            return None
        return spec.layers[idx].tooltip
    if role == "encoding":
        if not isinstance(sel, str):
            return None
        return spec.encoding(sel)
    if role == "axis":
        if sel not in POSITIONAL_CHANNELS or spec.encoding(sel) is None:
            return None
        return spec.axes.get(sel) or AxisDef()
    if role == "legend":
        if sel not in LEGEND_CHANNELS or spec.encoding(sel) is None:
            return None
        legend = spec.legends.get(sel)
        if legend is None or not legend.visible:
            return None
        return legend
    if role == "annotation":
        if not isinstance(sel, str):
            return None
        return spec.annotation(sel)
    if role == "title":
        return spec.title if spec.title.text else None
    if role == "layout":
        return LayoutHandle(spec)
    if role == "size":
        return SizeHandle(spec)
    if role == "data":
        return spec.dataset
    return None


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationIssue:
    severity: str                  # "error" | "warning"
    path: SpecifierPath
    message: str

    def to_dict(self):
        return {"severity": self.severity, "path": self.path.to_dict(), "message": self.message}


@dataclass
class ValidationReport:
    issues: list

    @property
    def ok(self) -> bool:
        return not any(i.severity == "error" for i in self.issues)

    def errors(self) -> list:
        return [i for i in self.issues if i.severity == "error"]

    def to_dict(self):
        return {"ok": self.ok, "issues": [i.to_dict() for i in self.issues]}


def validate_spec(spec: VisSpec) -> ValidationReport:
    """Check every structural invariant; ok iff no error-severity issues."""
    issues = []

    def err(role, sel, msg):
        issues.append(ValidationIssue("error", SpecifierPath(role, sel), msg))

    def warn(role, sel, msg):
        issues.append(ValidationIssue("warning", SpecifierPath(role, sel), msg))

    ds = spec.dataset
    declared = set(ds.field_names())
    for i, row in enumerate(ds.rows):
        if set(row) != declared:
            err("data", None, f"row {i} keys {sorted(row)} do not match declared fields")
            break
    for f in ds.fields:
        for i, row in enumerate(ds.rows):
            v = row.get(f.name)
            if f.type == "quantitative" and not _is_number(v):
                err("data", None, f"row {i}: field '{f.name}' must be numeric")
                break
            if f.type == "temporal" and not _is_iso(v):
                err("data", None, f"row {i}: field '{f.name}' must be an ISO-8601 string")
                break

    if not (_is_number(spec.width) and spec.width > 0):
        err("size", None, "width must be positive")
    if not (_is_number(spec.height) and spec.height > 0):
        err("size", None, "height must be positive")
    if not spec.layers:
        err("mark", None, "at least one layer is required")
    if not (_is_number(spec.fontScale) and spec.fontScale > 0):
        err("size", None, "fontScale must be positive")

    for i, layer in enumerate(spec.layers):
        if layer.markType not in MARK_TYPES:
            err("mark", i, f"unknown markType '{layer.markType}'")
        seen = set()
        for e in layer.encodings:
            if e.channel in seen:
                err("mark", i, f"duplicate encoding on channel '{e.channel}'")
            seen.add(e.channel)
        if layer.markType == "arc":
            for ch in POSITIONAL_CHANNELS:
                if layer.encoding(ch) is not None:
                    err("mark", i, f"arc layers must not encode '{ch}'")
        for e in layer.encodings:
            fdef = ds.field(e.field)
            if fdef is None:
                err("encoding", e.channel, f"field '{e.field}' not in dataset")
                continue
            if e.aggregate not in AGGREGATES:
                err("encoding", e.channel, f"unknown aggregate '{e.aggregate}'")
            elif e.aggregate not in ("none", "count") and e.type != "quantitative":
                err("encoding", e.channel,
                    f"aggregate '{e.aggregate}' requires a quantitative encoding")
            if e.channel in ("row", "column") and e.type not in ("nominal", "ordinal"):
                err("encoding", e.channel, "row/column encodings must be nominal or ordinal")
            if e.type != fdef.type and not (e.type == "ordinal" and fdef.type == "nominal"):
                warn("encoding", e.channel,
                     f"encoding type '{e.type}' differs from field type '{fdef.type}'")

    for ch in spec.axes:
        if ch not in POSITIONAL_CHANNELS:
            err("axis", ch, "axes are only defined for positional channels")
    for ch, legend in spec.legends.items():
        if ch not in LEGEND_CHANNELS:
            err("legend", ch, "legends are only defined for color/size/shape")
        elif legend.visible and spec.encoding(ch) is None:
            warn("legend", ch, "legend for an unencoded channel")

    keys = {datum_key(ds, r) for r in ds.rows}
    seen_ids = set()
    for a in spec.annotations:
        if a.id in seen_ids:
            err("annotation", a.id, "duplicate annotation id")
        seen_ids.add(a.id)
        if not (_is_number(a.width) and a.width > 0):
            err("annotation", a.id, "width must be positive")
        has_key = a.anchorKey is not None
        has_xy = a.anchorX is not None and a.anchorY is not None
        if has_key == has_xy:
            err("annotation", a.id, "anchor must be either a datumKey or absolute x/y")
        elif has_key and a.anchorKey not in keys:
            err("annotation", a.id, f"anchor datumKey '{a.anchorKey}' matches no row")
        if a.placement not in ANNOTATION_PLACEMENTS:
            err("annotation", a.id, f"unknown placement '{a.placement}'")

    if spec.facet is not None:
        fdef = ds.field(spec.facet.field)
        if fdef is None:
            err("layout", None, f"facet field '{spec.facet.field}' not in dataset")
        elif fdef.type not in ("nominal", "ordinal"):
            err("layout", None, "facet field must be nominal or ordinal")
        elif ds.cardinality(spec.facet.field) > FACET_CARDINALITY_LIMIT:
            err("layout", None,
                f"facet cardinality exceeds {FACET_CARDINALITY_LIMIT}")
        if spec.facet.direction not in FACET_DIRECTIONS:
            err("layout", None, f"unknown facet direction '{spec.facet.direction}'")

    if spec.transform is not None:
        t = spec.transform
        if (t.filterField is None) != (t.filterTopK is None):
            err("data", None, "filterField and filterTopK must be set together")
        elif t.filterField is not None:
            fdef = ds.field(t.filterField)
            if fdef is None:
                err("data", None, f"filter field '{t.filterField}' not in dataset")
            elif fdef.type != "quantitative":
                err("data", None, "top-k filter requires a quantitative field")

    return ValidationReport(issues=issues)


# ---------------------------------------------------------------------------
# parse / serialize


def parse_spec(text: str) -> VisSpec:
    """Parse canonical JSON into a validated ``VisSpec``.

    Raises ``SpecSyntaxError`` for malformed JSON, ``SchemaError`` (with a
    path) for structural problems or invariant violations.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecSyntaxError(f"malformed JSON: {e}") from e
    spec = VisSpec.from_dict(raw, path="spec")
    report = validate_spec(spec)
    if not report.ok:
        first = report.errors()[0]
        raise SchemaError(first.message, first.path.key())
    return spec


def serialize_spec(spec: VisSpec) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline.

    Deterministic byte-for-byte; annotation (array) order is preserved and
    therefore significant.
    """
    return json.dumps(spec.to_dict(), sort_keys=True, indent=2) + "\n"


def copy_spec(spec: VisSpec) -> VisSpec:
    """Deep structural copy via the wire format (guarantees value semantics)."""
    return VisSpec.from_dict(spec.to_dict())


__all__ = [
    "FIELD_TYPES", "CHANNELS", "POSITIONAL_CHANNELS", "LEGEND_CHANNELS",
    "MARK_TYPES", "AGGREGATES", "DEVICE_CLASSES", "SPECIFIER_ROLES",
    "FieldDef", "Dataset", "ScaleHints", "EncodingDef", "MarkStyle",
    "TooltipConfig", "MarkLayer", "Annotation", "AxisDef", "LegendDef",
    "TitleDef", "FacetDef", "DataTransform", "DeviceProfile", "VisSpec",
    "SpecifierPath", "ValidationIssue", "ValidationReport",
    "parse_spec", "serialize_spec", "validate_spec", "resolve_specifier",
    "copy_spec", "datum_key", "iso_to_ms",
]
