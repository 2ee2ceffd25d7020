"""Transformation rules and the compiler that applies them to specs.

A rule is (specifier, action, option): *what* to change, *how*, and with
which parameters.  Responsive variants of a chart are expressed as an
ordered rule list compiled against a base spec; later rules win, undo is
recompilation with the undone rule removed.  Compilation is all-or-nothing:
a rule whose target is missing is skipped with a warning, but a rule that
produces an invalid spec raises ``CompileError`` carrying its index and no
partial output escapes.

The option vocabulary is closed (see docs/rule-catalog.md); unknown keys
are schema errors so that typos surface instead of silently no-opping.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .errors import CompileError, SchemaError
from .visspec import (
    AGGREGATES, ANNOTATION_PLACEMENTS, CHANNELS, FACET_DIRECTIONS,
    LEGEND_CHANNELS, LEGEND_POSITIONS, MARK_TYPES, POSITIONAL_CHANNELS,
    TITLE_PLACEMENTS, TOOLTIP_POSITIONS,
    Annotation, AxisDef, DataTransform, EncodingDef, FacetDef, LegendDef,
    MarkLayer, SpecifierPath, TitleDef, VisSpec, copy_spec, validate_spec,
)

PROVENANCE_KINDS = ("manual", "directManipulation", "suggestion", "quickEdit")

ACTIONS = ("add", "remove", "modify", "replace", "transpose",
           "resize", "reposition", "duplicate")

# which actions make sense for which role
ROLE_ACTIONS = {
    "mark": ("add", "remove", "modify", "replace", "duplicate"),
    "encoding": ("add", "remove", "modify", "replace", "transpose"),
    "axis": ("add", "remove", "modify"),
    "legend": ("add", "remove", "modify", "reposition"),
    "annotation": ("add", "remove", "modify", "reposition", "duplicate"),
    "title": ("add", "remove", "modify", "reposition"),
    "layout": ("add", "remove", "modify", "transpose"),
    "size": ("resize",),
    "data": ("modify", "remove"),
    "tooltip": ("add", "remove", "modify"),
}

# closed option vocabulary, per role
ROLE_OPTIONS = {
    "size": ("width", "height", "fontScale"),
    "mark": ("markType", "fill", "opacity", "strokeWidth", "pointOnLine"),
    "encoding": ("field", "type", "aggregate", "bin"),
    "axis": ("visible", "labelVisible", "tickCount", "labelFormat", "labelAngle"),
    "legend": ("visible", "position"),
    "annotation": ("id", "text", "anchorKey", "anchorX", "anchorY",
                   "dx", "dy", "width", "tickLine", "placement"),
    "title": ("text", "placement"),
    "layout": ("facetField", "facetDirection", "maxPerRow"),
    "data": ("aggregate", "bins", "filterTopK", "filterField"),
    "tooltip": ("enabled", "fixedPosition"),
}

RATIONALE_TAGS = ("minimizeChanges", "avoidOverplot", "fitAspect", "maintainDensity")

RATIONALE_TEXT = {
    "minimizeChanges": "minimize changes between responsive designs",
    "avoidOverplot": "avoid overplotting",
    "fitAspect": "fit to the new aspect ratio",
    "maintainDensity": "maintain graphical density",
}

_DEFAULT_RATIONALE = {
    "size": "fitAspect",
    "layout": "fitAspect",
    "data": "avoidOverplot",
    "encoding": "maintainDensity",
    "mark": "minimizeChanges",
    "axis": "minimizeChanges",
    "legend": "minimizeChanges",
    "annotation": "maintainDensity",
    "title": "maintainDensity",
    "tooltip": "minimizeChanges",
}


@dataclass
class Provenance:
    """Where an edit came from; timestamps are logical counters."""

    kind: str
    timestamp: int = 0

    def to_dict(self):
        return {"kind": self.kind, "timestamp": self.timestamp}

    @classmethod
    def from_dict(cls, d: dict) -> "Provenance":
        kind = d.get("kind")
        if kind not in PROVENANCE_KINDS:
            raise SchemaError(f"kind must be one of {PROVENANCE_KINDS}", "provenance")
        ts = d.get("timestamp", 0)
        if not isinstance(ts, int) or isinstance(ts, bool):
            raise SchemaError("timestamp must be an integer", "provenance")
        return cls(kind=kind, timestamp=ts)


@dataclass
class TransformRule:
    specifier: SpecifierPath
    action: str
    option: dict = field(default_factory=dict)
    rationale: Optional[str] = None     # strategy tag used by describe_rules

    def to_dict(self):
        d = {
            "specifier": self.specifier.to_dict(),
            "action": self.action,
            "option": dict(self.option),
        }
        if self.rationale is not None:
            d["rationale"] = self.rationale
        return d

    @classmethod
    def from_dict(cls, d: dict, path: str = "rule") -> "TransformRule":
        if not isinstance(d, dict):
            raise SchemaError("rule must be an object", path)
        unknown = set(d) - {"specifier", "action", "option", "rationale"}
        if unknown:
            raise SchemaError(f"unknown keys {sorted(unknown)}", path)
        if "specifier" not in d:
            raise SchemaError("specifier is required", path)
        spec_path = SpecifierPath.from_dict(d["specifier"], f"{path}.specifier")
        action = d.get("action")
        option = d.get("option") or {}
        rationale = d.get("rationale")
        rule = cls(specifier=spec_path, action=action, option=dict(option), rationale=rationale)
        validate_rule(rule, path)
        return rule


def rule(role: str, selector, action: str, option: dict = None,
         rationale: str = None) -> TransformRule:
    """Shorthand constructor used all over the tests and the catalog."""
    r = TransformRule(SpecifierPath(role, selector), action, dict(option or {}), rationale)
    validate_rule(r)
    return r


def validate_rule(r: TransformRule, path: str = "rule"):
    role = r.specifier.role
    if role not in ROLE_ACTIONS:
        raise SchemaError(f"unknown role '{role}'", path)
    if r.action not in ROLE_ACTIONS[role]:
        raise SchemaError(f"action '{r.action}' is not valid for role '{role}'", path)
    sel = r.specifier.selector
    if role in ("mark", "tooltip"):
        if sel is not None and (not isinstance(sel, int) or isinstance(sel, bool)):
            raise SchemaError(f"{role} selector must be a layer index", path)
    elif role == "encoding":
        if sel not in CHANNELS:
            raise SchemaError("encoding selector must be a channel name", path)
    elif role == "axis":
        if sel not in POSITIONAL_CHANNELS:
            raise SchemaError("axis selector must be 'x' or 'y'", path)
    elif role == "legend":
        if sel not in LEGEND_CHANNELS:
            raise SchemaError("legend selector must be color/size/shape", path)
    elif role == "annotation":
        if not isinstance(sel, str) or not sel:
            raise SchemaError("annotation selector must be an annotation id", path)
    else:
        if sel is not None:
            raise SchemaError(f"role '{role}' takes no selector", path)
    if not isinstance(r.option, dict):
        raise SchemaError("option must be an object", path)
    allowed = set(ROLE_OPTIONS[role])
    unknown = set(r.option) - allowed
    if unknown:
        raise SchemaError(f"unknown option keys {sorted(unknown)} for role '{role}'", path)
    if r.action == "resize" and not ({"width", "height"} & set(r.option)):
        raise SchemaError("resize requires a width or height option", path)
    if r.action == "transpose" and role not in ("layout", "encoding"):
        raise SchemaError("transpose is only valid for layout/encoding", path)
    if r.rationale is not None and r.rationale not in RATIONALE_TAGS:
        raise SchemaError(f"rationale must be one of {RATIONALE_TAGS}", path)


def rules_from_json(text: str) -> list:
    """Parse a ``.rules.json`` document (an array of rule objects)."""
    raw = json.loads(text)
    if not isinstance(raw, list):
        raise SchemaError("rule document must be an array", "rules")
    return [TransformRule.from_dict(r, f"rules[{i}]") for i, r in enumerate(raw)]


def rules_to_json(rules: list) -> str:
    return json.dumps([r.to_dict() for r in rules], sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# signatures


def _canon_value(v) -> str:
    return json.dumps(v, sort_keys=True, separators=(",", ":"))


def rule_signature(r: TransformRule) -> str:
    """Canonical identity of a rule; option insertion order never matters."""
    sel = r.specifier.selector
    if r.specifier.role in ("mark", "tooltip") and sel is None:
        sel = 0
    if r.specifier.role in ("title", "layout", "size", "data"):
        sel = ""
    opts = ",".join(f"{k}={_canon_value(v)}" for k, v in sorted(r.option.items()))
    return f"{r.specifier.role}|{sel}|{r.action}|{opts}"


def suggestion_signature(rules: list) -> str:
    """Order-insensitive identity of a rule set."""
    return ";".join(sorted(rule_signature(r) for r in rules))


# ---------------------------------------------------------------------------
# applicability


def skip_reason(spec: VisSpec, r: TransformRule) -> Optional[str]:
    """Why this rule would be skipped on ``spec``, or None if it applies.

    ``add`` actions check their container; everything else checks that the
    addressed element resolves.
    """
    role, sel, action = r.specifier.role, r.specifier.selector, r.action
    if role in ("mark", "tooltip"):
        if action == "add" and role == "mark":
            return None
        idx = 0 if sel is None else sel
        if not (0 <= idx < len(spec.layers)):
            return f"layer {idx} does not exist"
        return None
    if role == "encoding":
        if action == "add":
            return None
        if spec.encoding(sel) is None:
            return f"no encoding on channel '{sel}'"
        return None
    if role == "axis":
        if spec.encoding(sel) is None:
            return f"channel '{sel}' is not encoded"
        return None
    if role == "legend":
        if spec.encoding(sel) is None:
            return f"channel '{sel}' is not encoded"
        if action != "add":
            legend = spec.legends.get(sel)
            if legend is None or not legend.visible:
                return f"no visible legend on '{sel}'"
        return None
    if role == "annotation":
        if action == "add":
            return None
        if spec.annotation(sel) is None:
            return f"annotation '{sel}' does not exist"
        return None
    if role == "title":
        if action != "add" and not spec.title.text:
            return "spec has no title"
        return None
    if role == "layout":
        if action == "transpose":
            if spec.encoding("x") is None and spec.encoding("y") is None:
                return "no positional encodings to transpose"
        return None
    if role == "data" and action == "modify" and "aggregate" in r.option:
        if _aggregation_target(spec) is None:
            return "no quantitative channel to aggregate"
    return None


def rule_applies(spec: VisSpec, r: TransformRule) -> bool:
    return skip_reason(spec, r) is None


# ---------------------------------------------------------------------------
# compilation


def apply_rules(spec: VisSpec, rules: list) -> VisSpec:
    """Compile an ordered rule list against ``spec``; see module docstring."""
    return apply_rules_verbose(spec, rules)[0]


def apply_rules_verbose(spec: VisSpec, rules: list):
    """Like ``apply_rules`` but also returns skip warnings (rule idx, reason)."""
    work = copy_spec(spec)
    warnings = []
    for i, r in enumerate(rules):
        try:
            validate_rule(r)
        except SchemaError as e:
            raise CompileError(f"rule {i} is malformed: {e}", i) from e
        reason = skip_reason(work, r)
        if reason is not None:
            warnings.append((i, reason))
            continue
        _apply_one(work, r)
        report = validate_spec(work)
        if not report.ok:
            first = report.errors()[0]
            raise CompileError(
                f"rule {i} ({rule_signature(r)}) produced an invalid spec: "
                f"{first.message}", i)
    return work, warnings


def _layer_for(spec: VisSpec, sel) -> MarkLayer:
    idx = 0 if sel is None else sel
    return spec.layers[idx]


def _aggregation_target(spec: VisSpec) -> Optional[str]:
    """Channel whose values a data-level aggregation should summarize."""
    for ch in ("y", "x", "color", "size"):
        e = spec.encoding(ch)
        if e is not None and e.type == "quantitative":
            return ch
    return None


def _field_extent(spec: VisSpec, fname: str):
    from .visspec import iso_to_ms
    fdef = spec.dataset.field(fname)
    if fdef is None or not spec.dataset.rows:
        return None
    if fdef.type == "temporal":
        vals = [iso_to_ms(r[fname]) for r in spec.dataset.rows]
    elif fdef.type == "quantitative":
        vals = [r[fname] for r in spec.dataset.rows]
    else:
        return None
    return min(vals), max(vals)


def _transpose_layout(spec: VisSpec):
    for layer in spec.layers:
        for e in layer.encodings:
            if e.channel == "x":
                e.channel = "y"
            elif e.channel == "y":
                e.channel = "x"
    ax, ay = spec.axes.get("x"), spec.axes.get("y")
    spec.axes.pop("x", None)
    spec.axes.pop("y", None)
    if ay is not None:
        spec.axes["x"] = ay
    if ax is not None:
        spec.axes["y"] = ax


def _convert_mark_type(layer: MarkLayer, new_type: str):
    """Change the mark type, repairing encodings when arc is involved.

    Arc marks carry their category on color and their value on size; any
    conversion to or from arc moves those encodings so the result stays
    well-formed.
    """
    old = layer.markType
    layer.markType = new_type
    if old == new_type:
        return
    if old == "arc":
        if layer.encoding("x") is None and layer.encoding("y") is None:
            cat = layer.encoding("color")
            val = layer.encoding("size")
            if cat is not None:
                layer.encodings.append(EncodingDef("x", cat.field, cat.type))
            if val is not None:
                layer.encodings.append(
                    EncodingDef("y", val.field, "quantitative", aggregate=val.aggregate))
                layer.encodings.remove(val)
    if new_type == "arc":
        for ch in POSITIONAL_CHANNELS:
            enc = layer.encoding(ch)
            if enc is None:
                continue
            if enc.type == "quantitative" and layer.encoding("size") is None:
                layer.encodings.append(
                    EncodingDef("size", enc.field, "quantitative", aggregate=enc.aggregate))
            elif enc.type != "quantitative" and layer.encoding("color") is None:
                layer.encodings.append(EncodingDef("color", enc.field, enc.type))
            layer.encodings.remove(enc)


def _apply_one(spec: VisSpec, r: TransformRule):
    role, sel, action, opt = r.specifier.role, r.specifier.selector, r.action, r.option

    if role == "size":
        if "width" in opt:
            spec.width = opt["width"]
        if "height" in opt:
            spec.height = opt["height"]
        if "fontScale" in opt:
            spec.fontScale = opt["fontScale"]
        return

    if role == "layout":
        if action == "transpose":
            _transpose_layout(spec)
        elif action == "remove":
            spec.facet = None
        else:   # add / modify
            if "facetField" in opt:
                current = spec.facet
                spec.facet = FacetDef(
                    field=opt["facetField"],
                    direction=opt.get("facetDirection",
                                      current.direction if current else "columns"),
                    maxPerRow=opt.get("maxPerRow", current.maxPerRow if current else 3),
                )
            elif spec.facet is not None:
                if "facetDirection" in opt:
                    spec.facet.direction = opt["facetDirection"]
                if "maxPerRow" in opt:
                    spec.facet.maxPerRow = opt["maxPerRow"]
        return

    if role == "mark":
        if action == "add":
            base = spec.layers[0]
            spec.layers.append(MarkLayer(
                markType=opt.get("markType", base.markType),
                encodings=[EncodingDef(**{**e.to_dict(), "scaleHints": None})
                           for e in base.encodings],
            ))
            return
        layer = _layer_for(spec, sel)
        if action == "remove":
            spec.layers.remove(layer)
            return
        if action == "duplicate":
            clone = MarkLayer.from_dict(layer.to_dict(), "layer")
            spec.layers.append(clone)
            return
        # modify / replace
        if "markType" in opt:
            _convert_mark_type(layer, opt["markType"])
        for key in ("fill", "opacity", "strokeWidth", "pointOnLine"):
            if key in opt:
                setattr(layer.style, key, opt[key])
        return

    if role == "encoding":
        if action == "transpose":
            _transpose_layout(spec)
            return
        if action == "remove":
            for layer in spec.layers:
                layer.encodings = [e for e in layer.encodings if e.channel != sel]
            return
        if action == "add":
            layer = spec.layers[0]
            existing = layer.encoding(sel)
            if existing is None:
                layer.encodings.append(EncodingDef(
                    channel=sel,
                    field=opt.get("field", ""),
                    type=opt.get("type", "nominal"),
                    aggregate=opt.get("aggregate", "none"),
                    bin=opt.get("bin"),
                ))
                return
            # adding over an occupied channel degrades to modify
            action = "modify"
        if action == "replace":
            fresh = EncodingDef(
                channel=sel,
                field=opt.get("field", ""),
                type=opt.get("type", "nominal"),
                aggregate=opt.get("aggregate", "none"),
                bin=opt.get("bin"),
            )
            for layer in spec.layers:
                for i, e in enumerate(layer.encodings):
                    if e.channel == sel:
                        layer.encodings[i] = EncodingDef(**{
                            **fresh.to_dict(), "scaleHints": None})
            return
        for layer in spec.layers:     # modify hits every layer sharing the channel
            enc = layer.encoding(sel)
            if enc is None:
                continue
            if "field" in opt:
                enc.field = opt["field"]
            if "type" in opt:
                enc.type = opt["type"]
            if "aggregate" in opt:
                enc.aggregate = opt["aggregate"] if opt["aggregate"] is not None else "none"
            if "bin" in opt:
                enc.bin = opt["bin"]
        return

    if role == "axis":
        axis = spec.axes.setdefault(sel, AxisDef())
        if action == "remove":
            axis.visible = False
            return
        if action == "add" and "visible" not in opt:
            axis.visible = True
        for key in ("visible", "labelVisible", "tickCount", "labelFormat", "labelAngle"):
            if key in opt:
                setattr(axis, key, opt[key])
        return

    if role == "legend":
        if action == "add":
            current = spec.legends.get(sel)
            spec.legends[sel] = LegendDef(
                visible=opt.get("visible", True),
                position=opt.get("position", current.position if current else "right"),
            )
            return
        legend = spec.legends[sel]
        if action == "remove":
            legend.visible = False
            return
        if "visible" in opt:
            legend.visible = opt["visible"]
        if "position" in opt:
            legend.position = opt["position"]
        return

    if role == "annotation":
        if action == "add":
            spec.annotations.append(Annotation(
                id=opt.get("id", sel),
                text=opt.get("text", ""),
                anchorKey=opt.get("anchorKey"),
                anchorX=opt.get("anchorX"),
                anchorY=opt.get("anchorY"),
                dx=opt.get("dx", 0.0),
                dy=opt.get("dy", 0.0),
                width=opt.get("width", 120.0),
                tickLine=opt.get("tickLine", False),
                placement=opt.get("placement", "inChart"),
            ))
            return
        ann = spec.annotation(sel)
        if action == "remove":
            spec.annotations.remove(ann)
            return
        if action == "duplicate":
            clone = Annotation.from_dict(ann.to_dict(), "annotation")
            clone.id = opt.get("id", ann.id + "-copy")
            spec.annotations.append(clone)
            return
        if action == "reposition":
            if "anchorKey" in opt:
                ann.anchorKey = opt["anchorKey"]
                ann.anchorX = ann.anchorY = None
            elif "anchorX" in opt or "anchorY" in opt:
                ann.anchorX = opt.get("anchorX", ann.anchorX)
                ann.anchorY = opt.get("anchorY", ann.anchorY)
                ann.anchorKey = None
            if "dx" in opt:
                ann.dx = opt["dx"]
            if "dy" in opt:
                ann.dy = opt["dy"]
            return
        for key in ("text", "width", "tickLine", "placement", "dx", "dy"):
            if key in opt:
                setattr(ann, key, opt[key])
        return

    if role == "title":
        if action == "add":
            spec.title = TitleDef(
                text=opt.get("text", spec.title.text),
                placement=opt.get("placement", spec.title.placement),
            )
            return
        if action == "remove":
            spec.title.text = ""
            return
        if "text" in opt:
            spec.title.text = opt["text"]
        if "placement" in opt:
            spec.title.placement = opt["placement"]
        return

    if role == "tooltip":
        tooltip = _layer_for(spec, sel).tooltip
        if action == "add":
            tooltip.enabled = True
            if "fixedPosition" in opt:
                tooltip.fixedPosition = opt["fixedPosition"]
            return
        if action == "remove":
            tooltip.enabled = False
            tooltip.fixedPosition = "none"
            return
        if "enabled" in opt:
            tooltip.enabled = opt["enabled"]
        if "fixedPosition" in opt:
            tooltip.fixedPosition = opt["fixedPosition"]
        return

    if role == "data":
        if action == "remove":
            spec.transform = None
            return
        if "filterTopK" in opt or "filterField" in opt:
            spec.transform = DataTransform(
                filterField=opt.get("filterField"),
                filterTopK=opt.get("filterTopK"),
            )
        if "aggregate" in opt:
            target = _aggregation_target(spec)
            for layer in spec.layers:
                enc = layer.encoding(target)
                if enc is not None:
                    enc.aggregate = opt["aggregate"]
            if "bins" in opt:
                other = "x" if target != "x" else "y"
                enc = spec.encoding(other)
                if enc is not None and enc.type in ("temporal", "quantitative"):
                    extent = _field_extent(spec, enc.field)
                    if extent is not None and extent[1] > extent[0]:
                        width = (extent[1] - extent[0]) / opt["bins"]
                        for layer in spec.layers:
                            e = layer.encoding(other)
                            if e is not None:
                                e.bin = width
        return

    raise CompileError(f"unhandled rule role '{role}'")


# ---------------------------------------------------------------------------
# descriptions


@dataclass
class RuleDescription:
    summary: str
    rationale: Optional[str] = None

    def to_dict(self):
        return {"summary": self.summary, "rationale": self.rationale}


def _num(v) -> str:
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return f"{v:g}" if isinstance(v, float) else str(v)


def _describe(r: TransformRule) -> str:
    role, sel, action, opt = r.specifier.role, r.specifier.selector, r.action, r.option

    if role == "size":
        w, h = opt.get("width"), opt.get("height")
        if w is not None and h is not None:
            text = f"Resize chart to {_num(w)}×{_num(h)} px"
        elif w is not None:
            text = f"Resize chart to {_num(w)} px wide"
        else:
            text = f"Resize chart to {_num(h)} px tall"
        if "fontScale" in opt:
            text += f" (fonts ×{_num(opt['fontScale'])})"
        return text

    if action == "transpose":
        return "Transpose the x and y axes"

    if role == "mark":
        if action == "remove":
            return f"Remove layer {0 if sel is None else sel}"
        if action == "duplicate":
            return f"Duplicate layer {0 if sel is None else sel}"
        if action == "add":
            return f"Add a {opt.get('markType', 'mark')} layer"
        parts = []
        if "markType" in opt:
            parts.append(f"Change the mark type to {opt['markType']}")
        style_bits = [f"{k} {_num(v) if not isinstance(v, bool) else str(v).lower()}"
                      for k, v in sorted(opt.items()) if k != "markType"]
        if style_bits:
            parts.append(f"Adjust mark style ({', '.join(style_bits)})")
        return "; ".join(parts) if parts else "Adjust the mark"

    if role == "encoding":
        if action == "remove":
            return f"Remove the {sel} encoding"
        if action == "add":
            return f"Map '{opt.get('field', '?')}' to {sel}"
        if action == "replace":
            return f"Encode '{opt.get('field', '?')}' on {sel}"
        if "aggregate" in opt and opt["aggregate"] not in (None, "none"):
            return f"Aggregate the {sel} values ({opt['aggregate']})"
        if "aggregate" in opt:
            return f"Disaggregate the {sel} values"
        if "bin" in opt and opt["bin"] is None:
            return f"Unbin the {sel} encoding"
        if "bin" in opt:
            return f"Bin the {sel} encoding"
        if "field" in opt:
            return f"Switch the {sel} encoding to '{opt['field']}'"
        return f"Adjust the {sel} encoding"

    if role == "axis":
        clauses = []
        if action == "remove" or opt.get("visible") is False:
            clauses.append(f"Hide the {sel} axis")
        elif action == "add" or opt.get("visible") is True:
            clauses.append(f"Show the {sel} axis")
        if opt.get("labelVisible") is True:
            clauses.append(f"Show {sel}-axis labels")
        elif opt.get("labelVisible") is False:
            clauses.append(f"Hide {sel}-axis labels")
        if "tickCount" in opt:
            clauses.append(f"Limit the {sel} axis to {opt['tickCount']} ticks")
        if "labelFormat" in opt:
            clauses.append(f"Format {sel}-axis labels as '{opt['labelFormat']}'")
        if "labelAngle" in opt:
            clauses.append(f"Angle {sel}-axis labels {_num(opt['labelAngle'])}°")
        return "; ".join(clauses) if clauses else f"Adjust the {sel} axis"

    if role == "legend":
        if action == "remove" or opt.get("visible") is False:
            return f"Hide the {sel} legend"
        if "position" in opt:
            return f"Move the {sel} legend to the {opt['position']}"
        if action == "add" or opt.get("visible") is True:
            return f"Show the {sel} legend"
        return f"Adjust the {sel} legend"

    if role == "annotation":
        if action == "add":
            return f"Add annotation '{opt.get('id', sel)}'"
        if action == "remove":
            return f"Remove annotation '{sel}'"
        if action == "duplicate":
            return f"Duplicate annotation '{sel}'"
        if action == "reposition":
            return f"Reposition annotation '{sel}'"
        if opt.get("placement") == "outOfChart":
            return f"Move annotation '{sel}' out of the chart"
        if opt.get("placement") == "inChart":
            return f"Move annotation '{sel}' into the chart"
        if opt.get("tickLine") is True:
            return f"Add a tick line to annotation '{sel}'"
        if opt.get("tickLine") is False:
            return f"Remove the tick line from annotation '{sel}'"
        if "width" in opt:
            return f"Wrap annotation '{sel}' at {_num(opt['width'])} px"
        if "text" in opt:
            return f"Rewrite annotation '{sel}'"
        return f"Adjust annotation '{sel}'"

    if role == "title":
        if action == "add":
            return "Add a chart title"
        if action == "remove":
            return "Remove the chart title"
        if opt.get("placement") == "internal":
            return "Move the title into the chart area"
        if opt.get("placement") == "external":
            return "Move the title above the chart"
        if "text" in opt:
            return "Rewrite the chart title"
        return "Adjust the chart title"

    if role == "layout":
        if action == "remove":
            return "Merge facets into a single chart"
        if "facetField" in opt:
            return f"Facet into small multiples by '{opt['facetField']}'"
        if "facetDirection" in opt:
            return f"Arrange facets as {opt['facetDirection']}"
        if "maxPerRow" in opt:
            return f"Wrap facets at {opt['maxPerRow']} per row"
        return "Adjust the layout"

    if role == "data":
        if action == "remove":
            return "Drop the row filter"
        if "filterTopK" in opt:
            return f"Keep the top {opt['filterTopK']} rows by '{opt.get('filterField', '?')}'"
        if "aggregate" in opt:
            text = f"Aggregate values ({opt['aggregate']})"
            if "bins" in opt:
                text += f" over {opt['bins']} bins"
            return text
        return "Adjust the data transform"

    if role == "tooltip":
        if action == "add":
            return "Add a tooltip"
        if action == "remove":
            return "Remove the tooltip"
        if opt.get("fixedPosition") == "bottom":
            return "Fix the tooltip position at the bottom"
        if opt.get("fixedPosition") == "none":
            return "Let the tooltip follow the pointer"
        return "Adjust the tooltip"

    return f"{action} {role}"


def describe_rules(rules: list, verbosity: str = "transformationsOnly") -> list:
    """Human-readable descriptions, one per rule.

    ``verbosity`` is ``transformationsOnly`` or ``withRationales``; the
    rationale text comes from the rule's strategy tag, falling back to a
    per-role default.
    """
    if verbosity not in ("transformationsOnly", "withRationales"):
        raise SchemaError("verbosity must be transformationsOnly or withRationales",
                          "describe")
    out = []
    for r in rules:
        rationale = None
        if verbosity == "withRationales":
            tag = r.rationale or _DEFAULT_RATIONALE.get(r.specifier.role, "minimizeChanges")
            rationale = RATIONALE_TEXT[tag]
        out.append(RuleDescription(summary=_describe(r), rationale=rationale))
    return out


# ---------------------------------------------------------------------------
# merging user edits with suggestion rules


def merge_user_edits(base: VisSpec, suggestion_rules: list, user_rules: list):
    """Layer user edits on top of suggestion rules.

    Returns ``(merged_rules, dropped)`` where ``dropped`` is a list of
    ``(rule, reason)`` pairs for user rules that no longer apply once the
    suggestion rules have run (their target disappeared, or they stopped
    compiling).  Drops are reported, never raised.
    """
    merged = list(suggestion_rules)
    dropped = []
    work = apply_rules(base, suggestion_rules)
    for r in user_rules:
        reason = skip_reason(work, r)
        if reason is not None:
            dropped.append((r, reason))
            continue
        try:
            work = apply_rules(work, [r])
        except CompileError as e:
            dropped.append((r, str(e)))
            continue
        merged.append(r)
    return merged, dropped


__all__ = [
    "PROVENANCE_KINDS", "ACTIONS", "ROLE_ACTIONS", "ROLE_OPTIONS",
    "RATIONALE_TAGS", "RATIONALE_TEXT",
    "Provenance", "TransformRule", "RuleDescription",
    "rule", "validate_rule", "rules_from_json", "rules_to_json",
    "rule_signature", "suggestion_signature",
    "apply_rules", "apply_rules_verbose", "rule_applies", "skip_reason",
    "describe_rules", "merge_user_edits",
]
