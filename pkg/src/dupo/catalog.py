"""Strategy catalog: data-driven templates for the recommendation pipelines.

Entries live in ``data/strategy_catalog.json`` (override with DUPO_CATALOG).
Each entry carries a condition list evaluated against the spec and device
pair, plus rule templates whose ``$placeholders`` are resolved against the
spec at instantiation time.  Conditions are AND-ed; a missing placeholder
disqualifies the entry rather than erroring.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import devices
from .errors import SchemaError
from .rules import (
    ROLE_ACTIONS, RATIONALE_TEXT, TransformRule, validate_rule,
)
from .visspec import (
    CHANNELS, DEVICE_CLASSES, FACET_CARDINALITY_LIMIT, DeviceProfile, VisSpec,
    iso_to_ms,
)

LEVELS = ("exploration", "alteration", "quickEdit")
DIRECTIONS = ("desktopFirst", "mobileFirst", "simultaneous")

# actions a non-drastic variant may use
GENTLE_ACTIONS = ("resize", "transpose")

# what the low-level pipeline may touch on a mark besides nothing
ALTERATION_MARK_OPTIONS = ("fill", "opacity", "strokeWidth", "pointOnLine")
ALTERATION_ROLES = ("axis", "legend", "annotation", "title", "tooltip", "mark")

TRIGGER_QUALIFIERS = ("near", "far", "smaller", "larger")

_ATOMS = (
    "markIn", "hasChannel", "lacksChannel", "channelType", "channelTypeIn",
    "channelCardinalityMax", "channelCardinalityMin", "rowsMin", "rowsMax",
    "targetSmaller", "targetLarger", "targetNarrower", "direction",
    "sourceClass", "targetClass", "facet", "facetable", "aggregated",
    "filtered", "hasAnnotations", "annotationsInChart", "annotationsOutOfChart",
    "annotationTickLine", "annotationPlacement", "titlePresent",
    "titlePlacement", "titleShortMax", "tooltipEnabled", "axisLabelsVisible",
    "legendVisible", "legendPositionIn", "hasPositional", "targetAspectFlipped",
    "targetPortrait", "targetDiffers", "labelFormatEmpty", "labelAngleZero",
    "tickCountMin", "strokeWidthMax", "fontScaleMax",
)


@dataclass
class TriggerSpec:
    role: str
    action: str
    selector: Optional[str] = None
    qualifier: Optional[str] = None


@dataclass
class StrategyEntry:
    id: str
    level: str
    description: str
    rationale: str
    rules: list
    drastic: bool = False
    when: list = field(default_factory=list)
    trigger: Optional[TriggerSpec] = None
    devices: list = field(default_factory=list)
    stateWhen: list = field(default_factory=list)


@dataclass
class StrategyContext:
    """Everything a condition or placeholder can see."""

    spec: VisSpec
    source_device: DeviceProfile
    target_device: DeviceProfile
    last_selector: Optional[str] = None

    @property
    def direction(self) -> str:
        return devices.edit_direction(self.source_device.cls)


class Catalog:
    def __init__(self, entries: list):
        self.entries = list(entries)
        ids = [e.id for e in entries]
        if len(set(ids)) != len(ids):
            raise SchemaError("duplicate strategy ids in catalog")

    def level(self, level: str) -> list:
        return [e for e in self.entries if e.level == level]

    @property
    def exploration(self):
        return self.level("exploration")

    @property
    def alteration(self):
        return self.level("alteration")

    @property
    def quick_edits(self):
        return self.level("quickEdit")

    def entry(self, entry_id: str) -> Optional[StrategyEntry]:
        for e in self.entries:
            if e.id == entry_id:
                return e
        return None


def default_catalog_path() -> Path:
    return Path(__file__).parent / "data" / "strategy_catalog.json"


def load_catalog(path=None) -> Catalog:
    p = Path(path or os.environ.get("DUPO_CATALOG") or default_catalog_path())
    try:
        raw = json.loads(p.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read strategy catalog: {exc}", path=str(p))
    if not isinstance(raw, list):
        raise SchemaError("strategy catalog must be a JSON array", path=str(p))
    entries = [_parse_entry(d, i) for i, d in enumerate(raw)]
    return Catalog(entries)


def _parse_entry(d: dict, i: int) -> StrategyEntry:
    where = f"catalog[{i}]"
    if not isinstance(d, dict):
        raise SchemaError("entry must be an object", path=where)
    for key in ("id", "level", "description", "rationale", "rules"):
        if key not in d:
            raise SchemaError(f"missing '{key}'", path=where)
    if d["level"] not in LEVELS:
        raise SchemaError(f"unknown level '{d['level']}'", path=where)
    if d["rationale"] not in RATIONALE_TEXT:
        raise SchemaError(f"unknown rationale '{d['rationale']}'", path=where)
    trigger = None
    if d["level"] == "quickEdit":
        t = d.get("trigger")
        if not isinstance(t, dict) or "role" not in t or "action" not in t:
            raise SchemaError("quickEdit entry needs a trigger", path=where)
        if t["role"] not in ROLE_ACTIONS:
            raise SchemaError(f"unknown trigger role '{t['role']}'", path=where)
        q = t.get("qualifier")
        if q is not None and q not in TRIGGER_QUALIFIERS:
            raise SchemaError(f"unknown trigger qualifier '{q}'", path=where)
        trigger = TriggerSpec(role=t["role"], action=t["action"],
                              selector=t.get("selector"), qualifier=q)
    elif "trigger" in d:
        raise SchemaError("only quickEdit entries may carry a trigger", path=where)

    for cond_key in ("when", "stateWhen"):
        for c in d.get(cond_key, []):
            if not isinstance(c, dict) or len(c) != 1:
                raise SchemaError("condition must be a single-key object", path=where)
            name = next(iter(c))
            if name not in _ATOMS:
                raise SchemaError(f"unknown condition '{name}'", path=where)

    rules = d["rules"]
    if not isinstance(rules, list) or not rules:
        raise SchemaError("rules must be a non-empty array", path=where)
    for r in rules:
        if not isinstance(r, dict) or "role" not in r or "action" not in r:
            raise SchemaError("rule template needs role and action", path=where)
        if r["role"] not in ROLE_ACTIONS:
            raise SchemaError(f"unknown role '{r['role']}'", path=where)
        if r["action"] not in ROLE_ACTIONS[r["role"]]:
            raise SchemaError(
                f"action '{r['action']}' not allowed for role '{r['role']}'",
                path=where)

    entry = StrategyEntry(
        id=d["id"], level=d["level"], description=d["description"],
        rationale=d["rationale"], rules=rules, drastic=bool(d.get("drastic", False)),
        when=list(d.get("when", [])), trigger=trigger,
        devices=list(d.get("devices", [])), stateWhen=list(d.get("stateWhen", [])),
    )
    for cls in entry.devices:
        if cls not in DEVICE_CLASSES:
            raise SchemaError(f"unknown device class '{cls}'", path=where)
    _check_level_constraints(entry, where)
    return entry


def _check_level_constraints(entry: StrategyEntry, where: str) -> None:
    if entry.level == "exploration" and not entry.drastic:
        for r in entry.rules:
            if r["action"] not in GENTLE_ACTIONS:
                raise SchemaError(
                    "non-drastic entries may only resize or transpose", path=where)
    if entry.level == "alteration":
        for r in entry.rules:
            if r["role"] not in ALTERATION_ROLES:
                raise SchemaError(
                    f"alteration entries may not touch '{r['role']}'", path=where)
            if r["role"] == "mark":
                bad = set(r.get("option", {})) - set(ALTERATION_MARK_OPTIONS)
                if bad:
                    raise SchemaError(
                        f"alteration mark rules may not set {sorted(bad)}", path=where)


# ---------------------------------------------------------------------------
# condition evaluation


def _display_area(p: DeviceProfile) -> float:
    return devices.display_width(p) * devices.display_height(p)


def _enc(spec: VisSpec, ch: str):
    return spec.encoding(ch)


def _cardinality(spec: VisSpec, ch: str) -> Optional[int]:
    e = _enc(spec, ch)
    if e is None:
        return None
    return spec.dataset.cardinality(e.field)


def eval_condition(cond: dict, ctx: StrategyContext) -> bool:
    name = next(iter(cond))
    arg = cond[name]
    spec = ctx.spec
    if name == "markIn":
        return any(layer.markType in arg for layer in spec.layers)
    if name == "hasChannel":
        return _enc(spec, arg) is not None
    if name == "lacksChannel":
        return _enc(spec, arg) is None
    if name == "channelType":
        e = _enc(spec, arg[0])
        return e is not None and e.type == arg[1]
    if name == "channelTypeIn":
        e = _enc(spec, arg[0])
        return e is not None and e.type in arg[1]
    if name == "channelCardinalityMax":
        c = _cardinality(spec, arg[0])
        return c is not None and c <= arg[1]
    if name == "channelCardinalityMin":
        c = _cardinality(spec, arg[0])
        return c is not None and c >= arg[1]
    if name == "rowsMin":
        return len(spec.dataset.rows) >= arg
    if name == "rowsMax":
        return len(spec.dataset.rows) <= arg
    if name == "targetSmaller":
        return (_display_area(ctx.target_device) < _display_area(ctx.source_device)) == arg
    if name == "targetLarger":
        return (_display_area(ctx.target_device) > _display_area(ctx.source_device)) == arg
    if name == "targetNarrower":
        smaller = devices.display_width(ctx.target_device) < devices.display_width(ctx.source_device)
        return smaller == arg
    if name == "direction":
        return ctx.direction == arg
    if name == "sourceClass":
        return ctx.source_device.cls in arg
    if name == "targetClass":
        return ctx.target_device.cls in arg
    if name == "facet":
        return (spec.facet is not None) == arg
    if name == "facetable":
        e = _enc(spec, arg)
        if e is None or e.type not in ("nominal", "ordinal"):
            return False
        c = spec.dataset.cardinality(e.field)
        return 1 < c <= FACET_CARDINALITY_LIMIT
    if name == "aggregated":
        has = any(e.aggregate != "none" for layer in spec.layers for e in layer.encodings)
        return has == arg
    if name == "filtered":
        active = spec.transform is not None and spec.transform.filterTopK is not None
        return active == arg
    if name == "hasAnnotations":
        return bool(spec.annotations) == arg
    if name == "annotationsInChart":
        return any(a.placement == "inChart" for a in spec.annotations) == arg
    if name == "annotationsOutOfChart":
        return any(a.placement == "outOfChart" for a in spec.annotations) == arg
    if name == "annotationTickLine":
        a = spec.annotation(_resolve_selector_token(arg[0], ctx))
        return a is not None and a.tickLine == arg[1]
    if name == "annotationPlacement":
        a = spec.annotation(_resolve_selector_token(arg[0], ctx))
        return a is not None and a.placement == arg[1]
    if name == "titlePresent":
        return bool(spec.title.text) == arg
    if name == "titlePlacement":
        return bool(spec.title.text) and spec.title.placement == arg
    if name == "titleShortMax":
        return bool(spec.title.text) and len(spec.title.text) <= arg
    if name == "tooltipEnabled":
        return any(layer.tooltip.enabled for layer in spec.layers) == arg
    if name == "axisLabelsVisible":
        ch, want = arg
        if _enc(spec, ch) is None:
            return False
        axis = spec.axes.get(ch)
        visible = axis is None or (axis.visible and axis.labelVisible)
        return visible == want
    if name == "legendVisible":
        ch, want = arg
        entry = spec.legends.get(ch)
        visible = (_enc(spec, ch) is not None and entry is not None and entry.visible)
        return visible == want
    if name == "legendPositionIn":
        ch, positions = arg
        entry = spec.legends.get(ch)
        return (entry is not None and entry.visible
                and _enc(spec, ch) is not None and entry.position in positions)
    if name == "hasPositional":
        return any(_enc(spec, ch) is not None for ch in ("x", "y")) == arg
    if name == "targetAspectFlipped":
        src = devices.display_width(ctx.source_device) - devices.display_height(ctx.source_device)
        tgt = devices.display_width(ctx.target_device) - devices.display_height(ctx.target_device)
        return ((src > 0) != (tgt > 0)) == arg
    if name == "targetPortrait":
        portrait = devices.display_height(ctx.target_device) > devices.display_width(ctx.target_device)
        return portrait == arg
    if name == "targetDiffers":
        return (ctx.target_device.name != ctx.source_device.name) == arg
    if name == "labelFormatEmpty":
        axis = spec.axes.get(arg)
        return axis is None or axis.labelFormat == ""
    if name == "labelAngleZero":
        axis = spec.axes.get(arg)
        return axis is None or axis.labelAngle == 0
    if name == "tickCountMin":
        ch, n = arg
        if _enc(spec, ch) is None:
            return False
        axis = spec.axes.get(ch)
        count = axis.tickCount if axis is not None else 5
        return count >= n
    if name == "strokeWidthMax":
        return all(layer.style.strokeWidth <= arg for layer in spec.layers)
    if name == "fontScaleMax":
        return spec.fontScale <= arg
    raise SchemaError(f"unknown condition '{name}'")


def eval_conditions(conds: list, ctx: StrategyContext) -> bool:
    return all(eval_condition(c, ctx) for c in conds)


# ---------------------------------------------------------------------------
# placeholder resolution


class PlaceholderError(Exception):
    """A template placeholder has no value for this spec; skip the entry."""


def _resolve_selector_token(token, ctx: StrategyContext):
    if token == "$lastSelector":
        if ctx.last_selector is None:
            raise PlaceholderError("$lastSelector")
        return ctx.last_selector
    return token


def _primary_quant_field(spec: VisSpec) -> str:
    for ch in ("y", "x", "color", "size"):
        e = spec.encoding(ch)
        if e is not None and e.type == "quantitative":
            return e.field
    raise PlaceholderError("$primaryQuantField")


def _field_extent(spec: VisSpec, ch: str):
    e = spec.encoding(ch)
    if e is None:
        raise PlaceholderError(f"$bin:{ch}")
    vals = []
    for r in spec.dataset.rows:
        v = r.get(e.field)
        if v is None:
            continue
        vals.append(iso_to_ms(v) if e.type == "temporal" else v)
    nums = [v for v in vals if isinstance(v, (int, float))]
    if not nums or max(nums) <= min(nums):
        raise PlaceholderError(f"$bin:{ch}")
    return min(nums), max(nums)


def resolve_placeholder(token: str, ctx: StrategyContext):
    spec = ctx.spec
    src_w = devices.display_width(ctx.source_device)
    tgt_w = devices.display_width(ctx.target_device)
    tgt_h = devices.display_height(ctx.target_device)
    scale = tgt_w / src_w if src_w else 1.0

    if token == "$fitWidth":
        return max(80, round(spec.width * scale))
    if token == "$fitHeight":
        return max(80, round(spec.height * scale))
    if token == "$fitFontScale":
        return round(min(1.25, max(0.8, scale)), 2)
    if token == "$snapWidth":
        return max(80, round(0.92 * tgt_w))
    if token == "$snapHeight":
        return max(80, round(0.92 * tgt_h))
    if token == "$portraitWidth":
        return max(80, round(0.92 * tgt_w))
    if token == "$portraitHeight":
        return max(80, round(0.92 * tgt_w * 4 / 3))
    if token == "$squareSide":
        return max(80, round(0.92 * min(tgt_w, tgt_h)))
    if token == "$narrowWidth":
        return max(60, round(0.22 * spec.width))
    if token == "$primaryQuantField":
        return _primary_quant_field(spec)
    if token == "$colorField":
        e = spec.encoding("color")
        if e is None:
            raise PlaceholderError(token)
        return e.field
    if token.startswith("$field:"):
        e = spec.encoding(token.split(":", 1)[1])
        if e is None:
            raise PlaceholderError(token)
        return e.field
    if token == "$temporalBin":
        lo, hi = _field_extent(spec, "x")
        return (hi - lo) / 24
    if token.startswith("$quantBin:"):
        lo, hi = _field_extent(spec, token.split(":", 1)[1])
        return (hi - lo) / 20
    if token == "$flipFacetDirection":
        if spec.facet is None:
            raise PlaceholderError(token)
        return "rows" if spec.facet.direction == "columns" else "columns"
    if token == "$lastSelector":
        return _resolve_selector_token(token, ctx)
    raise PlaceholderError(token)


def _resolve_value(v, ctx: StrategyContext):
    if isinstance(v, str) and v.startswith("$"):
        return resolve_placeholder(v, ctx)
    return v


def instantiate_rules(entry: StrategyEntry, ctx: StrategyContext):
    """Rule templates -> concrete rules, or None when a placeholder is dry."""
    try:
        out = []
        for template in entry.rules:
            selectors = [template.get("selector")]
            if selectors[0] == "$eachAnnotation":
                selectors = [a.id for a in ctx.spec.annotations]
                if not selectors:
                    return None
            elif isinstance(selectors[0], str) and selectors[0].startswith("$"):
                selectors = [_resolve_selector_token(selectors[0], ctx)]
            for sel in selectors:
                option = None
                if template.get("option") is not None:
                    option = {k: _resolve_value(v, ctx)
                              for k, v in template["option"].items()}
                r = TransformRule.from_dict({
                    "specifier": {"role": template["role"], "selector": sel},
                    "action": template["action"],
                    "option": option,
                    "rationale": template.get("rationale", entry.rationale),
                }, path=f"strategy {entry.id}")
                validate_rule(r)
                out.append(r)
        return out
    except PlaceholderError:
        return None


__all__ = [
    "LEVELS", "DIRECTIONS", "GENTLE_ACTIONS", "TRIGGER_QUALIFIERS",
    "TriggerSpec", "StrategyEntry", "StrategyContext", "Catalog",
    "default_catalog_path", "load_catalog", "eval_condition",
    "eval_conditions", "resolve_placeholder", "instantiate_rules",
    "PlaceholderError",
]
