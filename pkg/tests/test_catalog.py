import pytest

import fixtures as fx
from dupo.catalog import (
    StrategyContext, eval_condition, eval_conditions, instantiate_rules,
    load_catalog,
)
from dupo.devices import preset
from dupo.errors import SchemaError


@pytest.fixture(scope="module")
def ctx():
    return StrategyContext(spec=fx.line_chart(),
                           source_device=preset("desktop"),
                           target_device=preset("phone"))


def test_catalog_loads_three_levels(catalog):
    assert len(catalog.exploration) >= 20
    assert len(catalog.alteration) >= 10
    assert len(catalog.quick_edits) >= 8
    assert all(e.level == "quickEdit" and e.trigger is not None
               for e in catalog.quick_edits)


def test_catalog_rejects_duplicate_ids(tmp_path, catalog):
    import json
    entries = json.loads(open(
        "src/dupo/data/strategy_catalog.json").read())
    entries.append(dict(entries[0]))
    p = tmp_path / "dup.json"
    p.write_text(json.dumps(entries))
    with pytest.raises(SchemaError):
        load_catalog(str(p))


def test_device_and_direction_conditions(ctx):
    assert ctx.direction == "desktopFirst"
    assert eval_condition({"direction": "desktopFirst"}, ctx)
    assert not eval_condition({"direction": "mobileFirst"}, ctx)
    assert eval_condition({"targetSmaller": True}, ctx)
    assert eval_condition({"targetPortrait": True}, ctx)
    assert eval_condition({"targetAspectFlipped": True}, ctx)
    assert eval_condition({"targetClass": ["phone"]}, ctx)
    assert not eval_condition({"targetClass": ["social"]}, ctx)


def test_shape_conditions(ctx):
    assert eval_condition({"markIn": ["line"]}, ctx)
    assert eval_condition({"channelType": ["x", "temporal"]}, ctx)
    assert eval_condition({"hasChannel": "color"}, ctx)
    assert eval_condition({"lacksChannel": "size"}, ctx)
    assert eval_condition({"rowsMin": 200}, ctx)
    assert not eval_condition({"rowsMin": 201}, ctx)
    assert eval_condition({"channelCardinalityMax": ["color", 3]}, ctx)
    assert not eval_condition({"channelCardinalityMax": ["color", 2]}, ctx)
    assert eval_condition({"aggregated": False}, ctx)
    assert eval_condition({"hasAnnotations": True}, ctx)
    assert eval_condition({"annotationsInChart": True}, ctx)
    assert eval_condition({"titlePlacement": "external"}, ctx)
    assert eval_condition({"legendVisible": ["color", True]}, ctx)
    assert eval_condition({"legendPositionIn": ["color", ["right"]]}, ctx)


def test_selector_token_conditions(ctx):
    ctx2 = StrategyContext(spec=ctx.spec, source_device=ctx.source_device,
                           target_device=ctx.target_device,
                           last_selector="note-peak")
    assert eval_condition({"annotationTickLine": ["$lastSelector", True]}, ctx2)
    assert eval_condition(
        {"annotationPlacement": ["$lastSelector", "inChart"]}, ctx2)


def test_unknown_condition_raises(ctx):
    with pytest.raises(SchemaError):
        eval_condition({"sparkles": True}, ctx)


def test_eval_conditions_is_conjunction(ctx):
    assert eval_conditions([{"markIn": ["line"]},
                            {"targetSmaller": True}], ctx)
    assert not eval_conditions([{"markIn": ["line"]},
                                {"targetLarger": True}], ctx)
    assert eval_conditions([], ctx)


def test_instantiate_resolves_fit_placeholders(catalog, ctx):
    entry = catalog.entry("resize-fit-display")
    rules = instantiate_rules(entry, ctx)
    opt = rules[0].option
    # phone display: 375 * 96/163 wide, fits inside with margins
    assert 0 < opt["width"] <= 230
    assert opt["height"] > 0
    assert 0.5 <= opt.get("fontScale", 1.0) <= 1.5


def test_instantiate_aggregation_picks_bin_count(catalog, ctx):
    entry = catalog.entry("aggregate-over-time")
    rules = instantiate_rules(entry, ctx)
    data_rules = [r for r in rules if r.specifier.role == "data"]
    assert data_rules and data_rules[0].option.get("bins", 0) >= 4


def test_rules_carry_the_entry_rationale(catalog, ctx):
    entry = catalog.entry("resize-proportional")
    rules = instantiate_rules(entry, ctx)
    assert all(r.rationale == entry.rationale for r in rules)
