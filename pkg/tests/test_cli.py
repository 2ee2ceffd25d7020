import csv
import json
import time

from click.testing import CliRunner

import fixtures as fx
from dupo import Studio
from dupo.cli import main


def write_spec(path, spec):
    path.write_text(json.dumps(spec.to_dict()), encoding="utf-8")
    return str(path)


def test_validate_ok_and_bad(tmp_path):
    runner = CliRunner()
    good = write_spec(tmp_path / "good.json", fx.line_chart(30))
    assert runner.invoke(main, ["validate", good]).exit_code == 0

    bad = fx.line_chart(30).to_dict()
    bad["layers"][0]["markType"] = "hologram"
    (tmp_path / "bad.json").write_text(json.dumps(bad), encoding="utf-8")
    result = runner.invoke(main, ["validate", str(tmp_path / "bad.json")])
    assert result.exit_code == 2

    result = runner.invoke(main, ["validate", str(tmp_path / "missing.json")])
    assert result.exit_code == 2


def test_recommend_writes_ranked_artifacts(tmp_path):
    runner = CliRunner()
    spec = write_spec(tmp_path / "line.json", fx.line_chart(200))
    out = tmp_path / "out"
    started = time.perf_counter()
    result = runner.invoke(main, [
        "recommend", "--spec", spec, "--target-device", "phone",
        "--max", "5", "--drastic", "0.6", "--out", str(out)])
    elapsed = time.perf_counter() - started
    assert result.exit_code == 0, result.output
    assert elapsed < 2.0

    suggestion_files = sorted(out.glob("suggestion-*.json"))
    spec_files = sorted(out.glob("spec-*.json"))
    assert len(suggestion_files) == 5
    assert len(spec_files) == 5
    for p in suggestion_files:
        payload = json.loads(p.read_text(encoding="utf-8"))
        assert {"id", "entryId", "rules", "scores", "resultSpec"} <= set(payload)

    with open(out / "scores.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 5
    assert sum(r["drastic"] == "yes" for r in rows) == 3
    combined = [float(r["combined"]) for r in rows]
    assert combined == sorted(combined)
    assert [r["rank"] for r in rows] == ["1", "2", "3", "4", "5"]


def test_recommend_requires_aggregation_option(tmp_path):
    runner = CliRunner()
    spec = write_spec(tmp_path / "line.json", fx.line_chart(200))
    result = runner.invoke(main, [
        "recommend", "--spec", spec, "--target-device", "phone", "--max", "5"])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert len(payload) >= 4
    aggregating = [
        s for s in payload
        for r in s["rules"]
        if r["action"] == "modify" and "aggregate" in (r.get("option") or {})]
    assert aggregating


def test_recommend_on_invalid_spec_writes_nothing(tmp_path):
    runner = CliRunner()
    bad = fx.line_chart(30).to_dict()
    bad["layers"] = []
    (tmp_path / "bad.json").write_text(json.dumps(bad), encoding="utf-8")
    out = tmp_path / "out"
    result = runner.invoke(main, [
        "recommend", "--spec", str(tmp_path / "bad.json"),
        "--target-device", "phone", "--out", str(out)])
    assert result.exit_code == 2
    assert not out.exists()


def test_recommend_exhaustion_exits_three(tmp_path):
    runner = CliRunner()
    spec = write_spec(tmp_path / "line.json", fx.line_chart(40))
    result = runner.invoke(main, [
        "recommend", "--spec", spec, "--target-device", "desktop"])
    assert result.exit_code == 3
    assert "stats" in result.output


def test_recommend_rejects_unknown_device(tmp_path):
    runner = CliRunner()
    spec = write_spec(tmp_path / "line.json", fx.line_chart(40))
    result = runner.invoke(main, [
        "recommend", "--spec", spec, "--target-device", "smartwatch"])
    assert result.exit_code == 2


def test_score_identity_is_all_zero_except_overplot(tmp_path):
    runner = CliRunner()
    spec = write_spec(tmp_path / "line.json", fx.line_chart(200))
    result = runner.invoke(main, ["score", "--source", spec, "--target", spec])
    assert result.exit_code == 0, result.output
    breakdown = json.loads(result.output)
    for measure in ("trend", "identification", "comparison", "text",
                    "occupation"):
        assert breakdown[measure] == 0.0
    assert breakdown["overplot"] > 0.0
    assert breakdown["combined"] > 0.0


def test_score_dump_raster_writes_pgms(tmp_path):
    runner = CliRunner()
    spec = write_spec(tmp_path / "bars.json", fx.bar_chart(8))
    raster = tmp_path / "raster"
    result = runner.invoke(main, [
        "score", "--source", spec, "--target", spec,
        "--dump-raster", str(raster)])
    assert result.exit_code == 0
    for name in ("source.pgm", "target.pgm"):
        header = (raster / name).read_bytes()[:2]
        assert header == b"P2"


def test_score_rejects_bad_weights(tmp_path):
    runner = CliRunner()
    spec = write_spec(tmp_path / "line.json", fx.line_chart(40))
    result = runner.invoke(main, [
        "score", "--source", spec, "--target", spec,
        "--weights", '{"zest": 1}'])
    assert result.exit_code == 2
    result = runner.invoke(main, [
        "score", "--source", spec, "--target", spec, "--weights", "{nope"])
    assert result.exit_code == 2


def test_describe_command(tmp_path):
    runner = CliRunner()
    rules = [{"specifier": {"role": "size"}, "action": "resize",
              "option": {"width": 320, "height": 240},
              "rationale": "fitAspect"}]
    p = tmp_path / "rules.json"
    p.write_text(json.dumps(rules), encoding="utf-8")
    result = runner.invoke(main, ["describe", str(p)])
    assert result.exit_code == 0
    assert "320" in result.output and "aspect ratio" in result.output
    result = runner.invoke(main, ["describe", str(p),
                                  "--verbosity", "transformationsOnly"])
    assert result.exit_code == 0
    assert "aspect ratio" not in result.output

    p.write_text(json.dumps([{"action": "resize"}]), encoding="utf-8")
    assert runner.invoke(main, ["describe", str(p)]).exit_code == 2


def test_export_command(tmp_path, catalog):
    studio = Studio(data_dir=str(tmp_path / "data"), catalog=catalog)
    session = studio.create_session({"spec": fx.line_chart(60).to_dict(),
                                     "devices": ["desktop", "phone"]})
    session_file = tmp_path / "data" / f"{session.id}.dupo-session.json"
    assert session_file.exists()

    runner = CliRunner()
    out = tmp_path / "page.html"
    result = runner.invoke(main, ["export", "--session", str(session_file),
                                  "--out", str(out)])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert len(payload["breakpoints"]) == 2
    html = out.read_text(encoding="utf-8")
    assert html.count("@media") == 2

    (tmp_path / "broken.json").write_text("{]", encoding="utf-8")
    result = runner.invoke(main, ["export",
                                  "--session", str(tmp_path / "broken.json"),
                                  "--out", str(out)])
    assert result.exit_code == 2
