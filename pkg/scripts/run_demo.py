#!/usr/bin/env python3
"""End-to-end walkthrough: author a desktop chart, grow it responsive.

Creates a studio session for a 90-day line chart, duplicates it onto tablet
and phone, walks the phone artboard through an exploration batch, applies the
top suggestion, triggers a quick edit by hand-editing the tooltip, and writes
the exported HTML bundle next to this script (or to --out).

No server involved; this drives the studio layer directly.
"""

import argparse
import math
import random
import sys
import tempfile
from datetime import date, timedelta
from pathlib import Path

from dupo import Studio, describe_rules, export_session, load_catalog


def demo_spec() -> dict:
    rng = random.Random(17)
    rows = []
    start = date(2026, 1, 1)
    for day in range(90):
        stamp = (start + timedelta(days=day)).isoformat()
        for channel, base, amp in (("search", 140, 40),
                                   ("social", 90, 25),
                                   ("direct", 60, 10)):
            value = base + amp * math.sin(day / 9.0) + rng.uniform(-12, 12)
            rows.append({"date": stamp, "channel": channel,
                         "visits": round(value, 1)})
    return {
        "dataset": {
            "name": "traffic",
            "fields": [
                {"name": "date", "type": "temporal"},
                {"name": "visits", "type": "quantitative"},
                {"name": "channel", "type": "nominal"},
            ],
            "rows": rows,
        },
        "layers": [{
            "markType": "line",
            "encodings": [
                {"channel": "x", "field": "date", "type": "temporal"},
                {"channel": "y", "field": "visits", "type": "quantitative"},
                {"channel": "color", "field": "channel", "type": "nominal"},
            ],
        }],
        "title": {"text": "Daily visits by channel"},
        "legends": {"color": {"visible": True, "position": "right"}},
        "width": 720,
        "height": 420,
    }


def show_batch(batch) -> None:
    for i, sug in enumerate(batch.suggestions, 1):
        texts = describe_rules(sug.rules, verbosity="withRationales")
        kind = "drastic" if sug.drastic else "gentle "
        print(f"  {i}. [{kind}] {sug.description}  (score {sug.scores['combined']:.4f})")
        for t in texts:
            line = t.summary + (f"  -- {t.rationale}" if t.rationale else "")
            print(f"       - {line}")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parent / "demo-export.html")
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as data_dir:
        studio = Studio(data_dir=data_dir, catalog=load_catalog())
        session = studio.create_session({
            "spec": demo_spec(),
            "devices": ["desktop", "tablet", "phone"],
        })
        print(f"session {session.id}: "
              f"{', '.join(ab.device.name for ab in session.artboards.values())}")

        phone = next(ab for ab in session.artboards.values()
                     if ab.device.name == "phone")
        studio.set_active(session, phone.id)
        batch = studio.request_suggestions(session, phone.id)
        print(f"\nexploration batch for phone ({len(batch.suggestions)} suggestions):")
        show_batch(batch)

        top = studio.sorted_suggestions(session)[0]
        studio.apply_suggestion(session, top.id)
        print(f"\napplied: {top.description}")
        print(f"  phone spec is now {phone.spec.width}x{phone.spec.height} "
              f"{phone.spec.layers[0].markType}")

        result = studio.apply_edit(session, {
            "specifier": {"role": "tooltip"},
            "action": "add",
            "option": {"enabled": True},
        }, "manual")
        offers = result["quickEdits"]
        print(f"\nmanual tooltip edit -> {len(offers)} quick edit(s) offered:")
        for q in offers:
            print(f"  - {q['description']}")
        if offers:
            studio.apply_quick_edit(session, offers[0]["id"])
            print(f"accepted: {offers[0]['description']}")

        bundle = export_session(session)
        args.out.write_text(bundle["html"])
        bounds = sorted({bp["maxWidth"] for bp in bundle["breakpoints"]
                         if bp["maxWidth"] is not None})
        bps = ", ".join(f"{b:g}px" for b in bounds)
        print(f"\nexported {args.out} ({len(bundle['html'])} bytes, "
              f"boundaries at {bps})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
