#!/usr/bin/env python3
"""Regenerate docs/openapi.json from the live app."""

import json
import sys
import tempfile
from pathlib import Path

from dupo.service import create_app

OUT = Path(__file__).resolve().parent.parent / "docs" / "openapi.json"


def main() -> int:
    with tempfile.TemporaryDirectory() as tmp:
        app = create_app(data_dir=tmp)
        doc = app.openapi()
    doc["info"]["version"] = "0.1.0"
    OUT.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {OUT} ({len(doc.get('paths', {}))} paths)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
