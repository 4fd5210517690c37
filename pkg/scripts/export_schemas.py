#!/usr/bin/env python3
"""Regenerate the published JSON Schema files from the response models.

Run from the repo root after changing api/schemas.py:

    python3 scripts/export_schemas.py

The files under schemas/ are committed; the contract tests compare them
against the live models, so a drift here fails the suite until re-exported.
"""

import json
import sys
from pathlib import Path

from oncopulse.api.schemas import RESPONSE_SCHEMAS


def main() -> int:
    out_dir = Path(__file__).resolve().parent.parent / "schemas"
    out_dir.mkdir(exist_ok=True)
    for name, model in sorted(RESPONSE_SCHEMAS.items()):
        schema = model.model_json_schema()
        path = out_dir / f"{name}.json"
        path.write_text(json.dumps(schema, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
