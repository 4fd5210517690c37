#!/usr/bin/env python3
"""Capture live API responses for the demo dataset as frontend fixtures.

Builds the fixture store in a temp directory, serves it through the real
app, and writes each response body to frontend/fixtures/*.json. The files
are committed; dashboard snapshot tests render straight from them, so a
payload change here means the UI contract moved and the snapshots must be
reviewed, not regenerated blindly.

    python3 scripts/export_fixture_payloads.py
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from oncopulse.api import ApiConfig, create_app
from oncopulse.fixtures import FIXTURE_DATE, FIXTURE_PATIENT_ID, build_fixture_store
from oncopulse.records import DAY_MS, date_to_ms

SHOWCASE_T0 = date_to_ms(FIXTURE_DATE)
ANOMALY_T0 = date_to_ms("2024-04-28")
TREND_FROM = SHOWCASE_T0 - 13 * DAY_MS  # 14-day trend window, selected day last

CAPTURES = [
    ("health", "/api/v1/health", {}),
    ("patients", "/api/v1/patients", {}),
    ("patient_emily", f"/api/v1/patients/{FIXTURE_PATIENT_ID}", {}),
    ("patient_maria", "/api/v1/patients/pt-maria", {}),
    ("risk_emily", f"/api/v1/patients/{FIXTURE_PATIENT_ID}/risk", {}),
    ("risk_maria", "/api/v1/patients/pt-maria/risk", {}),
    ("summary_emily", f"/api/v1/patients/{FIXTURE_PATIENT_ID}/summary",
     {"date": FIXTURE_DATE}),
    ("summary_maria", "/api/v1/patients/pt-maria/summary", {"date": FIXTURE_DATE}),
    ("conversations_emily", f"/api/v1/patients/{FIXTURE_PATIENT_ID}/conversations",
     {"date": FIXTURE_DATE}),
    ("conversations_emily_prev", f"/api/v1/patients/{FIXTURE_PATIENT_ID}/conversations",
     {"date": "2024-04-30"}),
    ("conversations_maria", "/api/v1/patients/pt-maria/conversations",
     {"date": FIXTURE_DATE}),
    ("vitals_day_emily", f"/api/v1/patients/{FIXTURE_PATIENT_ID}/vitals",
     {"metric": "heart_rate", "from": TREND_FROM, "to": SHOWCASE_T0 + DAY_MS,
      "resolution": "day"}),
    ("vitals_hour_showcase", f"/api/v1/patients/{FIXTURE_PATIENT_ID}/vitals",
     {"metric": "heart_rate", "from": SHOWCASE_T0, "to": SHOWCASE_T0 + DAY_MS,
      "resolution": "hour"}),
    ("vitals_hour_anomaly", f"/api/v1/patients/{FIXTURE_PATIENT_ID}/vitals",
     {"metric": "heart_rate", "from": ANOMALY_T0, "to": ANOMALY_T0 + DAY_MS,
      "resolution": "hour"}),
    ("vitals_day_maria", "/api/v1/patients/pt-maria/vitals",
     {"metric": "heart_rate", "from": TREND_FROM, "to": SHOWCASE_T0 + DAY_MS,
      "resolution": "day"}),
    ("alerts_emily", f"/api/v1/patients/{FIXTURE_PATIENT_ID}/alerts", {}),
]


def main() -> int:
    out_dir = Path(__file__).resolve().parent.parent / "frontend" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        store = build_fixture_store(tmp)
        app = create_app(ApiConfig(data_dir=tmp), store=store, model=None)
        client = TestClient(app)
        for name, path, params in CAPTURES:
            r = client.get(path, params=params)
            r.raise_for_status()
            out = out_dir / f"{name}.json"
            out.write_text(json.dumps(r.json(), indent=2, sort_keys=True) + "\n",
                           encoding="utf-8")
            print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
