"""Golden demo dataset: one richly populated patient plus companions.

``python3 -m oncopulse.fixtures OUT_DIR`` writes a data directory the service
can serve as-is. The headline patient carries the dashboard's showcase
values: risk score 0.70 with attribution shares 0.50/0.25/0.15/0.10, a flat
80.5 bpm / 97 % SpO2 monitoring day, one red-flag conversation, and a 30-day
rising risk trend. Assessments here are constructed display data, tagged
``source="fixture"``; only the narrative, tier, and summary text run through
the real rendering pipeline.
"""

from __future__ import annotations

import sys
from pathlib import Path

from .alerts import AlertEngine, AlertPolicy
from .dialogue import run_check_in
from .explain import (
    DEFAULT_GROUPS,
    ExplainConfig,
    render_explanation,
    tier_for,
)
from .records import (
    DAY_MS,
    Attribution,
    Note,
    PatientRecord,
    RiskAssessment,
    VitalSample,
    date_to_ms,
)
from .store import Store
from .summary import baselines_from_store, build_daily_summary

FIXTURE_PATIENT_ID = "pt-emily"
FIXTURE_DATE = "2024-05-01"
FIXTURE_SCORE = 0.70
#: Fig-style attribution breakdown: (group_id, phi, share).
FIXTURE_ATTRIBUTIONS = (
    ("chest_discomfort", 0.35, 0.50),
    ("heart_rate", 0.175, 0.25),
    ("respiration", 0.105, 0.15),
    ("treatment_history", 0.07, 0.10),
)
#: Metric -> (low, high) alternating flat-day values; means land on the
#: displayed numbers exactly after the summary's 2-decimal rounding.
FLAT_VALUES = {
    "heart_rate": (80.0, 81.0),  # mean 80.5
    "spo2": (96.8, 97.2),  # mean 97
    "respiration": (13.8, 14.2),  # mean 14
    "skin_temp": (36.4, 36.6),  # mean 36.5
}
TREND_DAYS = 30
_VITALS_BACKFILL_DAYS = 6  # days of minute-cadence history before the showcase day
_ANOMALY_DATE = "2024-04-28"  # drill-down demo: one elevated heart-rate hour
_ANOMALY_HOUR = 14
_GROUP_LABELS = {g.group_id: g.label for g in DEFAULT_GROUPS}


def _day_samples(patient_id: str, metric: str, date: str, step_ms: int) -> list[VitalSample]:
    lo, hi = FLAT_VALUES[metric]
    t0 = date_to_ms(date)
    n = DAY_MS // step_ms
    out = []
    for i in range(n):
        v = lo if i % 2 == 0 else hi
        t = t0 + i * step_ms
        if (
            metric == "heart_rate"
            and date == _ANOMALY_DATE
            and _ANOMALY_HOUR * 3_600_000 <= i * step_ms < (_ANOMALY_HOUR + 1) * 3_600_000
        ):
            v += 40.0
        out.append(VitalSample(patient_id, metric, t, v))
    return out


def _shift_date(date: str, days: int) -> str:
    from .records import utc_date

    return utc_date(date_to_ms(date) + days * DAY_MS)


def _write_vitals(store: Store, engine: AlertEngine, patient_id: str) -> int:
    written = 0
    dates = [
        (_shift_date(FIXTURE_DATE, -k), 60_000)
        for k in range(_VITALS_BACKFILL_DAYS, 0, -1)
    ]
    dates.append((FIXTURE_DATE, 10_000))  # device cadence on the showcase day
    for metric in FLAT_VALUES:
        for date, step_ms in dates:
            samples = _day_samples(patient_id, metric, date, step_ms)
            store.ingest_vitals({
                "patient_id": patient_id,
                "metric": metric,
                "samples": [{"t": s.t, "v": s.value} for s in samples],
            })
            engine.process(patient_id, metric, samples)
            written += len(samples)
    return written


def _write_conversations(store: Store, patient_id: str) -> None:
    # Evening before: palpitations reported, so the next session's follow-up
    # can reference them (the memory-recall behavior, on display).
    eve = date_to_ms(_shift_date(FIXTURE_DATE, -1)) + 19 * 3_600_000
    run_check_in(store, patient_id, eve, [
        "I noticed some palpitations during the evening",
        "It was brief, maybe a minute",
        "No, nothing else",
    ])
    # Showcase morning: red flag, escalation, critical alert.
    morning = date_to_ms(FIXTURE_DATE) + 9 * 3_600_000
    run_check_in(store, patient_id, morning, [
        "Good morning, I slept alright",
        "I feel some chest discomfort",
    ])


def _fixture_attribution_objects() -> list[Attribution]:
    return [
        Attribution(group_id=gid, label=_GROUP_LABELS[gid], phi=phi, share=share)
        for gid, phi, share in FIXTURE_ATTRIBUTIONS
    ]


def _write_assessments(store: Store, patient_id: str) -> None:
    config = ExplainConfig()
    first_score = 0.22
    for i in range(TREND_DAYS):
        date = _shift_date(FIXTURE_DATE, i - (TREND_DAYS - 1))
        t = date_to_ms(date) + DAY_MS - 1
        last = i == TREND_DAYS - 1
        if last:
            score = FIXTURE_SCORE
            attributions = _fixture_attribution_objects()
        else:
            score = round(first_score + (FIXTURE_SCORE - first_score) * i / (TREND_DAYS - 1), 4)
            attributions = []
        assessment = RiskAssessment(
            patient_id=patient_id,
            t=t,
            horizon_days=90.0,
            score=score,
            linear_score=0.0,
            attributions=attributions,
            tier=tier_for(score, config),
            source="fixture",
        )
        if last:
            report = render_explanation(assessment, attributions, config)
            assessment.narrative = report.narrative
            assessment.tier = report.tier
        store.append_assessment(assessment)


def _write_companions(store: Store) -> list[str]:
    store.upsert_patient(PatientRecord(
        patient_id="pt-james", name="James Chen", age=52, sex="male",
        cancer_type="Lymphoma", cancer_stage="III",
        treatment_type="immunotherapy", treatment_start="2024-02-10",
    ))
    t0 = date_to_ms(FIXTURE_DATE)
    store.ingest_vitals({
        "patient_id": "pt-james", "metric": "heart_rate",
        "samples": [{"t": t0 + i * 60_000, "v": 72.0 + (i % 3)} for i in range(120)],
    })
    store.append_assessment(RiskAssessment(
        patient_id="pt-james", t=t0 + DAY_MS - 1, horizon_days=90.0,
        score=0.08, linear_score=0.0, tier="routine", source="fixture",
    ))
    # bare profile: exercises every panel's empty state
    store.upsert_patient(PatientRecord(
        patient_id="pt-maria", name="Maria Patel", age=61, sex="female",
        cancer_type="Lung Cancer", cancer_stage="IIB",
        treatment_type="targeted_therapy", treatment_start="2024-03-05",
    ))
    return ["pt-james", "pt-maria"]


def build_fixture_store(root: str | Path) -> Store:
    """Write the full demo dataset; returns the populated store."""
    store = Store(root)
    store.upsert_patient(PatientRecord(
        patient_id=FIXTURE_PATIENT_ID, name="Emily Johnson", age=34, sex="female",
        cancer_type="Breast Cancer", cancer_stage="IIA",
        treatment_type="chemotherapy", treatment_start="2024-01-01",
        screened_risk_factors=["C007", "C024"],
    ))
    engine = AlertEngine(store, AlertPolicy())
    _write_vitals(store, engine, FIXTURE_PATIENT_ID)
    _write_conversations(store, FIXTURE_PATIENT_ID)
    _write_assessments(store, FIXTURE_PATIENT_ID)
    store.append_note(Note(
        note_id="nt-fixture-1", patient_id=FIXTURE_PATIENT_ID, author="dr-rivera",
        t=date_to_ms(FIXTURE_DATE) + 16 * 3_600_000,
        text="Echo scheduled for next week; continue daily checks.",
    ))
    _write_companions(store)
    summary = build_daily_summary(
        FIXTURE_PATIENT_ID, FIXTURE_DATE, store,
        baselines_from_store(store, FIXTURE_PATIENT_ID),
    )
    store.save_summary(summary)
    return store


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if len(args) != 1:
        print("usage: python3 -m oncopulse.fixtures OUT_DIR", file=sys.stderr)
        return 2
    store = build_fixture_store(args[0])
    patients = store.list_patients()
    print(f"wrote fixture data for {len(patients)} patients to {args[0]}")
    print(f"showcase patient: {FIXTURE_PATIENT_ID}, date {FIXTURE_DATE}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
