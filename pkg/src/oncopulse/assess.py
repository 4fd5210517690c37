"""Builds risk assessments for stored patients from their recent data.

Pulls together the three live inputs the combined risk view needs: visit
history (from a cohort file, when available), symptoms reported in recent
conversations, and how far today's vitals sit from the stored baselines.
"""

from __future__ import annotations

import json
from pathlib import Path

from .explain import AssessmentInputs, ExplainConfig, build_assessment
from .records import DAY_MS, RiskAssessment, SeriesQuery, VisitRecord, date_to_ms
from .store import Store
from .summary import baselines_from_store

# Symptom flags look back one week: a red flag reported Monday should still
# color Friday's assessment even if the patient skipped check-ins since.
LOOKBACK_DAYS = 7.0


def recent_symptoms(
    store: Store,
    patient_id: str,
    t_to: int,
    lookback_days: float = LOOKBACK_DAYS,
) -> dict[str, bool]:
    """Non-negated symptoms the patient reported in [t_to - lookback, t_to)."""
    t_from = t_to - int(lookback_days * DAY_MS)
    flags: dict[str, bool] = {}
    for turn in store.list_turns(patient_id):
        if turn.speaker != "patient" or not (t_from <= turn.t < t_to):
            continue
        for ex in turn.extracted:
            if not ex.negated:
                flags[ex.symptom] = True
    return flags


def vitals_deviations(
    store: Store,
    patient_id: str,
    date: str,
    baselines=None,
) -> dict[str, float]:
    """Signed peak hourly z-score per metric over one day.

    Each metric's most deviant hourly mean for the day, measured against the
    stored baseline. Metrics with no baseline or no data that day are
    omitted, which the downstream combiner treats as "at baseline".
    """
    if baselines is None:
        baselines = baselines_from_store(store, patient_id)
    t0 = date_to_ms(date)
    out: dict[str, float] = {}
    for metric, base in baselines.items():
        hours = store.query_series(
            SeriesQuery(patient_id, metric, t0, t0 + DAY_MS, "hour"))
        zs = [base.z_score(b.mean) for b in hours]
        if zs:
            peak = max(zs, key=abs)
            if peak != 0.0:
                out[metric] = peak
    return out


def load_patient_visits(data_dir: str | Path, patient_id: str) -> list[VisitRecord]:
    """Read one patient's visit history from a cohort directory, if present."""
    path = Path(data_dir) / "visits.ndjson"
    if not path.exists():
        return []
    visits = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            if row.get("patient_id") == patient_id:
                visits.append(VisitRecord.from_dict(row))
    visits.sort(key=lambda v: v.visit_time)
    return visits


def collect_assessment_inputs(
    store: Store,
    patient_id: str,
    date: str,
    visits: list[VisitRecord] | None = None,
) -> AssessmentInputs:
    """Snapshot of one patient at the end of the given day."""
    record = store.get_patient(patient_id)
    t_end = date_to_ms(date) + DAY_MS
    return AssessmentInputs(
        patient_id=patient_id,
        t=t_end - 1,  # last instant of the day being assessed
        age=float(record.age),
        sex=record.sex,
        cancer_stage=record.cancer_stage,
        treatment_type=record.treatment_type,
        visits=list(visits) if visits else [],
        symptoms=recent_symptoms(store, patient_id, t_end),
        vitals_z=vitals_deviations(store, patient_id, date),
    )


def assess_patient(
    model,
    store: Store,
    patient_id: str,
    date: str,
    visits: list[VisitRecord] | None = None,
    config: ExplainConfig | None = None,
    save: bool = False,
) -> RiskAssessment:
    """Assess one patient for one day; optionally persist the result."""
    inputs = collect_assessment_inputs(store, patient_id, date, visits)
    assessment = build_assessment(model, inputs, config)
    if save:
        store.append_assessment(assessment)
    return assessment
