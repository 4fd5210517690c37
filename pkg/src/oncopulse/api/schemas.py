"""Request and response bodies for every endpoint.

These models are the published contract: the JSON Schema files shipped in
schemas/ are exported from them, and the test suite validates live responses
against those files.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from ..records import METRICS


class ApiModel(BaseModel):
    # "model_state" below would otherwise collide with pydantic's namespace
    model_config = ConfigDict(protected_namespaces=())


class HealthResponse(ApiModel):
    status: Literal["ok", "degraded"]
    components: dict[str, str]
    poll_seconds: int


class PatientOut(ApiModel):
    patient_id: str
    name: str
    age: int
    sex: str
    cancer_type: str
    cancer_stage: str
    treatment_type: str
    treatment_start: str
    screened_risk_factors: list[str]


class PatientListResponse(ApiModel):
    patients: list[PatientOut]


class SamplePoint(ApiModel):
    t: int
    v: float


class BucketOut(ApiModel):
    bucket_start: int
    mean: float
    min: float
    max: float
    count: int


class VitalsResponse(ApiModel):
    patient_id: str
    metric: str
    resolution: Literal["raw", "minute", "hour", "day"]
    samples: list[SamplePoint] | None = None  # raw resolution only
    buckets: list[BucketOut] | None = None  # aggregated resolutions only


class AttributionOut(ApiModel):
    group_id: str
    label: str
    phi: float
    share: float


class AssessmentOut(ApiModel):
    patient_id: str
    t: int
    horizon_days: float
    score: float
    linear_score: float
    attributions: list[AttributionOut]
    narrative: str
    tier: str
    source: str


class TrendPoint(ApiModel):
    t: int
    score: float


class RiskPanelResponse(ApiModel):
    patient_id: str
    model_state: Literal["ok", "unavailable"]
    latest: AssessmentOut | None
    trend: list[TrendPoint]


class ExtractedSymptomOut(ApiModel):
    symptom: str
    negated: bool
    severity_words: list[str]


class TurnOut(ApiModel):
    turn_id: str
    session_id: str
    patient_id: str
    speaker: Literal["assistant", "patient"]
    t: int
    text: str
    extracted: list[ExtractedSymptomOut]
    tag: Literal["normal", "abnormal", "red_flag"]


class ConversationsResponse(ApiModel):
    patient_id: str
    date: str | None
    turns: list[TurnOut]


class MetricStatsOut(ApiModel):
    mean: float
    min: float
    max: float
    count: int
    deviation_flag: bool


class SymptomMentionOut(ApiModel):
    symptom: str
    t: int
    tag: str


class SummaryResponse(ApiModel):
    patient_id: str
    date: str
    metrics: dict[str, MetricStatsOut]
    symptoms: list[SymptomMentionOut]
    alert_count: int
    note_hooks: list[str]
    rendered_text: str


class AlertOut(ApiModel):
    alert_id: str
    patient_id: str
    source: str
    severity: Literal["warning", "critical"]
    t_raised: int
    z_peak: float | None
    message: str


class AlertsResponse(ApiModel):
    patient_id: str
    alerts: list[AlertOut]


class NoteIn(ApiModel):
    model_config = ConfigDict(extra="forbid")

    author: str = Field(min_length=1, max_length=200)
    text: str = Field(min_length=1, max_length=10_000)
    t: int | None = None  # defaults to server time


class NoteOut(ApiModel):
    note_id: str
    patient_id: str
    author: str
    t: int
    text: str


class IngestSampleIn(ApiModel):
    model_config = ConfigDict(extra="forbid")

    t: int
    v: float


class IngestRequest(ApiModel):
    model_config = ConfigDict(extra="forbid")

    patient_id: str = Field(min_length=1, max_length=64)
    device_id: str | None = None
    metric: Literal[METRICS]  # type: ignore[valid-type]
    samples: list[IngestSampleIn]


class IngestResponse(ApiModel):
    accepted: int
    duplicates: int
    rejected: int


class TurnIn(ApiModel):
    model_config = ConfigDict(extra="forbid")

    text: str = Field(min_length=1, max_length=10_000)
    t: int | None = None  # defaults to server time


class TurnPostResponse(ApiModel):
    session_id: str
    closed: bool
    turns: list[TurnOut]
    alerts: list[AlertOut]


# name -> response model, used by the schema exporter and the contract tests
RESPONSE_SCHEMAS: dict[str, type[ApiModel]] = {
    "health": HealthResponse,
    "patient": PatientOut,
    "patients": PatientListResponse,
    "vitals": VitalsResponse,
    "risk": RiskPanelResponse,
    "conversations": ConversationsResponse,
    "summary": SummaryResponse,
    "alerts": AlertsResponse,
    "note": NoteOut,
    "ingest": IngestResponse,
    "turn": TurnPostResponse,
}
