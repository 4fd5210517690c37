"""Shared domain records and metric constants.

Every timestamp in the system is UTC epoch milliseconds; calendar dates are
ISO ``YYYY-MM-DD`` strings interpreted in UTC.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Any

from .errors import ValidationError

METRICS = ("heart_rate", "respiration", "spo2", "skin_temp")

#: Hard physical bounds per metric; samples outside are rejected at ingest.
METRIC_BOUNDS: dict[str, tuple[float, float]] = {
    "heart_rate": (25.0, 240.0),
    "respiration": (4.0, 60.0),
    "spo2": (50.0, 100.0),
    "skin_temp": (25.0, 45.0),
}

METRIC_UNITS = {
    "heart_rate": "bpm",
    "respiration": "breaths/min",
    "spo2": "%",
    "skin_temp": "°C",
}

METRIC_LABELS = {
    "heart_rate": "Heart rate",
    "respiration": "Respiration rate",
    "spo2": "SpO2",
    "skin_temp": "Skin temperature",
}

SEXES = ("female", "male", "other")

#: Device sampling cadence.
SAMPLE_PERIOD_MS = 10_000
DAY_MS = 86_400_000

SEVERITY_WARNING = "warning"
SEVERITY_CRITICAL = "critical"

TAG_NORMAL = "normal"
TAG_ABNORMAL = "abnormal"
TAG_RED_FLAG = "red_flag"


def utc_date(t_ms: int) -> str:
    """UTC calendar date of an epoch-ms timestamp."""
    return datetime.fromtimestamp(t_ms / 1000.0, tz=timezone.utc).strftime("%Y-%m-%d")


def date_to_ms(date: str) -> int:
    """Epoch ms of UTC midnight for an ISO date string."""
    dt = datetime.strptime(date, "%Y-%m-%d").replace(tzinfo=timezone.utc)
    return int(dt.timestamp() * 1000)


def in_bounds(metric: str, value: float) -> bool:
    lo, hi = METRIC_BOUNDS[metric]
    return math.isfinite(value) and lo <= value <= hi


@dataclass(frozen=True)
class VitalSample:
    patient_id: str
    metric: str
    t: int  # epoch ms
    value: float

    def to_dict(self) -> dict[str, Any]:
        return {"patient_id": self.patient_id, "metric": self.metric, "t": self.t, "value": self.value}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "VitalSample":
        return cls(d["patient_id"], d["metric"], int(d["t"]), float(d["value"]))


@dataclass
class PatientProfile:
    """Synthetic patient with hidden generator state (``latent_risk``)."""

    patient_id: str
    name: str
    age: int
    sex: str
    cancer_type: str
    cancer_stage: str
    treatment_type: str
    resting_hr: float
    resting_spo2: float
    resting_resp: float
    resting_skin_temp: float
    latent_risk: float

    def resting(self, metric: str) -> float:
        return {
            "heart_rate": self.resting_hr,
            "respiration": self.resting_resp,
            "spo2": self.resting_spo2,
            "skin_temp": self.resting_skin_temp,
        }[metric]

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "PatientProfile":
        return cls(**d)


@dataclass
class VisitRecord:
    patient_id: str
    visit_time: float  # days since treatment start
    codes: list[str]
    procedures: list[str]
    medications: list[str]

    def tokens(self) -> list[str]:
        return list(self.codes) + list(self.procedures) + list(self.medications)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "VisitRecord":
        return cls(
            patient_id=d["patient_id"],
            visit_time=float(d["visit_time"]),
            codes=list(d["codes"]),
            procedures=list(d["procedures"]),
            medications=list(d["medications"]),
        )


@dataclass
class OutcomeLabel:
    patient_id: str
    event_time: float  # days; censoring time when not observed
    observed: bool

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "OutcomeLabel":
        return cls(d["patient_id"], float(d["event_time"]), bool(d["observed"]))


@dataclass
class AnomalySpec:
    metric: str
    start: int  # epoch ms
    duration_s: float
    delta: float
    shape: str = "step"  # step | ramp

    def __post_init__(self) -> None:
        if self.duration_s <= 0:
            raise ValidationError("anomaly duration must be positive", ["duration_s"])
        if self.shape not in ("step", "ramp"):
            raise ValidationError(f"unknown anomaly shape {self.shape!r}", ["shape"])


@dataclass
class PatientRecord:
    """The stored, clinician-facing subset of a patient profile."""

    patient_id: str
    name: str
    age: int
    sex: str
    cancer_type: str
    cancer_stage: str
    treatment_type: str
    treatment_start: str  # ISO date
    screened_risk_factors: list[str] = field(default_factory=list)

    def validate(self) -> None:
        bad = []
        if not self.patient_id:
            bad.append("patient_id")
        if not self.name:
            bad.append("name")
        if not isinstance(self.age, int) or self.age < 18:
            bad.append("age")
        if self.sex not in SEXES:
            bad.append("sex")
        try:
            start = date_to_ms(self.treatment_start)
        except (ValueError, TypeError):
            bad.append("treatment_start")
        else:
            now = datetime.now(timezone.utc).timestamp() * 1000
            if start > now:
                bad.append("treatment_start")
        if bad:
            raise ValidationError(f"invalid patient record fields: {', '.join(bad)}", bad)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "PatientRecord":
        return cls(
            patient_id=d["patient_id"],
            name=d["name"],
            age=int(d["age"]),
            sex=d["sex"],
            cancer_type=d["cancer_type"],
            cancer_stage=d["cancer_stage"],
            treatment_type=d["treatment_type"],
            treatment_start=d["treatment_start"],
            screened_risk_factors=list(d.get("screened_risk_factors", [])),
        )

    @classmethod
    def from_profile(cls, p: PatientProfile, treatment_start: str) -> "PatientRecord":
        return cls(
            patient_id=p.patient_id,
            name=p.name,
            age=p.age,
            sex=p.sex,
            cancer_type=p.cancer_type,
            cancer_stage=p.cancer_stage,
            treatment_type=p.treatment_type,
            treatment_start=treatment_start,
        )


@dataclass
class SeriesQuery:
    patient_id: str
    metric: str
    t_from: int
    t_to: int
    resolution: str = "raw"  # raw | minute | hour | day


@dataclass
class AggregateBucket:
    bucket_start: int
    mean: float
    min: float
    max: float
    count: int

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class Note:
    note_id: str
    patient_id: str
    author: str
    t: int
    text: str

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Note":
        return cls(d["note_id"], d["patient_id"], d["author"], int(d["t"]), d["text"])


@dataclass
class ExtractedSymptom:
    symptom: str
    negated: bool = False
    severity_words: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExtractedSymptom":
        return cls(d["symptom"], bool(d.get("negated", False)), list(d.get("severity_words", [])))


@dataclass
class Turn:
    turn_id: str
    session_id: str
    patient_id: str
    speaker: str  # assistant | patient
    t: int
    text: str
    extracted: list[ExtractedSymptom] = field(default_factory=list)
    tag: str = TAG_NORMAL

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["extracted"] = [s.to_dict() for s in self.extracted]
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Turn":
        return cls(
            turn_id=d["turn_id"],
            session_id=d["session_id"],
            patient_id=d["patient_id"],
            speaker=d["speaker"],
            t=int(d["t"]),
            text=d["text"],
            extracted=[ExtractedSymptom.from_dict(s) for s in d.get("extracted", [])],
            tag=d.get("tag", TAG_NORMAL),
        )


@dataclass
class Alert:
    alert_id: str
    patient_id: str
    source: str  # metric name, or "symptom:<token>"
    severity: str  # warning | critical
    t_raised: int
    z_peak: float | None
    message: str

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Alert":
        z = d.get("z_peak")
        return cls(
            alert_id=d["alert_id"],
            patient_id=d["patient_id"],
            source=d["source"],
            severity=d["severity"],
            t_raised=int(d["t_raised"]),
            z_peak=None if z is None else float(z),
            message=d["message"],
        )


@dataclass
class Attribution:
    group_id: str
    label: str
    phi: float
    share: float

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Attribution":
        return cls(d["group_id"], d["label"], float(d["phi"]), float(d["share"]))


@dataclass
class RiskAssessment:
    patient_id: str
    t: int
    horizon_days: float
    score: float  # event probability within horizon, 1 - S(horizon)
    linear_score: float  # model output s feeding the hazard
    attributions: list[Attribution] = field(default_factory=list)
    narrative: str = ""
    tier: str = ""  # routine | monitor | refer
    source: str = "model"  # "model" or "fixture"

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["attributions"] = [a.to_dict() for a in self.attributions]
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RiskAssessment":
        return cls(
            patient_id=d["patient_id"],
            t=int(d["t"]),
            horizon_days=float(d["horizon_days"]),
            score=float(d["score"]),
            linear_score=float(d["linear_score"]),
            attributions=[Attribution.from_dict(a) for a in d.get("attributions", [])],
            narrative=d.get("narrative", ""),
            tier=d.get("tier", ""),
            source=d.get("source", "model"),
        )


@dataclass
class MetricDayStats:
    mean: float
    min: float
    max: float
    count: int
    deviation_flag: bool

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "MetricDayStats":
        return cls(float(d["mean"]), float(d["min"]), float(d["max"]), int(d["count"]), bool(d["deviation_flag"]))


@dataclass
class SymptomMention:
    symptom: str
    t: int
    tag: str

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SymptomMention":
        return cls(d["symptom"], int(d["t"]), d["tag"])


@dataclass
class DailySummary:
    patient_id: str
    date: str
    metrics: dict[str, MetricDayStats] = field(default_factory=dict)
    symptoms: list[SymptomMention] = field(default_factory=list)
    alert_count: int = 0
    note_hooks: list[str] = field(default_factory=list)
    rendered_text: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "patient_id": self.patient_id,
            "date": self.date,
            "metrics": {m: s.to_dict() for m, s in self.metrics.items()},
            "symptoms": [s.to_dict() for s in self.symptoms],
            "alert_count": self.alert_count,
            "note_hooks": list(self.note_hooks),
            "rendered_text": self.rendered_text,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "DailySummary":
        return cls(
            patient_id=d["patient_id"],
            date=d["date"],
            metrics={m: MetricDayStats.from_dict(s) for m, s in d.get("metrics", {}).items()},
            symptoms=[SymptomMention.from_dict(s) for s in d.get("symptoms", [])],
            alert_count=int(d.get("alert_count", 0)),
            note_hooks=list(d.get("note_hooks", [])),
            rendered_text=d.get("rendered_text", ""),
        )
