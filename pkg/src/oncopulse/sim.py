"""Synthetic cohort, vitals, and outcome generation.

Stands in for real wearables and patients: draws reproducible patient
profiles, coded visit histories with a planted hazard signal, continuous
vitals at the 10-second device cadence, and occasional symptom reports.
Everything is a pure function of the generation spec and seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol

import numpy as np
from scipy.signal import lfilter

from .errors import ConfigError, PartialDeliveryError, SinkError
from .records import (
    DAY_MS,
    METRIC_BOUNDS,
    METRICS,
    SAMPLE_PERIOD_MS,
    SEXES,
    AnomalySpec,
    OutcomeLabel,
    PatientProfile,
    PatientRecord,
    VisitRecord,
    VitalSample,
    utc_date,
)

# Fixed synthetic token universe: small enough to inspect by hand.
CODES = tuple(f"C{i:03d}" for i in range(60))
PROCEDURES = tuple(f"P{i:02d}" for i in range(20))
MEDICATIONS = tuple(f"M{i:02d}" for i in range(20))

#: Codes whose presence raises the planted event hazard.
RISKY_CODES = ("C007", "C013", "C024", "C038", "C051")

CANCER_TYPES = ("Breast Cancer", "Lung Cancer", "Lymphoma", "Sarcoma", "Leukemia")
CANCER_STAGES = ("I", "IIA", "IIB", "III", "IV")
TREATMENT_TYPES = ("chemotherapy", "immunotherapy", "targeted_therapy", "radiation")

_FIRST_NAMES = (
    "Emily", "James", "Maria", "Robert", "Linda", "David", "Susan", "Ahmed",
    "Wei", "Priya", "Carlos", "Anna", "Grace", "Viktor", "Naomi", "Omar",
)
_LAST_NAMES = (
    "Johnson", "Smith", "Garcia", "Chen", "Patel", "Okafor", "Kim", "Novak",
    "Brown", "Silva", "Haddad", "Kowalski", "Tanaka", "Jones", "Ali", "Lee",
)

#: Order-1 autoregressive noise: stationary standard deviation per metric.
NOISE_AMPLITUDE = {
    "heart_rate": 4.0,
    "spo2": 0.8,
    "respiration": 1.5,
    "skin_temp": 0.3,
}
_AR_PHI = 0.9

# Planted outcome model: exponential event time with
# rate = BASE_DAILY_HAZARD * exp(signal * (BETA_LATENT*latent + GAMMA_RISKY*risky_count)).
BASE_DAILY_HAZARD = 1.0e-4
BETA_LATENT = 0.8
GAMMA_RISKY = 1.5

#: All synthetic treatment courses start at this instant (2024-01-01T00:00:00Z).
DEFAULT_START_MS = 1_704_067_200_000

_METRIC_INDEX = {m: i for i, m in enumerate(METRICS)}


@dataclass(frozen=True)
class CohortSpec:
    n_patients: int
    days: int
    seed: int
    signal_strength: float = 1.0
    vitals_days: int | None = None  # None: vitals span the full study window
    start_ms: int = DEFAULT_START_MS

    def __post_init__(self) -> None:
        if self.n_patients < 1:
            raise ConfigError("n_patients must be >= 1")
        if self.days < 1:
            raise ConfigError("days must be >= 1")
        if self.signal_strength < 0:
            raise ConfigError("signal_strength must be >= 0")
        if self.vitals_days is not None and self.vitals_days < 0:
            raise ConfigError("vitals_days must be >= 0")

    @property
    def effective_vitals_days(self) -> int:
        return self.days if self.vitals_days is None else self.vitals_days

    def vitals_window(self) -> tuple[int, int]:
        return (self.start_ms, self.start_ms + self.effective_vitals_days * DAY_MS)

    def to_dict(self) -> dict:
        return {
            "n_patients": self.n_patients,
            "days": self.days,
            "seed": self.seed,
            "signal_strength": self.signal_strength,
            "vitals_days": self.vitals_days,
            "start_ms": self.start_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CohortSpec":
        return cls(
            n_patients=int(d["n_patients"]),
            days=int(d["days"]),
            seed=int(d["seed"]),
            signal_strength=float(d.get("signal_strength", 1.0)),
            vitals_days=d.get("vitals_days"),
            start_ms=int(d.get("start_ms", DEFAULT_START_MS)),
        )


@dataclass
class Cohort:
    spec: CohortSpec
    profiles: list[PatientProfile]
    visits: dict[str, list[VisitRecord]]
    outcomes: dict[str, OutcomeLabel]

    def profile(self, patient_id: str) -> PatientProfile:
        for p in self.profiles:
            if p.patient_id == patient_id:
                return p
        raise KeyError(patient_id)

    def risky_token_count(self, patient_id: str) -> int:
        risky = set(RISKY_CODES)
        return sum(c in risky for v in self.visits[patient_id] for c in v.codes)

    def all_tokens(self) -> list[str]:
        return list(CODES) + list(PROCEDURES) + list(MEDICATIONS)


def _patient_rng(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    # SeedSequence keys keep per-patient draws independent of cohort size.
    return np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, index, stream]))


def _clip_round(value: float, lo: float, hi: float, ndigits: int) -> float:
    return float(min(hi, max(lo, round(value, ndigits))))


_SEX_P = (0.55, 0.43, 0.02)
_NON_RISKY_CODES = tuple(c for c in CODES if c not in RISKY_CODES)


def _generate_profile(spec: CohortSpec, index: int) -> PatientProfile:
    rng = _patient_rng(spec.seed, index, stream=0)
    age = int(rng.integers(30, 86))
    sex = str(rng.choice(SEXES, p=_SEX_P))
    stage = str(rng.choice(CANCER_STAGES))
    age_norm = (age - 30) / 55.0
    stage_norm = CANCER_STAGES.index(stage) / (len(CANCER_STAGES) - 1)
    latent = 0.25 * age_norm + 0.20 * stage_norm + 0.55 * float(rng.uniform())
    return PatientProfile(
        patient_id=f"pt-{index:05d}",
        name=f"{rng.choice(_FIRST_NAMES)} {rng.choice(_LAST_NAMES)}",
        age=age,
        sex=sex,
        cancer_type=str(rng.choice(CANCER_TYPES)),
        cancer_stage=stage,
        treatment_type=str(rng.choice(TREATMENT_TYPES)),
        resting_hr=_clip_round(rng.normal(72, 8), 50, 100, 1),
        resting_spo2=_clip_round(rng.normal(97, 1.0), 90, 99.5, 1),
        resting_resp=_clip_round(rng.normal(15, 2), 10, 24, 1),
        resting_skin_temp=_clip_round(rng.normal(33.5, 0.6), 31, 36, 2),
        latent_risk=float(min(1.0, max(0.0, round(latent, 6)))),
    )


def _generate_visits(spec: CohortSpec, profile: PatientProfile, index: int) -> list[VisitRecord]:
    rng = _patient_rng(spec.seed, index, stream=1)
    n_visits = int(min(40, 1 + rng.poisson(9)))
    times = np.sort(rng.uniform(0, spec.days * 0.9, size=n_visits))
    for i in range(1, n_visits):
        if times[i] <= times[i - 1]:
            times[i] = times[i - 1] + 0.01

    visits = []
    for t in times:
        n_codes = int(rng.integers(1, 4))
        codes = list(rng.choice(_NON_RISKY_CODES, size=n_codes, replace=False))
        procedures = list(rng.choice(PROCEDURES, size=int(rng.integers(0, 3)), replace=False))
        medications = list(rng.choice(MEDICATIONS, size=int(rng.integers(0, 3)), replace=False))
        visits.append(
            VisitRecord(
                patient_id=profile.patient_id,
                visit_time=float(round(t, 3)),
                codes=[str(c) for c in codes],
                procedures=[str(p) for p in procedures],
                medications=[str(m) for m in medications],
            )
        )

    # Plant risky codes: carriage probability grows sharply with latent risk.
    p_risky = min(1.0, 0.02 + 0.95 * profile.latent_risk**2)
    n_risky = int(rng.binomial(len(RISKY_CODES), p_risky))
    planted = rng.choice(len(RISKY_CODES), size=n_risky, replace=False)
    for code_idx in planted:
        visit = visits[int(rng.integers(0, len(visits)))]
        visit.codes.append(RISKY_CODES[int(code_idx)])
    return visits


def _generate_outcome(
    spec: CohortSpec, profile: PatientProfile, visits: list[VisitRecord], index: int
) -> OutcomeLabel:
    rng = _patient_rng(spec.seed, index, stream=2)
    risky = set(RISKY_CODES)
    risky_count = sum(c in risky for v in visits for c in v.codes)
    log_mult = spec.signal_strength * (BETA_LATENT * profile.latent_risk + GAMMA_RISKY * risky_count)
    rate = BASE_DAILY_HAZARD * math.exp(log_mult)
    t_event = float(rng.exponential(1.0 / rate))
    if t_event <= spec.days:
        return OutcomeLabel(profile.patient_id, max(1e-3, round(t_event, 3)), True)
    return OutcomeLabel(profile.patient_id, float(spec.days), False)


def generate_cohort(spec: CohortSpec) -> Cohort:
    """Generate a full cohort; deterministic for a fixed spec."""
    profiles = [_generate_profile(spec, i) for i in range(spec.n_patients)]
    visits: dict[str, list[VisitRecord]] = {}
    outcomes: dict[str, OutcomeLabel] = {}
    for i, p in enumerate(profiles):
        v = _generate_visits(spec, p, i)
        visits[p.patient_id] = v
        outcomes[p.patient_id] = _generate_outcome(spec, p, v, i)
    return Cohort(spec=spec, profiles=profiles, visits=visits, outcomes=outcomes)


# ---------------------------------------------------------------------------
# Vitals


def _tick_times(window: tuple[int, int]) -> np.ndarray:
    start, end = window
    if end <= start:
        return np.empty(0, dtype=np.int64)
    n = (end - start + SAMPLE_PERIOD_MS - 1) // SAMPLE_PERIOD_MS
    return start + SAMPLE_PERIOD_MS * np.arange(n, dtype=np.int64)


def sample_metric_values(
    profile: PatientProfile,
    metric: str,
    window: tuple[int, int],
    seed: int,
    amplitude_scale: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """One (timestamps, values) pair for a single metric stream.

    Values are resting baseline plus bounded AR(1) noise, clipped to the
    metric's physical bounds. ``amplitude_scale`` of zero yields a flat
    series at the resting value.
    """
    ticks = _tick_times(window)
    if len(ticks) == 0:
        return ticks, np.empty(0)
    key = [seed & 0xFFFFFFFFFFFFFFFF, abs(hash_id(profile.patient_id)), _METRIC_INDEX[metric], 3]
    rng = np.random.default_rng(np.random.SeedSequence(key))
    amp = NOISE_AMPLITUDE[metric] * amplitude_scale
    x0 = rng.standard_normal()
    eps = rng.standard_normal(len(ticks)) * math.sqrt(1.0 - _AR_PHI**2)
    eps[0] = 0.0
    # AR(1): x[k] = phi*x[k-1] + eps[k], started from the stationary draw x0.
    x = lfilter([1.0], [1.0, -_AR_PHI], eps, zi=np.array([_AR_PHI * x0]))[0]
    lo, hi = METRIC_BOUNDS[metric]
    values = np.clip(np.round(profile.resting(metric) + amp * x, 2), lo, hi)
    return ticks, values


def hash_id(patient_id: str) -> int:
    """Stable 63-bit hash of a patient id (not Python's salted hash)."""
    h = 1469598103934665603
    for byte in patient_id.encode("utf-8"):
        h = ((h ^ byte) * 1099511628211) & 0x7FFFFFFFFFFFFFFF
    return h


def sample_vitals(
    profile: PatientProfile,
    window: tuple[int, int],
    seed: int,
    metrics: Iterable[str] = METRICS,
    amplitude_scale: float = 1.0,
) -> list[VitalSample]:
    """Samples for every requested metric over a half-open [start, end) window."""
    out: list[VitalSample] = []
    for metric in metrics:
        ticks, values = sample_metric_values(profile, metric, window, seed, amplitude_scale)
        out.extend(
            VitalSample(profile.patient_id, metric, int(t), float(v))
            for t, v in zip(ticks, values)
        )
    return out


def inject_anomaly(series: list[VitalSample], spec: AnomalySpec) -> list[VitalSample]:
    """Offset samples inside the anomaly window; everything else passes through."""
    end = spec.start + int(spec.duration_s * 1000)
    lo, hi = METRIC_BOUNDS[spec.metric]
    out = []
    for s in series:
        if s.metric == spec.metric and spec.start <= s.t <= end:
            if spec.shape == "step":
                offset = spec.delta
            else:
                offset = spec.delta * (s.t - spec.start) / (end - spec.start)
            value = min(hi, max(lo, round(s.value + offset, 2)))
            out.append(VitalSample(s.patient_id, s.metric, s.t, float(value)))
        else:
            out.append(s)
    return out


# ---------------------------------------------------------------------------
# Emission


class Sink(Protocol):
    """Ingestion endpoint: accepts one wire-format batch, raises SinkError on failure."""

    def send(self, payload: dict) -> None: ...


@dataclass
class EmissionReport:
    batches: int = 0
    samples: int = 0


def wire_batch(patient_id: str, metric: str, ticks: np.ndarray, values: np.ndarray) -> dict:
    """The ingestion wire format used by the HTTP endpoint and direct sinks."""
    return {
        "patient_id": patient_id,
        "device_id": f"wearable-{patient_id}",
        "metric": metric,
        "samples": [{"t": int(t), "v": float(v)} for t, v in zip(ticks, values)],
    }


def emit_stream(
    cohort: Cohort,
    sink: Sink,
    batch_seconds: int,
    window: tuple[int, int] | None = None,
    metrics: Iterable[str] = METRICS,
    max_attempts: int = 3,
    anomalies: dict[str, list[AnomalySpec]] | None = None,
) -> EmissionReport:
    """Deliver every patient's vitals to a sink in timestamp-ordered batches.

    Batches cover consecutive ``batch_seconds`` windows per (patient, metric)
    stream. Failed sends are retried up to ``max_attempts`` times; a batch
    that still fails raises PartialDeliveryError naming the last timestamp
    that was delivered for that stream.
    """
    if batch_seconds <= 0:
        raise ConfigError("batch_seconds must be positive")
    if window is None:
        window = cohort.spec.vitals_window()
    report = EmissionReport()
    batch_ms = batch_seconds * 1000
    for profile in cohort.profiles:
        for metric in metrics:
            ticks, values = sample_metric_values(profile, metric, window, cohort.spec.seed)
            if anomalies:
                samples = [
                    VitalSample(profile.patient_id, metric, int(t), float(v))
                    for t, v in zip(ticks, values)
                ]
                for spec in anomalies.get(profile.patient_id, []):
                    samples = inject_anomaly(samples, spec)
                ticks = np.array([s.t for s in samples], dtype=np.int64)
                values = np.array([s.value for s in samples])
            last_delivered: int | None = None
            start, end = window
            edge = start
            while edge < end:
                mask = (ticks >= edge) & (ticks < edge + batch_ms)
                edge += batch_ms
                batch_ticks = ticks[mask]
                if len(batch_ticks) == 0:
                    continue
                payload = wire_batch(profile.patient_id, metric, batch_ticks, values[mask])
                delivered = False
                for _ in range(max_attempts):
                    try:
                        sink.send(payload)
                        delivered = True
                        break
                    except SinkError:
                        continue
                if not delivered:
                    raise PartialDeliveryError(profile.patient_id, metric, last_delivered)
                last_delivered = int(batch_ticks[-1])
                report.batches += 1
                report.samples += len(batch_ticks)
    return report


# ---------------------------------------------------------------------------
# Symptom reports


_SYMPTOM_UTTERANCES = (
    ("fatigue", "I have been feeling very tired and sleepy."),
    ("palpitations", "I noticed palpitations again this evening."),
    ("lightheadedness", "I felt lightheaded when I stood up."),
    ("chest_discomfort", "I feel some chest discomfort."),
    ("shortness_of_breath", "I had shortness of breath climbing the stairs."),
)


def sample_symptom_reports(
    profile: PatientProfile, days: int, seed: int
) -> list[tuple[int, str, str]]:
    """Sparse (day, symptom, utterance) reports; rate grows with latent risk."""
    rng = np.random.default_rng(
        np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, abs(hash_id(profile.patient_id)), 4])
    )
    p_report = 0.05 + 0.25 * profile.latent_risk
    reports = []
    for day in range(days):
        if rng.uniform() < p_report:
            idx = min(len(_SYMPTOM_UTTERANCES) - 1, int(rng.geometric(0.45)) - 1)
            symptom, text = _SYMPTOM_UTTERANCES[idx]
            reports.append((day, symptom, text))
    return reports


# ---------------------------------------------------------------------------
# Cohort serialization


def profile_record(profile: PatientProfile, spec: CohortSpec) -> PatientRecord:
    """The storable, clinician-facing projection of a synthetic profile."""
    return PatientRecord(
        patient_id=profile.patient_id,
        name=profile.name,
        age=profile.age,
        sex=profile.sex,
        cancer_type=profile.cancer_type,
        cancer_stage=profile.cancer_stage,
        treatment_type=profile.treatment_type,
        treatment_start=utc_date(spec.start_ms),
    )


def save_cohort(cohort: Cohort, out_dir: str | Path) -> None:
    """Write one directory per cohort: profiles/visits/outcomes ndjson plus cohort.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_ndjson(out / "profiles.ndjson", (p.to_dict() for p in cohort.profiles))
    _write_ndjson(
        out / "visits.ndjson",
        (v.to_dict() for p in cohort.profiles for v in cohort.visits[p.patient_id]),
    )
    _write_ndjson(out / "outcomes.ndjson", (cohort.outcomes[p.patient_id].to_dict() for p in cohort.profiles))
    (out / "cohort.json").write_text(json.dumps(cohort.spec.to_dict(), sort_keys=True, indent=2) + "\n")


def load_cohort(cohort_dir: str | Path) -> Cohort:
    root = Path(cohort_dir)
    if not (root / "cohort.json").exists():
        raise ConfigError(f"not a cohort directory (no cohort.json): {root}")
    spec = CohortSpec.from_dict(json.loads((root / "cohort.json").read_text()))
    profiles = [PatientProfile.from_dict(d) for d in _read_ndjson(root / "profiles.ndjson")]
    visits: dict[str, list[VisitRecord]] = {p.patient_id: [] for p in profiles}
    for d in _read_ndjson(root / "visits.ndjson"):
        rec = VisitRecord.from_dict(d)
        visits[rec.patient_id].append(rec)
    outcomes = {}
    for d in _read_ndjson(root / "outcomes.ndjson"):
        rec = OutcomeLabel.from_dict(d)
        outcomes[rec.patient_id] = rec
    return Cohort(spec=spec, profiles=profiles, visits=visits, outcomes=outcomes)


def _write_ndjson(path: Path, rows: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=True) + "\n")


def _read_ndjson(path: Path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out
