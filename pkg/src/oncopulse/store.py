"""File-backed patient store.

Layout, one directory per patient under the store root:

    {root}/{patient_id}/profile.json
    {root}/{patient_id}/manifest.json
    {root}/{patient_id}/{metric}/{YYYY-MM-DD}.ndjson
    {root}/{patient_id}/turns/{YYYY-MM-DD}.ndjson
    {root}/{patient_id}/notes.ndjson
    {root}/{patient_id}/assessments.ndjson
    {root}/{patient_id}/alerts.ndjson
    {root}/{patient_id}/summaries/{YYYY-MM-DD}.json
    {root}/{patient_id}/baselines.json

Vitals ingestion is idempotent on (patient_id, metric, t): replays are
counted as duplicates and never overwrite stored values. All writes go
through a temp file plus atomic rename, guarded by a per-partition lock,
so a crash mid-write never leaves a torn file behind.
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import NotFoundError, QueryError, ValidationError
from .records import (
    METRIC_BOUNDS,
    METRICS,
    AggregateBucket,
    Alert,
    DailySummary,
    Note,
    PatientRecord,
    RiskAssessment,
    SeriesQuery,
    Turn,
    VitalSample,
    utc_date,
)

_RESOLUTION_MS = {"minute": 60_000, "hour": 3_600_000, "day": 86_400_000}
_ID_RE = re.compile(r"^[A-Za-z0-9_-]{1,64}$")
_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


@dataclass(frozen=True)
class IngestReceipt:
    """Outcome of one ingestion call; accepted+duplicates+rejected == samples sent."""

    accepted: int
    duplicates: int
    rejected: int

    def to_dict(self) -> dict:
        return {"accepted": self.accepted, "duplicates": self.duplicates, "rejected": self.rejected}


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.parent / (path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _read_ndjson(path: Path) -> list[dict]:
    if not path.exists():
        return []
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def _append_ndjson(path: Path, rows: Iterable[dict]) -> None:
    # Append is atomic enough for single small records; full-file rewrites
    # elsewhere go through _atomic_write_text.
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=True) + "\n")


class Store:
    """All durable state for the service; safe for concurrent in-process use."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # -- locking ------------------------------------------------------------

    def _lock(self, *key_parts: str) -> threading.Lock:
        key = "/".join(key_parts)
        with self._locks_guard:
            lock = self._locks.get(key)
            if lock is None:
                lock = self._locks[key] = threading.Lock()
            return lock

    # -- paths --------------------------------------------------------------

    def _patient_dir(self, patient_id: str, must_exist: bool = True) -> Path:
        if not _ID_RE.match(patient_id):
            raise ValidationError(f"invalid patient_id: {patient_id!r}", fields=["patient_id"])
        d = self.root / patient_id
        if must_exist and not (d / "profile.json").exists():
            raise NotFoundError(f"unknown patient: {patient_id}")
        return d

    def _day_file(self, patient_id: str, metric: str, date: str) -> Path:
        return self.root / patient_id / metric / f"{date}.ndjson"

    # -- patients -----------------------------------------------------------

    def upsert_patient(self, record: PatientRecord) -> None:
        record.validate()
        d = self._patient_dir(record.patient_id, must_exist=False)
        d.mkdir(parents=True, exist_ok=True)
        with self._lock(record.patient_id, "profile"):
            _atomic_write_text(d / "profile.json", json.dumps(record.to_dict(), sort_keys=True, indent=2) + "\n")

    def get_patient(self, patient_id: str) -> PatientRecord:
        d = self._patient_dir(patient_id)
        return PatientRecord.from_dict(json.loads((d / "profile.json").read_text()))

    def has_patient(self, patient_id: str) -> bool:
        if not _ID_RE.match(patient_id):
            return False
        return (self.root / patient_id / "profile.json").exists()

    def list_patients(self) -> list[PatientRecord]:
        out = []
        for child in sorted(self.root.iterdir()):
            if child.is_dir() and (child / "profile.json").exists():
                out.append(PatientRecord.from_dict(json.loads((child / "profile.json").read_text())))
        return out

    # -- vitals -------------------------------------------------------------

    def ingest_vitals(self, payload: dict) -> IngestReceipt:
        """Ingest one wire-format batch: one patient, one metric, many samples."""
        for field in ("patient_id", "metric", "samples"):
            if field not in payload:
                raise ValidationError(f"missing field: {field}", fields=[field])
        patient_id = payload["patient_id"]
        metric = payload["metric"]
        self._patient_dir(patient_id)
        if metric not in METRICS:
            raise ValidationError(f"unknown metric: {metric!r}", fields=["metric"])
        if not isinstance(payload["samples"], list):
            raise ValidationError("samples must be a list", fields=["samples"])

        lo, hi = METRIC_BOUNDS[metric]
        rejected = 0
        by_date: dict[str, dict[int, float]] = {}
        for s in payload["samples"]:
            try:
                t = int(s["t"])
                v = float(s["v"])
            except (TypeError, KeyError, ValueError):
                rejected += 1
                continue
            if t < 0 or not (lo <= v <= hi) or v != v:
                rejected += 1
                continue
            by_date.setdefault(utc_date(t), {})[t] = v

        accepted = duplicates = 0
        for date, fresh in sorted(by_date.items()):
            with self._lock(patient_id, metric, date):
                path = self._day_file(patient_id, metric, date)
                existing = {int(r["t"]): float(r["v"]) for r in _read_ndjson(path)}
                new_keys = [t for t in fresh if t not in existing]
                duplicates += len(fresh) - len(new_keys)
                if not new_keys:
                    continue
                for t in new_keys:
                    existing[t] = fresh[t]
                accepted += len(new_keys)
                path.parent.mkdir(parents=True, exist_ok=True)
                lines = "".join(
                    json.dumps({"t": t, "v": existing[t]}, sort_keys=True) + "\n"
                    for t in sorted(existing)
                )
                _atomic_write_text(path, lines)
        if accepted:
            self._update_manifest(patient_id, metric)
        return IngestReceipt(accepted=accepted, duplicates=duplicates, rejected=rejected)

    def _update_manifest(self, patient_id: str, metric: str) -> None:
        with self._lock(patient_id, "manifest"):
            manifest = self.get_manifest(patient_id)
            files = sorted((self.root / patient_id / metric).glob("*.ndjson"))
            count, t_min, t_max = 0, None, None
            for path in files:
                rows = _read_ndjson(path)
                if not rows:
                    continue
                count += len(rows)
                lo = min(int(r["t"]) for r in rows)
                hi = max(int(r["t"]) for r in rows)
                t_min = lo if t_min is None else min(t_min, lo)
                t_max = hi if t_max is None else max(t_max, hi)
            manifest["metrics"][metric] = {"count": count, "t_min": t_min, "t_max": t_max}
            _atomic_write_text(
                self.root / patient_id / "manifest.json",
                json.dumps(manifest, sort_keys=True, indent=2) + "\n",
            )

    def get_manifest(self, patient_id: str) -> dict:
        path = self.root / patient_id / "manifest.json"
        if path.exists():
            return json.loads(path.read_text())
        return {"patient_id": patient_id, "metrics": {}}

    def _dates_in_range(self, patient_id: str, metric: str, t_from: int, t_to: int) -> list[str]:
        folder = self.root / patient_id / metric
        if not folder.exists():
            return []
        lo, hi = utc_date(t_from), utc_date(max(t_from, t_to - 1))
        out = []
        for path in sorted(folder.glob("*.ndjson")):
            date = path.stem
            if lo <= date <= hi:
                out.append(date)
        return out

    def query_series(self, query: SeriesQuery) -> list[VitalSample] | list[AggregateBucket]:
        """Raw samples or aggregate buckets over the half-open [t_from, t_to) window."""
        if query.metric not in METRICS:
            raise QueryError(f"unknown metric: {query.metric!r}")
        if query.resolution not in ("raw", *_RESOLUTION_MS):
            raise QueryError(f"unknown resolution: {query.resolution!r}")
        if query.t_from >= query.t_to:
            raise QueryError("t_from must be < t_to")
        self._patient_dir(query.patient_id)

        samples: list[VitalSample] = []
        for date in self._dates_in_range(query.patient_id, query.metric, query.t_from, query.t_to):
            for row in _read_ndjson(self._day_file(query.patient_id, query.metric, date)):
                t = int(row["t"])
                if query.t_from <= t < query.t_to:
                    samples.append(VitalSample(query.patient_id, query.metric, t, float(row["v"])))
        samples.sort(key=lambda s: s.t)
        if query.resolution == "raw":
            return samples
        return aggregate(samples, _RESOLUTION_MS[query.resolution])

    # -- conversation turns ---------------------------------------------------

    def append_turn(self, turn: Turn) -> None:
        self._patient_dir(turn.patient_id)
        date = utc_date(turn.t)
        with self._lock(turn.patient_id, "turns", date):
            _append_ndjson(self.root / turn.patient_id / "turns" / f"{date}.ndjson", [turn.to_dict()])

    def list_turns(self, patient_id: str, date: str | None = None) -> list[Turn]:
        d = self._patient_dir(patient_id)
        folder = d / "turns"
        if not folder.exists():
            return []
        if date is not None:
            if not _DATE_RE.match(date):
                raise QueryError(f"bad date: {date!r}")
            paths = [folder / f"{date}.ndjson"]
        else:
            paths = sorted(folder.glob("*.ndjson"))
        turns = [Turn.from_dict(r) for p in paths for r in _read_ndjson(p)]
        turns.sort(key=lambda t: (t.t, t.turn_id))
        return turns

    # -- append-only records --------------------------------------------------

    def append_assessment(self, assessment: RiskAssessment) -> None:
        self._patient_dir(assessment.patient_id)
        with self._lock(assessment.patient_id, "assessments"):
            _append_ndjson(self.root / assessment.patient_id / "assessments.ndjson", [assessment.to_dict()])

    def list_assessments(self, patient_id: str) -> list[RiskAssessment]:
        d = self._patient_dir(patient_id)
        rows = [RiskAssessment.from_dict(r) for r in _read_ndjson(d / "assessments.ndjson")]
        rows.sort(key=lambda a: a.t)
        return rows

    def latest_assessment(self, patient_id: str) -> RiskAssessment | None:
        rows = self.list_assessments(patient_id)
        return rows[-1] if rows else None

    def append_alert(self, alert: Alert) -> None:
        self._patient_dir(alert.patient_id)
        with self._lock(alert.patient_id, "alerts"):
            _append_ndjson(self.root / alert.patient_id / "alerts.ndjson", [alert.to_dict()])

    def list_alerts(self, patient_id: str, t_from: int | None = None, t_to: int | None = None) -> list[Alert]:
        d = self._patient_dir(patient_id)
        alerts = [Alert.from_dict(r) for r in _read_ndjson(d / "alerts.ndjson")]
        if t_from is not None:
            alerts = [a for a in alerts if a.t_raised >= t_from]
        if t_to is not None:
            alerts = [a for a in alerts if a.t_raised < t_to]
        alerts.sort(key=lambda a: (a.t_raised, a.alert_id))
        return alerts

    def append_note(self, note: Note) -> None:
        self._patient_dir(note.patient_id)
        with self._lock(note.patient_id, "notes"):
            _append_ndjson(self.root / note.patient_id / "notes.ndjson", [note.to_dict()])

    def list_notes(self, patient_id: str) -> list[Note]:
        d = self._patient_dir(patient_id)
        notes = [Note.from_dict(r) for r in _read_ndjson(d / "notes.ndjson")]
        notes.sort(key=lambda n: (n.t, n.note_id))
        return notes

    # -- summaries and baselines ----------------------------------------------

    def save_summary(self, summary: DailySummary) -> None:
        d = self._patient_dir(summary.patient_id)
        if not _DATE_RE.match(summary.date):
            raise ValidationError(f"bad date: {summary.date!r}", fields=["date"])
        (d / "summaries").mkdir(exist_ok=True)
        with self._lock(summary.patient_id, "summaries", summary.date):
            _atomic_write_text(
                d / "summaries" / f"{summary.date}.json",
                json.dumps(summary.to_dict(), sort_keys=True, indent=2) + "\n",
            )

    def get_summary(self, patient_id: str, date: str) -> DailySummary | None:
        d = self._patient_dir(patient_id)
        path = d / "summaries" / f"{date}.json"
        if not path.exists():
            return None
        return DailySummary.from_dict(json.loads(path.read_text()))

    def save_baselines(self, patient_id: str, baselines: dict) -> None:
        d = self._patient_dir(patient_id)
        with self._lock(patient_id, "baselines"):
            _atomic_write_text(d / "baselines.json", json.dumps(baselines, sort_keys=True, indent=2) + "\n")

    def load_baselines(self, patient_id: str) -> dict:
        d = self._patient_dir(patient_id)
        path = d / "baselines.json"
        if not path.exists():
            return {}
        return json.loads(path.read_text())


def aggregate(samples: list[VitalSample], bucket_ms: int) -> list[AggregateBucket]:
    """Bucket sorted samples into fixed UTC-aligned windows; empty buckets are omitted."""
    buckets: dict[int, list[float]] = {}
    for s in samples:
        buckets.setdefault(s.t - s.t % bucket_ms, []).append(s.value)
    out = []
    for start in sorted(buckets):
        vals = buckets[start]
        out.append(
            AggregateBucket(
                bucket_start=start,
                mean=sum(vals) / len(vals),
                min=min(vals),
                max=max(vals),
                count=len(vals),
            )
        )
    return out
