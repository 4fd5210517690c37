"""Daily summary: per-metric day stats, deviation flags, symptom mentions,
and a deterministic template rendering with a pluggable text provider.

The structured fields are always computed and stored; a configured provider
can only replace the rendered text, never the numbers behind it.
"""

from __future__ import annotations

from datetime import datetime, timezone
from typing import Protocol

from .alerts import BaselineStats
from .errors import NotFoundError, ProviderError
from .records import (
    DAY_MS,
    METRIC_LABELS,
    METRIC_UNITS,
    METRICS,
    TAG_RED_FLAG,
    DailySummary,
    MetricDayStats,
    SeriesQuery,
    SymptomMention,
    date_to_ms,
)
from .store import Store

HOUR_MS = 3_600_000


class SummaryProvider(Protocol):
    def render(self, summary: DailySummary) -> str: ...


def baselines_from_store(store: Store, patient_id: str) -> dict[str, BaselineStats]:
    """Per-metric baseline moments as persisted by the alert engine."""
    out = {}
    for metric, d in store.load_baselines(patient_id).items():
        out[metric] = BaselineStats.from_dict(d.get("stats", d))
    return out


def build_daily_summary(
    patient_id: str,
    date: str,
    store: Store,
    baselines: dict[str, BaselineStats] | None = None,
    z_threshold: float = 3.0,
) -> DailySummary:
    """Aggregate one UTC date. A day without data is a valid, empty summary.

    A metric is flagged when any of its hourly means sits at least
    ``z_threshold`` baseline standard deviations away, mirroring the alert
    policy so the dashboard never flags what the alert stream would not.
    """
    if not store.has_patient(patient_id):
        raise NotFoundError(f"unknown patient: {patient_id}")
    if baselines is None:
        baselines = baselines_from_store(store, patient_id)
    t0 = date_to_ms(date)
    t1 = t0 + DAY_MS

    metrics: dict[str, MetricDayStats] = {}
    for metric in METRICS:
        day = store.query_series(SeriesQuery(patient_id, metric, t0, t1, "day"))
        if not day:
            continue
        (bucket,) = day
        flag = False
        base = baselines.get(metric)
        if base is not None:
            hours = store.query_series(SeriesQuery(patient_id, metric, t0, t1, "hour"))
            flag = any(abs(base.z_score(h.mean)) >= z_threshold for h in hours)
        metrics[metric] = MetricDayStats(
            mean=round(bucket.mean, 2),
            min=round(bucket.min, 2),
            max=round(bucket.max, 2),
            count=bucket.count,
            deviation_flag=flag,
        )

    symptoms = []
    for turn in store.list_turns(patient_id, date=date):
        if turn.speaker != "patient":
            continue
        for ex in turn.extracted:
            if not ex.negated:
                symptoms.append(SymptomMention(symptom=ex.symptom, t=turn.t, tag=turn.tag))

    alert_count = len(store.list_alerts(patient_id, t_from=t0, t_to=t1))
    note_hooks = [n.text for n in store.list_notes(patient_id) if t0 <= n.t < t1]

    summary = DailySummary(
        patient_id=patient_id,
        date=date,
        metrics=metrics,
        symptoms=symptoms,
        alert_count=alert_count,
        note_hooks=note_hooks,
    )
    summary.rendered_text = render_summary(summary)
    return summary


# -- rendering ---------------------------------------------------------------


def _fmt(x: float) -> str:
    """Two decimals, trailing zeros trimmed; parses back to the exact field."""
    return f"{x:.2f}".rstrip("0").rstrip(".")


def _clock(t: int) -> str:
    return datetime.fromtimestamp(t / 1000.0, tz=timezone.utc).strftime("%H:%M")


def _symptom_label(symptom: str) -> str:
    return symptom.replace("_", " ")


def render_template(summary: DailySummary) -> str:
    """The deterministic default rendering. Numbers come only from fields."""
    lines: list[str] = []
    flagged = [m for m, s in summary.metrics.items() if s.deviation_flag]
    red_flags = [s for s in summary.symptoms if s.tag == TAG_RED_FLAG]

    if not summary.metrics and not summary.symptoms and summary.alert_count == 0:
        lines.append(f"Daily summary for {summary.date}: no data recorded this day.")
        if summary.note_hooks:
            lines.append("Notes:")
            lines.extend(f"- {hook}" for hook in summary.note_hooks)
        return "\n".join(lines)

    if flagged or summary.alert_count > 0 or red_flags:
        parts = []
        if flagged:
            parts.append("deviations in " + ", ".join(METRIC_LABELS[m].lower() for m in flagged))
        if summary.alert_count > 0:
            parts.append(f"{summary.alert_count} alert(s) raised")
        if red_flags:
            parts.append("red-flag symptoms reported")
        lines.append(f"Daily summary for {summary.date}: attention needed ({'; '.join(parts)}).")
    else:
        lines.append(f"Daily summary for {summary.date}: no abnormalities detected.")

    for metric in METRICS:
        s = summary.metrics.get(metric)
        if s is None:
            continue
        unit = METRIC_UNITS[metric]
        flag_note = " [deviation from baseline]" if s.deviation_flag else ""
        lines.append(
            f"{METRIC_LABELS[metric]}: mean {_fmt(s.mean)} {unit} "
            f"(range {_fmt(s.min)}-{_fmt(s.max)}, {s.count} samples){flag_note}"
        )

    if summary.symptoms:
        lines.append("Self-reported symptoms:")
        for m in summary.symptoms:
            tag_note = " [red flag]" if m.tag == TAG_RED_FLAG else ""
            lines.append(f"- {_symptom_label(m.symptom)} at {_clock(m.t)} UTC{tag_note}")

    lines.append(f"Alerts raised: {summary.alert_count}")

    if summary.note_hooks:
        lines.append("Notes:")
        lines.extend(f"- {hook}" for hook in summary.note_hooks)

    return "\n".join(lines)


_FALLBACK_NOTE = (
    "(Standard template shown; the configured text provider was unavailable.)"
)


def render_summary(summary: DailySummary, provider: SummaryProvider | None = None) -> str:
    if provider is None:
        return render_template(summary)
    try:
        return provider.render(summary)
    except ProviderError:
        return render_template(summary) + "\n" + _FALLBACK_NOTE
