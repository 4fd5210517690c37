"""Daily summary building, deviation flags, and faithful rendering."""

import re

import pytest

from oncopulse.alerts import AlertEngine, AlertPolicy, BaselineStats
from oncopulse.errors import NotFoundError, ProviderError
from oncopulse.records import (
    DAY_MS,
    ExtractedSymptom,
    Note,
    PatientRecord,
    Turn,
    VitalSample,
    date_to_ms,
)
from oncopulse.store import Store
from oncopulse.summary import (
    baselines_from_store,
    build_daily_summary,
    render_summary,
    render_template,
)

PID = "pt-summary-1"
DATE = "2024-01-02"
T0 = date_to_ms(DATE)


def make_record(pid=PID):
    return PatientRecord(
        patient_id=pid,
        name="Alex Chen",
        age=54,
        sex="female",
        cancer_type="Breast Cancer",
        cancer_stage="IIA",
        treatment_type="chemotherapy",
        treatment_start="2024-01-01",
    )


@pytest.fixture
def store(tmp_path):
    s = Store(tmp_path / "data")
    s.upsert_patient(make_record())
    return s


def ingest_flat(store, metric, value, n=720, step_ms=120_000, t0=T0):
    samples = [{"t": t0 + i * step_ms, "v": value} for i in range(n)]
    store.ingest_vitals({"patient_id": PID, "metric": metric, "samples": samples})


def steady_baselines(**means):
    out = {}
    for metric, mean in means.items():
        stats = BaselineStats()
        for i in range(200):
            stats.update(mean + (0.5 if i % 2 else -0.5))
        out[metric] = stats
    return out


def test_flat_day_stats_and_no_flags(store):
    ingest_flat(store, "heart_rate", 80.5)
    ingest_flat(store, "spo2", 97.0)
    summary = build_daily_summary(PID, DATE, store, steady_baselines(heart_rate=80.5, spo2=97.0))
    hr = summary.metrics["heart_rate"]
    assert hr.mean == 80.5
    assert hr.min == 80.5 and hr.max == 80.5
    assert hr.count == 720
    assert not hr.deviation_flag
    assert summary.metrics["spo2"].mean == 97.0
    assert "skin_temp" not in summary.metrics
    assert summary.alert_count == 0
    assert "no abnormalities detected" in summary.rendered_text


def test_deviating_hour_flags_metric(store):
    # 23 quiet hours plus one hour sitting far above baseline
    samples = [{"t": T0 + i * 60_000, "v": 80.0} for i in range(1380)]
    samples += [{"t": T0 + 23 * 3_600_000 + i * 60_000, "v": 118.0} for i in range(60)]
    store.ingest_vitals({"patient_id": PID, "metric": "heart_rate", "samples": samples})
    summary = build_daily_summary(PID, DATE, store, steady_baselines(heart_rate=80.0))
    assert summary.metrics["heart_rate"].deviation_flag
    assert "[deviation from baseline]" in summary.rendered_text
    assert "attention needed" in summary.rendered_text


def test_flat_baseline_deviation_flags_via_infinite_z(store):
    ingest_flat(store, "heart_rate", 92.0)
    flat = BaselineStats()
    for _ in range(100):
        flat.update(80.0)
    summary = build_daily_summary(PID, DATE, store, {"heart_rate": flat})
    assert summary.metrics["heart_rate"].deviation_flag


def test_empty_day_is_valid_and_says_so(store):
    summary = build_daily_summary(PID, DATE, store, {})
    assert summary.metrics == {}
    assert summary.symptoms == []
    assert summary.alert_count == 0
    assert "no data recorded" in summary.rendered_text


def test_unknown_patient_raises(store):
    with pytest.raises(NotFoundError):
        build_daily_summary("pt-ghost", DATE, store, {})


def test_symptom_mentions_skip_negated(store):
    store.append_turn(Turn(
        turn_id="t-1", session_id="s-1", patient_id=PID, speaker="patient",
        t=T0 + 6 * 3_600_000, text="I feel some chest discomfort",
        extracted=[ExtractedSymptom("chest_discomfort")], tag="red_flag",
    ))
    store.append_turn(Turn(
        turn_id="t-2", session_id="s-1", patient_id=PID, speaker="patient",
        t=T0 + 7 * 3_600_000, text="no nausea",
        extracted=[ExtractedSymptom("nausea", negated=True)], tag="normal",
    ))
    store.append_turn(Turn(
        turn_id="t-3", session_id="s-1", patient_id=PID, speaker="assistant",
        t=T0 + 7 * 3_600_000 + 1, text="Noted.",
    ))
    summary = build_daily_summary(PID, DATE, store, {})
    assert [m.symptom for m in summary.symptoms] == ["chest_discomfort"]
    assert summary.symptoms[0].tag == "red_flag"
    text = summary.rendered_text
    assert "chest discomfort" in text
    assert "06:00 UTC" in text
    assert "[red flag]" in text
    assert "nausea" not in text


def test_alert_count_window_and_notes(store):
    from oncopulse.alerts import symptom_alert

    store.append_alert(symptom_alert(PID, "syncope", T0 + 100))
    store.append_alert(symptom_alert(PID, "syncope", T0 + DAY_MS + 100))  # next day
    store.append_note(Note("n-1", PID, "dr-a", T0 + 500, "reviewed overnight telemetry"))
    store.append_note(Note("n-2", PID, "dr-a", T0 - 500, "yesterday's note"))
    summary = build_daily_summary(PID, DATE, store, {})
    assert summary.alert_count == 1
    assert summary.note_hooks == ["reviewed overnight telemetry"]
    assert "reviewed overnight telemetry" in summary.rendered_text


def test_end_to_end_anomaly_day_with_alert_engine(store):
    """Armed baseline, then an anomalous day: flag set and alert counted."""
    policy = AlertPolicy(min_baseline_count=1000, window_days=0)
    engine = AlertEngine(store, policy)
    day1 = date_to_ms("2024-01-01")
    warm = [VitalSample(PID, "heart_rate", day1 + i * 10_000, 80.0 + (0.5 if i % 2 else -0.5))
            for i in range(1200)]
    engine.process(PID, "heart_rate", warm)
    spike = [VitalSample(PID, "heart_rate", T0 + i * 10_000, 120.0) for i in range(60)]
    store.ingest_vitals({
        "patient_id": PID, "metric": "heart_rate",
        "samples": [{"t": s.t, "v": s.value} for s in spike],
    })
    alerts = engine.process(PID, "heart_rate", spike)
    assert len(alerts) == 1

    summary = build_daily_summary(PID, DATE, store, baselines_from_store(store, PID))
    assert summary.metrics["heart_rate"].deviation_flag
    assert summary.alert_count >= 1


def test_faithfulness_every_number_parses_back(store):
    ingest_flat(store, "heart_rate", 80.57, n=500)
    ingest_flat(store, "respiration", 14.33, n=400)
    ingest_flat(store, "spo2", 96.41, n=300)
    from oncopulse.alerts import symptom_alert

    store.append_alert(symptom_alert(PID, "syncope", T0 + 100))
    summary = build_daily_summary(PID, DATE, store, steady_baselines(heart_rate=80.0))
    text = summary.rendered_text

    for metric, stats in summary.metrics.items():
        line = next(l for l in text.splitlines() if l.startswith(
            {"heart_rate": "Heart rate", "respiration": "Respiration rate",
             "spo2": "SpO2", "skin_temp": "Skin temperature"}[metric]))
        # vitals are all positive; "-" only appears as the range separator
        nums = re.findall(r"\d+(?:\.\d+)?", line)
        got = [float(x) for x in nums]
        # order in the template: mean, range lo, range hi, sample count
        spo2_offset = 1 if metric == "spo2" else 0  # "SpO2" itself contains a digit
        assert got[spo2_offset + 0] == stats.mean
        assert got[spo2_offset + 1] == stats.min
        assert got[spo2_offset + 2] == stats.max
        assert got[spo2_offset + 3] == stats.count

    m = re.search(r"Alerts raised: (\d+)", text)
    assert int(m.group(1)) == summary.alert_count


def test_rendering_is_deterministic(store):
    ingest_flat(store, "heart_rate", 81.2, n=100)
    a = build_daily_summary(PID, DATE, store, {})
    b = build_daily_summary(PID, DATE, store, {})
    assert a.rendered_text == b.rendered_text
    assert render_template(a) == render_template(b)


class _HaikuProvider:
    def render(self, summary):
        return f"All quiet for {summary.patient_id} on {summary.date}."


class _DownProvider:
    def render(self, summary):
        raise ProviderError("model endpoint unreachable")


def test_provider_replaces_text_but_failure_falls_back(store):
    ingest_flat(store, "heart_rate", 81.2, n=50)
    summary = build_daily_summary(PID, DATE, store, {})
    assert render_summary(summary, _HaikuProvider()) == f"All quiet for {PID} on {DATE}."
    fallback = render_summary(summary, _DownProvider())
    assert fallback.startswith(render_template(summary))
    assert "text provider was unavailable" in fallback


def test_summary_round_trips_through_store(store):
    ingest_flat(store, "heart_rate", 80.5, n=60)
    summary = build_daily_summary(PID, DATE, store, {})
    store.save_summary(summary)
    back = store.get_summary(PID, DATE)
    assert back == summary
