"""The demo dataset must carry its showcase numbers exactly and rebuild identically."""

import hashlib
from pathlib import Path

import pytest

from oncopulse.fixtures import (
    FIXTURE_DATE,
    FIXTURE_PATIENT_ID,
    FIXTURE_SCORE,
    build_fixture_store,
    main,
)
from oncopulse.records import DAY_MS, SeriesQuery, date_to_ms


@pytest.fixture(scope="module")
def store(tmp_path_factory):
    return build_fixture_store(tmp_path_factory.mktemp("fixture") / "data")


def test_showcase_assessment_values(store):
    last = store.list_assessments(FIXTURE_PATIENT_ID)[-1]
    assert last.score == FIXTURE_SCORE == 0.70
    assert [a.share for a in last.attributions] == [0.50, 0.25, 0.15, 0.10]
    assert [a.group_id for a in last.attributions] == [
        "chest_discomfort", "heart_rate", "respiration", "treatment_history"]
    assert last.source == "fixture"
    assert last.tier == "refer"
    assert sum(a.phi for a in last.attributions) == pytest.approx(0.70, abs=1e-12)
    assert sum(a.share for a in last.attributions) == pytest.approx(1.0, abs=1e-12)


def test_showcase_narrative_runs_real_renderer(store):
    text = store.list_assessments(FIXTURE_PATIENT_ID)[-1].narrative
    assert "70%" in text
    assert text.index("Chest Discomfort (50%)") < text.index("Heart Rate (25%)") < \
        text.index("Respiration (15%)")
    assert "referral" in text


def test_trend_is_30_ascending_points(store):
    rows = store.list_assessments(FIXTURE_PATIENT_ID)
    assert len(rows) == 30
    ts = [a.t for a in rows]
    assert ts == sorted(ts) and len(set(ts)) == 30
    scores = [a.score for a in rows]
    assert scores == sorted(scores)
    assert all(a.source == "fixture" for a in rows)


def test_showcase_summary_means(store):
    summ = store.get_summary(FIXTURE_PATIENT_ID, FIXTURE_DATE)
    assert summ is not None
    assert summ.metrics["heart_rate"].mean == 80.5
    assert summ.metrics["spo2"].mean == 97.0
    assert not any(st.deviation_flag for st in summ.metrics.values())
    assert [(m.symptom, m.tag) for m in summ.symptoms] == [("chest_discomfort", "red_flag")]
    assert summ.alert_count == 1


def test_red_flag_turn_and_alert(store):
    t0 = date_to_ms(FIXTURE_DATE)
    alerts = store.list_alerts(FIXTURE_PATIENT_ID, t0, t0 + DAY_MS)
    assert len(alerts) == 1
    assert alerts[0].severity == "critical"
    assert alerts[0].source == "symptom:chest_discomfort"
    turns = store.list_turns(FIXTURE_PATIENT_ID, FIXTURE_DATE)
    tags = [t.tag for t in turns]
    assert tags.count("red_flag") == 1
    # the morning prompt recalls the prior evening's palpitations
    memory_prompt = turns[2]
    assert memory_prompt.speaker == "assistant"
    assert "palpitations" in memory_prompt.text


def test_anomaly_day_for_drill_down(store):
    t0 = date_to_ms("2024-04-28")
    hours = store.query_series(SeriesQuery(FIXTURE_PATIENT_ID, "heart_rate", t0, t0 + DAY_MS, "hour"))
    assert len(hours) == 24
    assert hours[14].mean == pytest.approx(120.5)
    assert all(h.mean == pytest.approx(80.5) for h in hours if h.bucket_start != hours[14].bucket_start)


def test_companions_cover_list_and_empty_states(store):
    ids = [p.patient_id for p in store.list_patients()]
    assert set(ids) == {FIXTURE_PATIENT_ID, "pt-james", "pt-maria"}
    assert store.list_assessments("pt-maria") == []
    assert store.list_turns("pt-maria") == []


def _tree_digest(root: Path) -> dict[str, str]:
    out = {}
    for p in sorted(root.rglob("*")):
        if p.is_file():
            out[str(p.relative_to(root))] = hashlib.sha256(p.read_bytes()).hexdigest()
    return out


def test_rebuild_is_byte_identical(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    build_fixture_store(a)
    build_fixture_store(b)
    assert _tree_digest(a) == _tree_digest(b)


def test_cli_entry_usage(tmp_path, capsys):
    assert main([]) == 2
    assert "usage" in capsys.readouterr().err
    assert main([str(tmp_path / "out")]) == 0
    assert "pt-emily" in capsys.readouterr().out
