"""Generator tests: determinism, cadence, planted signal, emission faults."""

import json

import numpy as np
import pytest

from oncopulse.errors import ConfigError, PartialDeliveryError, SinkError
from oncopulse.records import (
    DAY_MS,
    METRIC_BOUNDS,
    METRICS,
    SAMPLE_PERIOD_MS,
    AnomalySpec,
)
from oncopulse.sim import (
    CODES,
    MEDICATIONS,
    PROCEDURES,
    RISKY_CODES,
    Cohort,
    CohortSpec,
    EmissionReport,
    emit_stream,
    generate_cohort,
    hash_id,
    inject_anomaly,
    load_cohort,
    sample_metric_values,
    sample_symptom_reports,
    sample_vitals,
    save_cohort,
    wire_batch,
)

SPEC_SMALL = CohortSpec(n_patients=40, days=120, seed=11, vitals_days=0)


def test_spec_validation():
    with pytest.raises(ConfigError):
        CohortSpec(n_patients=0, days=10, seed=1)
    with pytest.raises(ConfigError):
        CohortSpec(n_patients=5, days=0, seed=1)
    with pytest.raises(ConfigError):
        CohortSpec(n_patients=5, days=10, seed=1, signal_strength=-0.1)
    with pytest.raises(ConfigError):
        CohortSpec(n_patients=5, days=10, seed=1, vitals_days=-1)


def test_vitals_window_respects_vitals_days():
    spec = CohortSpec(n_patients=2, days=90, seed=3, vitals_days=2)
    start, end = spec.vitals_window()
    assert end - start == 2 * DAY_MS
    full = CohortSpec(n_patients=2, days=90, seed=3)
    assert full.effective_vitals_days == 90


def test_cohort_is_deterministic():
    a = generate_cohort(SPEC_SMALL)
    b = generate_cohort(SPEC_SMALL)
    assert [p.to_dict() for p in a.profiles] == [p.to_dict() for p in b.profiles]
    for p in a.profiles:
        assert [v.to_dict() for v in a.visits[p.patient_id]] == [
            v.to_dict() for v in b.visits[p.patient_id]
        ]
        assert a.outcomes[p.patient_id].to_dict() == b.outcomes[p.patient_id].to_dict()


def test_cohort_changes_with_seed():
    a = generate_cohort(SPEC_SMALL)
    c = generate_cohort(CohortSpec(n_patients=40, days=120, seed=12, vitals_days=0))
    assert [p.to_dict() for p in a.profiles] != [p.to_dict() for p in c.profiles]


def test_profiles_are_prefix_stable():
    # Growing the cohort must not reshuffle earlier patients.
    small = generate_cohort(CohortSpec(n_patients=10, days=60, seed=5, vitals_days=0))
    big = generate_cohort(CohortSpec(n_patients=25, days=60, seed=5, vitals_days=0))
    assert [p.to_dict() for p in small.profiles] == [p.to_dict() for p in big.profiles[:10]]


def test_visit_tokens_come_from_the_universe():
    cohort = generate_cohort(SPEC_SMALL)
    codes, procs, meds = set(CODES), set(PROCEDURES), set(MEDICATIONS)
    for p in cohort.profiles:
        visits = cohort.visits[p.patient_id]
        assert 1 <= len(visits) <= 40
        times = [v.visit_time for v in visits]
        assert times == sorted(times)
        assert len(set(times)) == len(times)
        for v in visits:
            assert v.codes and set(v.codes) <= codes
            assert set(v.procedures) <= procs
            assert set(v.medications) <= meds


def test_outcome_fields_are_consistent():
    cohort = generate_cohort(SPEC_SMALL)
    for p in cohort.profiles:
        o = cohort.outcomes[p.patient_id]
        assert 0 < o.event_time <= SPEC_SMALL.days
        if not o.observed:
            assert o.event_time == SPEC_SMALL.days


def test_event_fraction_in_learnable_band():
    cohort = generate_cohort(CohortSpec(n_patients=500, days=180, seed=42, vitals_days=0))
    frac = np.mean([cohort.outcomes[p.patient_id].observed for p in cohort.profiles])
    assert 0.1 <= frac <= 0.6


def test_null_signal_cohort_has_few_events():
    spec = CohortSpec(n_patients=500, days=180, seed=42, signal_strength=0.0, vitals_days=0)
    cohort = generate_cohort(spec)
    frac = np.mean([cohort.outcomes[p.patient_id].observed for p in cohort.profiles])
    assert frac < 0.05


def test_planted_signal_separates_risk_quartiles():
    cohort = generate_cohort(CohortSpec(n_patients=300, days=180, seed=7, vitals_days=0))
    latent = np.array([p.latent_risk for p in cohort.profiles])
    events = np.array([cohort.outcomes[p.patient_id].observed for p in cohort.profiles])
    lo_q, hi_q = np.quantile(latent, [0.25, 0.75])
    top = events[latent >= hi_q].mean()
    bottom = events[latent <= lo_q].mean()
    assert top > bottom + 0.2


def test_risky_codes_concentrate_in_high_risk_patients():
    cohort = generate_cohort(CohortSpec(n_patients=300, days=180, seed=7, vitals_days=0))
    latent = np.array([p.latent_risk for p in cohort.profiles])
    risky = np.array([cohort.risky_token_count(p.patient_id) for p in cohort.profiles])
    lo_q, hi_q = np.quantile(latent, [0.25, 0.75])
    assert risky[latent >= hi_q].mean() > risky[latent <= lo_q].mean() + 1.0


# ---------------------------------------------------------------------------
# Vitals


def test_vitals_cadence_and_count():
    profile = generate_cohort(SPEC_SMALL).profiles[0]
    window = (0, DAY_MS)
    samples = sample_vitals(profile, window, seed=9)
    per_metric = {m: [s for s in samples if s.metric == m] for m in METRICS}
    for m, rows in per_metric.items():
        assert len(rows) == 8640  # one day at a 10 s period
        ts = np.array([s.t for s in rows])
        assert ts[0] == 0
        assert ts[-1] == DAY_MS - SAMPLE_PERIOD_MS  # half-open window
        assert (np.diff(ts) == SAMPLE_PERIOD_MS).all()


def test_vitals_deterministic_and_bounded():
    profile = generate_cohort(SPEC_SMALL).profiles[1]
    window = (0, 3_600_000)
    t1, v1 = sample_metric_values(profile, "heart_rate", window, seed=4)
    t2, v2 = sample_metric_values(profile, "heart_rate", window, seed=4)
    assert (t1 == t2).all() and (v1 == v2).all()
    for m in METRICS:
        _, vals = sample_metric_values(profile, m, window, seed=4)
        lo, hi = METRIC_BOUNDS[m]
        assert vals.min() >= lo and vals.max() <= hi


def test_zero_amplitude_is_flat_at_resting():
    profile = generate_cohort(SPEC_SMALL).profiles[2]
    samples = sample_vitals(profile, (0, 600_000), seed=1, amplitude_scale=0.0)
    assert samples
    for s in samples:
        assert s.value == profile.resting(s.metric)


def test_metric_streams_differ():
    profile = generate_cohort(SPEC_SMALL).profiles[0]
    _, hr = sample_metric_values(profile, "heart_rate", (0, 600_000), seed=1)
    _, rr = sample_metric_values(profile, "respiration", (0, 600_000), seed=1)
    assert not np.allclose(hr - hr.mean(), rr - rr.mean())


def test_empty_window_yields_no_samples():
    profile = generate_cohort(SPEC_SMALL).profiles[0]
    assert sample_vitals(profile, (100, 100), seed=1) == []


def test_hash_id_is_stable():
    assert hash_id("pt-00000") == hash_id("pt-00000")
    assert hash_id("pt-00000") != hash_id("pt-00001")


def test_anomaly_step_and_ramp_offsets():
    profile = generate_cohort(SPEC_SMALL).profiles[3]
    window = (0, 3_600_000)
    base = sample_vitals(profile, window, seed=2, metrics=["heart_rate"], amplitude_scale=0.0)
    rest = profile.resting_hr
    start = 100 * SAMPLE_PERIOD_MS
    spec = AnomalySpec(metric="heart_rate", start=start, duration_s=2000, delta=30.0, shape="step")
    stepped = inject_anomaly(base, spec)
    by_t = {s.t: s.value for s in stepped}
    assert by_t[start - SAMPLE_PERIOD_MS] == rest
    assert by_t[start] == rest + 30.0
    assert by_t[start + 1_000_000] == rest + 30.0
    assert by_t[start + 2_000_000] == rest + 30.0
    assert by_t[start + 2_000_000 + SAMPLE_PERIOD_MS] == rest

    ramp = inject_anomaly(base, AnomalySpec("heart_rate", start, 2000, 30.0, "ramp"))
    by_t = {s.t: s.value for s in ramp}
    assert by_t[start] == rest
    assert by_t[start + 1_000_000] == pytest.approx(rest + 15.0)  # ramp midpoint
    assert by_t[start + 2_000_000] == pytest.approx(rest + 30.0)


def test_anomaly_respects_bounds():
    profile = generate_cohort(SPEC_SMALL).profiles[3]
    base = sample_vitals(profile, (0, 600_000), seed=2, metrics=["spo2"], amplitude_scale=0.0)
    out = inject_anomaly(base, AnomalySpec("spo2", 0, 600, 50.0, "step"))
    assert max(s.value for s in out) <= METRIC_BOUNDS["spo2"][1]


# ---------------------------------------------------------------------------
# Emission


class _ListSink:
    def __init__(self):
        self.payloads = []

    def send(self, payload):
        self.payloads.append(payload)


class _FlakySink(_ListSink):
    """Fails each batch a fixed number of times before accepting it."""

    def __init__(self, failures_per_batch):
        super().__init__()
        self.failures_per_batch = failures_per_batch
        self._seen = {}

    def send(self, payload):
        key = (payload["patient_id"], payload["metric"], payload["samples"][0]["t"])
        n = self._seen.get(key, 0)
        self._seen[key] = n + 1
        if n < self.failures_per_batch:
            raise SinkError("transient failure")
        self.payloads.append(payload)


class _DeadAfterSink(_ListSink):
    """Accepts `ok_batches` sends, then fails forever."""

    def __init__(self, ok_batches):
        super().__init__()
        self.ok_batches = ok_batches

    def send(self, payload):
        if len(self.payloads) >= self.ok_batches:
            raise SinkError("sink down")
        self.payloads.append(payload)


def _tiny_cohort():
    return generate_cohort(CohortSpec(n_patients=1, days=1, seed=13, vitals_days=1))


def test_emit_stream_batch_shape():
    cohort = _tiny_cohort()
    sink = _ListSink()
    report = emit_stream(cohort, sink, batch_seconds=3600)
    # one day split into hourly batches, four metrics
    assert isinstance(report, EmissionReport)
    assert report.batches == 24 * 4
    assert report.samples == 8640 * 4
    assert len(sink.payloads) == 24 * 4
    first = sink.payloads[0]
    assert set(first) == {"patient_id", "device_id", "metric", "samples"}
    assert len(first["samples"]) == 360
    assert first["samples"][0] == {
        "t": cohort.spec.start_ms,
        "v": first["samples"][0]["v"],
    }


def test_emit_stream_orders_batches_in_time():
    cohort = _tiny_cohort()
    sink = _ListSink()
    emit_stream(cohort, sink, batch_seconds=3600, metrics=["heart_rate"])
    starts = [p["samples"][0]["t"] for p in sink.payloads]
    assert starts == sorted(starts)
    assert len(starts) == 24


def test_emit_stream_retries_transient_failures():
    cohort = _tiny_cohort()
    sink = _FlakySink(failures_per_batch=2)
    report = emit_stream(cohort, sink, batch_seconds=21600, metrics=["heart_rate"])
    assert report.batches == 4
    assert len(sink.payloads) == 4


def test_emit_stream_partial_delivery_names_last_timestamp():
    cohort = _tiny_cohort()
    start = cohort.spec.start_ms
    sink = _DeadAfterSink(ok_batches=2)
    with pytest.raises(PartialDeliveryError) as err:
        emit_stream(cohort, sink, batch_seconds=3600, metrics=["heart_rate"])
    # two hourly batches made it; the last delivered tick closes batch 2
    expected_last = start + 2 * 3_600_000 - SAMPLE_PERIOD_MS
    assert err.value.last_delivered_t == expected_last
    assert err.value.patient_id == cohort.profiles[0].patient_id
    assert err.value.metric == "heart_rate"
    assert str(expected_last) in str(err.value)


def test_emit_stream_total_failure_names_no_timestamp():
    cohort = _tiny_cohort()
    sink = _DeadAfterSink(ok_batches=0)
    with pytest.raises(PartialDeliveryError) as err:
        emit_stream(cohort, sink, batch_seconds=3600, metrics=["heart_rate"])
    assert err.value.last_delivered_t is None
    assert "none" in str(err.value)


def test_emit_stream_applies_anomalies():
    cohort = _tiny_cohort()
    pid = cohort.profiles[0].patient_id
    start = cohort.spec.start_ms
    spec = AnomalySpec("heart_rate", start, 600, 40.0, "step")
    plain, spiked = _ListSink(), _ListSink()
    emit_stream(cohort, plain, batch_seconds=3600, metrics=["heart_rate"])
    emit_stream(cohort, spiked, batch_seconds=3600, metrics=["heart_rate"], anomalies={pid: [spec]})
    v_plain = plain.payloads[0]["samples"][0]["v"]
    v_spiked = spiked.payloads[0]["samples"][0]["v"]
    assert v_spiked == pytest.approx(min(v_plain + 40.0, METRIC_BOUNDS["heart_rate"][1]))


def test_emit_stream_rejects_bad_batch_seconds():
    with pytest.raises(ConfigError):
        emit_stream(_tiny_cohort(), _ListSink(), batch_seconds=0)


def test_wire_batch_format():
    payload = wire_batch("pt-00001", "spo2", np.array([0, 10_000]), np.array([97.0, 96.5]))
    assert payload["patient_id"] == "pt-00001"
    assert payload["metric"] == "spo2"
    assert payload["samples"] == [{"t": 0, "v": 97.0}, {"t": 10_000, "v": 96.5}]
    assert isinstance(payload["samples"][0]["t"], int)


# ---------------------------------------------------------------------------
# Symptom reports and serialization


def test_symptom_reports_deterministic_and_sparse():
    profile = generate_cohort(SPEC_SMALL).profiles[0]
    a = sample_symptom_reports(profile, days=120, seed=6)
    b = sample_symptom_reports(profile, days=120, seed=6)
    assert a == b
    assert len(a) < 120
    for day, symptom, text in a:
        assert 0 <= day < 120
        assert symptom and text


def test_save_load_round_trip(tmp_path):
    cohort = generate_cohort(SPEC_SMALL)
    save_cohort(cohort, tmp_path / "c")
    again = load_cohort(tmp_path / "c")
    assert again.spec == cohort.spec
    assert [p.to_dict() for p in again.profiles] == [p.to_dict() for p in cohort.profiles]
    for p in cohort.profiles:
        assert [v.to_dict() for v in again.visits[p.patient_id]] == [
            v.to_dict() for v in cohort.visits[p.patient_id]
        ]
        assert again.outcomes[p.patient_id] == cohort.outcomes[p.patient_id]


def test_save_is_byte_identical(tmp_path):
    cohort = generate_cohort(SPEC_SMALL)
    save_cohort(cohort, tmp_path / "one")
    save_cohort(cohort, tmp_path / "two")
    for name in ("profiles.ndjson", "visits.ndjson", "outcomes.ndjson", "cohort.json"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()


def test_load_rejects_non_cohort_dir(tmp_path):
    with pytest.raises(ConfigError):
        load_cohort(tmp_path)


def test_risky_codes_listed_in_universe():
    assert set(RISKY_CODES) <= set(CODES)


def test_cohort_spec_json_round_trip():
    spec = CohortSpec(n_patients=9, days=30, seed=2, signal_strength=0.5, vitals_days=3)
    assert CohortSpec.from_dict(json.loads(json.dumps(spec.to_dict()))) == spec
