"""Vocabulary, static codec and visit encoding."""

import numpy as np
import pytest

from oncopulse.errors import ConfigError, VocabularyError
from oncopulse.model.features import StaticCodec, encode_patient, encode_visits
from oncopulse.model.vocab import Vocabulary
from oncopulse.records import SEXES, PatientProfile, VisitRecord
from oncopulse.sim import CANCER_STAGES, TREATMENT_TYPES


def visit(t, codes=(), procedures=(), medications=()):
    return VisitRecord(
        patient_id="p1",
        visit_time=float(t),
        codes=list(codes),
        procedures=list(procedures),
        medications=list(medications),
    )


def profile(latent=0.0, age=64):
    return PatientProfile(
        patient_id="p1",
        name="Test Patient",
        age=age,
        sex="female",
        cancer_type="breast",
        cancer_stage=CANCER_STAGES[2],
        treatment_type=TREATMENT_TYPES[0],
        resting_hr=72.0,
        resting_spo2=97.5,
        resting_resp=15.0,
        resting_skin_temp=33.4,
        latent_risk=latent,
    )


# -- vocabulary -------------------------------------------------------------


def test_vocab_from_tokens_sorts_and_dedupes():
    v = Vocabulary.from_tokens(["b", "a", "b", "c"])
    assert list(v.tokens) == ["a", "b", "c"]
    assert len(v) == 3
    assert "a" in v and "z" not in v


def test_vocab_rejects_duplicates():
    with pytest.raises(VocabularyError):
        Vocabulary(["a", "a"])


def test_vocab_index_and_strict_encode():
    v = Vocabulary(["a", "b", "c"])
    assert v.index("b") == 1
    with pytest.raises(VocabularyError):
        v.index("nope")
    ids = v.encode(["c", "a"])
    assert ids.dtype == np.int64
    assert ids.tolist() == [2, 0]
    with pytest.raises(VocabularyError):
        v.encode(["a", "nope"])


def test_vocab_lenient_encode_drops_unknown():
    v = Vocabulary(["a", "b"])
    assert v.encode(["a", "zzz", "b"], strict=False).tolist() == [0, 1]


def test_vocab_dict_round_trip():
    v = Vocabulary.from_tokens(["x", "m", "k"])
    assert Vocabulary.from_dict(v.to_dict()).tokens == v.tokens


# -- static codec -------------------------------------------------------------


def test_codec_layout():
    codec = StaticCodec(age_mean=60.0, age_std=10.0, screened_tokens=["C007", "C013"])
    out = codec.transform(
        age=70, sex="female", stage=CANCER_STAGES[2],
        treatment=TREATMENT_TYPES[1], tokens={"C013", "P02"},
    )
    assert out.shape == (codec.dim,)
    assert out[0] == pytest.approx(1.0)  # (70-60)/10
    sex_hot = out[1 : 1 + len(SEXES)]
    assert sex_hot.tolist() == [1.0 if s == "female" else 0.0 for s in SEXES]
    stage_pos = 1 + len(SEXES)
    assert out[stage_pos] == pytest.approx(2 / (len(CANCER_STAGES) - 1))
    treat = out[stage_pos + 1 : stage_pos + 1 + len(TREATMENT_TYPES)]
    assert treat.tolist() == [1.0 if t == TREATMENT_TYPES[1] else 0.0 for t in TREATMENT_TYPES]
    assert out[-2:].tolist() == [0.0, 1.0]  # C007 absent, C013 present


def test_codec_fit_age():
    codec = StaticCodec()
    codec.fit_age([50, 60, 70])
    assert codec.age_mean == pytest.approx(60.0)
    assert codec.age_std == pytest.approx(np.std([50, 60, 70]))


def test_codec_dict_round_trip():
    codec = StaticCodec(age_mean=58.2, age_std=9.7, screened_tokens=["C024"])
    back = StaticCodec.from_dict(codec.to_dict())
    assert back == codec


# -- visit encoding -------------------------------------------------------------


def test_encode_visits_orders_and_times():
    v = Vocabulary(["C001", "C002", "C003"])
    visits = [visit(30.0, codes=["C002"]), visit(10.0, codes=["C001", "C003"])]
    ids, dts = encode_visits(visits, v, max_visits=8)
    assert [a.tolist() for a in ids] == [[0, 2], [1]]
    assert dts.tolist() == [20.0, 0.0]  # relative to the latest visit


def test_encode_visits_explicit_reference_time():
    v = Vocabulary(["C001"])
    ids, dts = encode_visits([visit(10.0, codes=["C001"])], v, max_visits=4, t_ref=25.0)
    assert dts.tolist() == [15.0]


def test_encode_visits_truncates_to_most_recent():
    v = Vocabulary(["C001"])
    visits = [visit(float(t), codes=["C001"]) for t in range(10)]
    ids, dts = encode_visits(visits, v, max_visits=3)
    assert len(ids) == 3
    assert dts.tolist() == [2.0, 1.0, 0.0]


def test_encode_visits_drops_empty_and_unknown_only_visits():
    v = Vocabulary(["C001"])
    visits = [visit(1.0), visit(2.0, codes=["ZZZ"]), visit(3.0, codes=["C001"])]
    ids, dts = encode_visits(visits, v, max_visits=8, strict=False)
    assert len(ids) == 1
    assert dts.tolist() == [0.0]


def test_encode_visits_rejects_bad_max():
    with pytest.raises(ConfigError):
        encode_visits([], Vocabulary(["a"]), max_visits=0)


def test_encode_patient_static_ignores_hidden_state():
    """Two profiles differing only in generator-internal risk encode identically."""
    v = Vocabulary(["C001"])
    codec = StaticCodec()
    visits = [visit(5.0, codes=["C001"])]
    low = encode_patient(profile(latent=0.0), visits, v, codec, max_visits=4)
    high = encode_patient(profile(latent=1.0), visits, v, codec, max_visits=4)
    assert np.array_equal(low.static, high.static)
    assert low.static.shape == (codec.dim,)


def test_encode_patient_no_history():
    v = Vocabulary(["C001"])
    enc = encode_patient(profile(), [], v, StaticCodec(), max_visits=4)
    assert enc.visit_token_ids == []
    assert enc.visit_dts.shape == (0,)
