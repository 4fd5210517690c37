"""Dialogue tests: extraction fixture, retrieval oracle, session machine."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oncopulse.dialogue import (
    CheckInSession,
    KnowledgeIndex,
    Lexicon,
    Snippet,
    TemplateProvider,
    classify_turn,
    extract_symptoms,
    format_list,
    load_knowledge,
    prior_symptoms,
    run_check_in,
    tokenize,
)
from oncopulse.errors import ContractError, ProviderError
from oncopulse.records import PatientRecord
from oncopulse.store import Store

LEX = Lexicon.load()
KB = KnowledgeIndex(load_knowledge())

PID = "pt-00001"


def fresh_store(tmp_path, name="Emily Johnson"):
    store = Store(tmp_path / "data")
    store.upsert_patient(
        PatientRecord(PID, name, 52, "female", "Breast Cancer", "IIA",
                      "chemotherapy", "2024-01-01")
    )
    return store


# ---------------------------------------------------------------------------
# Extraction

# Hand-labeled utterances: expected {symptom: negated}. Two are known-hard
# (non-adjacent phrase, "never" as negation cue) and may be missed; the
# extractor must get at least 28 of 30 exactly right.
LABELED_UTTERANCES = [
    ("I feel some chest discomfort.", {"chest_discomfort": False}),
    ("No chest pain today.", {"chest_discomfort": True}),
    ("I noticed palpitations again this evening.", {"palpitations": False}),
    ("My heart was racing after lunch.", {"palpitations": False}),
    ("I am not short of breath.", {"shortness_of_breath": True}),
    ("I had shortness of breath climbing the stairs.", {"shortness_of_breath": False}),
    ("I fainted this morning while making coffee.", {"syncope": False}),
    ("I have never fainted.", {"syncope": True}),
    ("I feel fine, not tired and no dizziness.", {"fatigue": True, "lightheadedness": True}),
    ("Feeling exhausted and a bit queasy.", {"fatigue": False, "nausea": False}),
    ("I passed out at the pharmacy.", {"syncope": False}),
    ("I have swollen ankles tonight.", {"swelling": False}),
    ("Some swelling in my feet but no chest pressure.", {"swelling": False, "chest_discomfort": True}),
    ("Without any palpitations today, feeling good.", {"palpitations": True}),
    ("Coughing a lot since yesterday.", {"cough": False}),
    ("No cough, no fever.", {"cough": True}),
    ("I get dizzy when I stand up quickly.", {"lightheadedness": False}),
    ("A little light headed this afternoon.", {"lightheadedness": False}),
    ("Chest tightness when climbing stairs.", {"chest_discomfort": False}),
    ("It is hard to breathe when I lie down.", {"shortness_of_breath": False}),
    ("I am sick to my stomach after meals.", {"nausea": False}),
    ("Heart pounding at night again.", {"palpitations": False}),
    ("Skipped beats during breakfast.", {"palpitations": False}),
    ("I blacked out for a second in the garden.", {"syncope": False}),
    ("Not nauseous anymore, and energy is back.", {"nausea": True}),
    ("Severe chest pain and trouble breathing right now.",
     {"chest_discomfort": False, "shortness_of_breath": False}),
    ("Feeling worn out but otherwise okay.", {"fatigue": False}),
    ("No shortness of breath, no palpitations, no chest discomfort.",
     {"shortness_of_breath": True, "palpitations": True, "chest_discomfort": True}),
    ("The fluttering in my chest is worse today.", {"palpitations": False}),
    ("I almost fainted but caught myself on the counter.", {"syncope": False}),
]


def test_extraction_fixture_accuracy():
    correct = 0
    failures = []
    for text, expected in LABELED_UTTERANCES:
        got = {e.symptom: e.negated for e in extract_symptoms(text, LEX)}
        if got == expected:
            correct += 1
        else:
            failures.append((text, expected, got))
    assert correct >= 28, failures


def test_longest_match_wins():
    got = extract_symptoms("I am sick to my stomach.", LEX)
    assert [e.symptom for e in got] == ["nausea"]
    got = extract_symptoms("dizzy spells again", LEX)
    assert [e.symptom for e in got] == ["lightheadedness"]


def test_negation_window_is_three_tokens():
    near = extract_symptoms("no real chest pain", LEX)
    assert near[0].negated
    far = extract_symptoms("no, but there was some real chest pain", LEX)
    assert not far[0].negated  # negation is four tokens away


def test_severity_words_collected():
    got = extract_symptoms("severe chest pain, getting worse", LEX)
    assert got[0].severity_words == ["severe", "worse"]


def test_repeat_mentions_merge():
    got = extract_symptoms("chest pain, yes chest pain again", LEX)
    assert len(got) == 1
    # one negated and one plain mention: the plain one wins
    mixed = extract_symptoms("no chest pain yesterday but chest pain now", LEX)
    assert len(mixed) == 1 and not mixed[0].negated


def test_classify_turn_tags():
    assert classify_turn(extract_symptoms("all good today", LEX), LEX) == "normal"
    assert classify_turn(extract_symptoms("a bit tired", LEX), LEX) == "abnormal"
    assert classify_turn(extract_symptoms("chest pain", LEX), LEX) == "red_flag"
    assert classify_turn(extract_symptoms("no chest pain", LEX), LEX) == "normal"
    assert classify_turn(extract_symptoms("tired, no chest pain", LEX), LEX) == "abnormal"


def test_red_flag_set():
    assert LEX.red_flags == {"chest_discomfort", "shortness_of_breath", "syncope"}


# ---------------------------------------------------------------------------
# Retrieval


def _oracle_rank(index, query, k):
    """Brute-force tf-idf cosine with numpy, independent of the index internals."""
    docs = [tokenize(s.title + " " + s.text) for s in index.snippets]
    vocab = sorted({t for d in docs for t in d})
    col = {t: j for j, t in enumerate(vocab)}
    tf = np.zeros((len(docs), len(vocab)))
    for i, d in enumerate(docs):
        for t in d:
            tf[i, col[t]] += 1.0
    df = (tf > 0).sum(axis=0)
    idf = np.log(len(docs) / df)
    mat = tf * idf
    q = np.zeros(len(vocab))
    for t in tokenize(query):
        if t in col:
            q[col[t]] += 1.0
    q = q * idf
    qn = np.linalg.norm(q)
    if qn == 0:
        return []
    scores = mat @ q / (np.linalg.norm(mat, axis=1) * qn)
    order = sorted(range(len(docs)), key=lambda i: (-scores[i], index.snippets[i].snippet_id))
    return [(index.snippets[i].snippet_id, scores[i]) for i in order if scores[i] > 0][:k]


@pytest.mark.parametrize(
    "query",
    [
        "chest pain and pressure",
        "swollen ankles fluid weight",
        "blood oxygen saturation low reading",
        "heart racing palpitations rhythm",
        "fainted dizzy standing",
    ],
)
def test_retrieval_matches_brute_force_oracle(query):
    hits = KB.retrieve(query, k=3)
    oracle = _oracle_rank(KB, query, k=3)
    assert [h.snippet.snippet_id for h in hits] == [sid for sid, _ in oracle]
    for h, (_, score) in zip(hits, oracle):
        assert h.score == pytest.approx(score, abs=1e-12)


def test_retrieval_relevance_spot_checks():
    assert KB.retrieve("chest pain", k=1)[0].snippet.snippet_id == "kb-001"
    assert KB.retrieve("swollen ankles", k=1)[0].snippet.snippet_id == "kb-006"


def test_retrieval_out_of_vocabulary_query():
    assert KB.retrieve("zzz qqq xxyzzy", k=3) == []


def test_retrieval_tie_break_ascending_id():
    twins = [
        Snippet("kb-b", "same words", "identical body text here"),
        Snippet("kb-a", "same words", "identical body text here"),
        Snippet("kb-c", "another topic", "completely different content"),
    ]
    idx = KnowledgeIndex(twins)
    hits = idx.retrieve("identical body", k=3)
    assert [h.snippet.snippet_id for h in hits[:2]] == ["kb-a", "kb-b"]
    assert hits[0].score == pytest.approx(hits[1].score, abs=1e-15)


def test_retrieve_k_larger_than_corpus():
    assert len(KB.retrieve("heart", k=100)) <= len(KB.snippets)


# ---------------------------------------------------------------------------
# Session machine


def test_happy_path_transcript_shape(tmp_path):
    store = fresh_store(tmp_path)
    session = CheckInSession(store, PID, t0=1_000_000)
    greeting = session.start()
    assert greeting.speaker == "assistant"
    assert "Emily" in greeting.text

    session.reply("Feeling a bit tired today.")
    session.reply("About the same as last week.")
    session.reply("No chest discomfort, no shortness of breath, no fainting.")
    assert session.closed
    assert len(session.turns) == 7
    # exact alternation, assistant first and last
    assert [t.speaker for t in session.turns] == [
        "assistant", "patient", "assistant", "patient", "assistant", "patient", "assistant",
    ]
    close = session.turns[-1]
    assert "care team" in close.text
    assert "One note that may help" in close.text  # fatigue guidance from retrieval
    assert session.alerts == []
    # everything was persisted
    assert len(store.list_turns(PID)) == 7


def test_no_symptoms_no_guidance(tmp_path):
    store = fresh_store(tmp_path)
    session = run_check_in(store, PID, 0, ["All fine.", "Nothing new.", "None of those."])
    assert session.closed
    assert "One note" not in session.turns[-1].text


def test_red_flag_escalates_immediately(tmp_path):
    store = fresh_store(tmp_path)
    session = CheckInSession(store, PID, t0=500_000)
    session.start()
    turns = session.reply("I feel some chest discomfort.", t=560_000)
    assert session.closed
    assert turns[0].tag == "red_flag"
    assert "notifying your care team" in turns[1].text
    assert "Chest discomfort" in turns[1].text
    alerts = store.list_alerts(PID)
    assert len(alerts) == 1
    assert alerts[0].severity == "critical"
    assert alerts[0].source == "symptom:chest_discomfort"
    assert alerts[0].t_raised == 560_000


def test_red_flag_at_probe_stage(tmp_path):
    store = fresh_store(tmp_path)
    session = run_check_in(
        store, PID, 0,
        ["Fine.", "Same as usual.", "Actually yes, I am short of breath right now."],
    )
    assert session.closed
    assert store.list_alerts(PID)[0].source == "symptom:shortness_of_breath"
    assert len(session.turns) == 7  # probe answer triggered escalation, not close


def test_multiple_red_flags_one_alert_each(tmp_path):
    store = fresh_store(tmp_path)
    session = CheckInSession(store, PID, t0=0)
    session.start()
    session.reply("Chest pain and I fainted earlier.")
    sources = {a.source for a in store.list_alerts(PID)}
    assert sources == {"symptom:chest_discomfort", "symptom:syncope"}


def test_negated_red_flag_does_not_escalate(tmp_path):
    store = fresh_store(tmp_path)
    session = CheckInSession(store, PID, t0=0)
    session.start()
    turns = session.reply("No chest pain at all.")
    assert not session.closed
    assert store.list_alerts(PID) == []
    assert turns[0].tag == "normal"


def test_memory_follow_up_names_all_prior_symptoms(tmp_path):
    store = fresh_store(tmp_path)
    run_check_in(store, PID, 0, ["Tired and some palpitations.", "Same.", "No, none of those."])
    session = CheckInSession(store, PID, t0=86_400_000)
    session.start()
    turns = session.reply("Feeling okay.")
    follow_up = turns[1].text
    assert "last spoke" in follow_up
    assert "fatigue" in follow_up
    assert "palpitations" in follow_up
    assert "frequency or severity" in follow_up


def test_memory_excludes_negated_and_later_mentions(tmp_path):
    store = fresh_store(tmp_path)
    run_check_in(store, PID, 0, ["Some swelling, but no cough.", "Same.", "No, none."])
    assert prior_symptoms(store, PID, before_t=86_400_000) == ["swelling"]
    # mentions after the cutoff are invisible
    assert prior_symptoms(store, PID, before_t=1) == []


def test_first_session_uses_fresh_follow_up(tmp_path):
    store = fresh_store(tmp_path)
    session = CheckInSession(store, PID, t0=0)
    session.start()
    turns = session.reply("A bit queasy.")
    assert "energy" in turns[1].text


def test_transcripts_are_deterministic(tmp_path):
    lines = ["Tired and dizzy.", "A little worse.", "No, nothing like that."]
    a = run_check_in(fresh_store(tmp_path / "a"), PID, 10_000, lines)
    b = run_check_in(fresh_store(tmp_path / "b"), PID, 10_000, lines)
    assert [(t.speaker, t.t, t.text, t.tag) for t in a.turns] == [
        (t.speaker, t.t, t.text, t.tag) for t in b.turns
    ]


def test_state_contract_errors(tmp_path):
    store = fresh_store(tmp_path)
    session = CheckInSession(store, PID, t0=0)
    with pytest.raises(ContractError):
        session.reply("hello")
    session.start()
    with pytest.raises(ContractError):
        session.start()
    session.reply("chest pain")  # escalates and closes
    with pytest.raises(ContractError):
        session.reply("anything")


class _BrokenProvider:
    def utterance(self, kind, slots):
        raise ProviderError("upstream model unavailable")


class _ShoutingProvider(TemplateProvider):
    def utterance(self, kind, slots):
        return super().utterance(kind, slots).upper()


def test_provider_fallback_and_override(tmp_path):
    fallback = run_check_in(
        fresh_store(tmp_path / "x"), PID, 0, ["Fine."], provider=_BrokenProvider()
    )
    plain = run_check_in(fresh_store(tmp_path / "y"), PID, 0, ["Fine."])
    assert [t.text for t in fallback.turns] == [t.text for t in plain.turns]

    custom = run_check_in(fresh_store(tmp_path / "z"), PID, 0, ["Fine."], provider=_ShoutingProvider())
    assert custom.turns[0].text.isupper()


def test_format_list():
    assert format_list([]) == ""
    assert format_list(["a"]) == "a"
    assert format_list(["a", "b"]) == "a and b"
    assert format_list(["a", "b", "c"]) == "a, b and c"


# ---------------------------------------------------------------------------
# Properties

SAFE_FILLERS = ["today", "really", "honestly", "morning", "quite", "also", "evening"]

red_flag_phrase = st.sampled_from(
    [(s, p) for s in sorted(LEX.red_flags) for p in LEX.symptoms[s]["phrases"]]
)
fillers = st.lists(st.sampled_from(SAFE_FILLERS), max_size=3)


@settings(max_examples=60, deadline=None)
@given(red_flag_phrase, fillers, fillers)
def test_any_red_flag_phrase_escalates(tmp_path_factory, pair, prefix, suffix):
    symptom, phrase = pair
    text = " ".join(prefix + [phrase] + suffix)
    extracted = extract_symptoms(text, LEX)
    assert classify_turn(extracted, LEX) == "red_flag"
    assert any(e.symptom == symptom and not e.negated for e in extracted)


@settings(max_examples=40, deadline=None)
@given(red_flag_phrase, st.sampled_from(sorted(LEX.negations)))
def test_negation_immediately_before_suppresses(pair, negation):
    _, phrase = pair
    extracted = extract_symptoms(f"{negation} {phrase}", LEX)
    assert classify_turn(extracted, LEX) == "normal"


@settings(max_examples=25, deadline=None)
@given(
    st.lists(
        st.sampled_from(["palpitations", "fatigue", "swelling", "nausea", "cough"]),
        min_size=1, max_size=4, unique=True,
    )
)
def test_memory_recall_property(tmp_path_factory, symptoms):
    tmp = tmp_path_factory.mktemp("recall")
    store = fresh_store(tmp)
    first_line = "I have " + format_list([LEX.label(s) for s in symptoms]) + "."
    run_check_in(store, PID, 0, [first_line, "Same.", "No, none of those."])
    session = CheckInSession(store, PID, t0=86_400_000)
    session.start()
    follow_up = session.reply("Feeling okay.")[1].text
    for s in symptoms:
        assert LEX.label(s) in follow_up
