"""Daily symptom check-in: extraction, retrieval, and a deterministic dialogue.

The conversation is a small finite-state machine, not a generative model:
greeting and open question, a follow-up that recalls symptoms the patient
reported in earlier sessions, one targeted question about red-flag symptoms,
then a close. Any non-negated red-flag symptom in a patient turn escalates
immediately: the session emits an escalation utterance, records a critical
alert, and ends.

Utterance text comes from a pluggable provider; the default provider is a
fixed template table so transcripts are reproducible. Symptom extraction is
longest-match against a phrase lexicon with a token-window negation rule.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .alerts import symptom_alert
from .errors import ContractError, ProviderError
from .records import (
    TAG_ABNORMAL,
    TAG_NORMAL,
    TAG_RED_FLAG,
    ExtractedSymptom,
    Turn,
)
from .store import Store

ASSETS_DIR = Path(__file__).parent / "assets"

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


# ---------------------------------------------------------------------------
# Lexicon and extraction


class Lexicon:
    """Phrase lexicon: symptom ids, their surface forms, negation rule."""

    def __init__(self, data: dict):
        self.symptoms: dict[str, dict] = data["symptoms"]
        self.negations = set(data["negations"])
        self.negation_window = int(data["negation_window"])
        self.severity_words = set(data["severity_words"])
        self.red_flags = {s for s, d in self.symptoms.items() if d.get("red_flag")}
        # phrase table keyed by first token, longest phrase first
        self._by_first: dict[str, list[tuple[tuple[str, ...], str]]] = {}
        for symptom, d in self.symptoms.items():
            for phrase in d["phrases"]:
                toks = tuple(tokenize(phrase))
                if not toks:
                    continue
                self._by_first.setdefault(toks[0], []).append((toks, symptom))
        for cands in self._by_first.values():
            cands.sort(key=lambda c: len(c[0]), reverse=True)

    @classmethod
    def load(cls, path: str | Path | None = None) -> "Lexicon":
        p = Path(path) if path else ASSETS_DIR / "lexicon.json"
        return cls(json.loads(p.read_text()))

    def label(self, symptom: str) -> str:
        return self.symptoms[symptom].get("label", symptom.replace("_", " "))

    def match_at(self, tokens: list[str], i: int) -> tuple[str, int] | None:
        """Longest phrase starting at position i, as (symptom, token length)."""
        for phrase, symptom in self._by_first.get(tokens[i], ()):
            if tuple(tokens[i : i + len(phrase)]) == phrase:
                return symptom, len(phrase)
        return None


def extract_symptoms(text: str, lexicon: Lexicon) -> list[ExtractedSymptom]:
    """All symptom mentions in an utterance, merged per symptom.

    A mention is negated when a negation token sits within
    ``negation_window`` tokens before the matched phrase. A symptom with
    both negated and plain mentions counts as not negated.
    """
    tokens = tokenize(text)
    mentions: dict[str, ExtractedSymptom] = {}
    i = 0
    while i < len(tokens):
        hit = lexicon.match_at(tokens, i)
        if hit is None:
            i += 1
            continue
        symptom, length = hit
        before = tokens[max(0, i - lexicon.negation_window) : i]
        negated = any(w in lexicon.negations for w in before)
        nearby = tokens[max(0, i - 3) : i] + tokens[i + length : i + length + 3]
        severity = [w for w in nearby if w in lexicon.severity_words]
        prev = mentions.get(symptom)
        if prev is None:
            mentions[symptom] = ExtractedSymptom(symptom, negated, severity)
        else:
            prev.negated = prev.negated and negated
            prev.severity_words += [w for w in severity if w not in prev.severity_words]
        i += length
    return list(mentions.values())


def classify_turn(extracted: list[ExtractedSymptom], lexicon: Lexicon) -> str:
    affirmed = [e for e in extracted if not e.negated]
    if any(e.symptom in lexicon.red_flags for e in affirmed):
        return TAG_RED_FLAG
    if affirmed:
        return TAG_ABNORMAL
    return TAG_NORMAL


# ---------------------------------------------------------------------------
# Knowledge retrieval


@dataclass(frozen=True)
class Snippet:
    snippet_id: str
    title: str
    text: str


@dataclass(frozen=True)
class RetrievalHit:
    snippet: Snippet
    score: float


def load_knowledge(path: str | Path | None = None) -> list[Snippet]:
    p = Path(path) if path else ASSETS_DIR / "knowledge.ndjson"
    out = []
    with open(p, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                d = json.loads(line)
                out.append(Snippet(d["snippet_id"], d["title"], d["text"]))
    return out


class KnowledgeIndex:
    """tf-idf cosine retrieval; raw term counts, idf = ln(N / df)."""

    def __init__(self, snippets: list[Snippet]):
        self.snippets = sorted(snippets, key=lambda s: s.snippet_id)
        docs = [tokenize(s.title + " " + s.text) for s in self.snippets]
        df: Counter = Counter()
        for toks in docs:
            df.update(set(toks))
        n = len(self.snippets)
        self.idf = {tok: math.log(n / d) for tok, d in df.items()}
        self._vecs = [self._vector(toks) for toks in docs]
        self._norms = [math.sqrt(sum(w * w for w in v.values())) for v in self._vecs]

    def _vector(self, tokens: list[str]) -> dict[str, float]:
        tf = Counter(t for t in tokens if t in self.idf)
        return {t: c * self.idf[t] for t, c in tf.items()}

    def retrieve(self, query: str, k: int = 3) -> list[RetrievalHit]:
        """Top-k snippets by cosine similarity; ties by ascending snippet id."""
        qvec = self._vector(tokenize(query))
        qnorm = math.sqrt(sum(w * w for w in qvec.values()))
        if qnorm == 0.0:
            return []
        scored = []
        for snippet, dvec, dnorm in zip(self.snippets, self._vecs, self._norms):
            dot = sum(w * dvec.get(t, 0.0) for t, w in qvec.items())
            if dot > 0.0 and dnorm > 0.0:
                scored.append(RetrievalHit(snippet, dot / (qnorm * dnorm)))
        scored.sort(key=lambda h: (-h.score, h.snippet.snippet_id))
        return scored[:k]


# ---------------------------------------------------------------------------
# Utterance provider


class UtteranceProvider(Protocol):
    """Turns an utterance kind plus slot values into patient-facing text."""

    def utterance(self, kind: str, slots: dict) -> str: ...


_TEMPLATES = {
    "greeting": (
        "Hello {first_name}, this is your daily check-in. How are you feeling "
        "today? Please tell me about any symptoms you have noticed."
    ),
    "follow_up_memory": (
        "Thank you. When we last spoke you mentioned {prior_list}. Have any of "
        "these changed in frequency or severity since then?"
    ),
    "follow_up_fresh": "Thank you. How has your energy been compared with last week?",
    "red_flag_probe": (
        "One more question: have you had any chest discomfort, shortness of "
        "breath, or fainting episodes today?"
    ),
    "close": (
        "Thank you, {first_name}. I have shared today's answers with your care "
        "team.{guidance} Take care."
    ),
    "escalation": (
        "Thank you for telling me, {first_name}. {symptom_label} can be "
        "serious, so I am notifying your care team right now. If it becomes "
        "severe, call emergency services immediately."
    ),
}


class TemplateProvider:
    """Deterministic provider backed by a fixed template table."""

    def utterance(self, kind: str, slots: dict) -> str:
        return _TEMPLATES[kind].format(**slots)


# ---------------------------------------------------------------------------
# Session

_FALLBACK = TemplateProvider()


def format_list(items: list[str]) -> str:
    if not items:
        return ""
    if len(items) == 1:
        return items[0]
    return ", ".join(items[:-1]) + " and " + items[-1]


def prior_symptoms(store: Store, patient_id: str, before_t: int) -> list[str]:
    """Distinct non-negated symptoms from earlier patient turns, in first-mention order."""
    seen: dict[str, None] = {}
    for turn in store.list_turns(patient_id):
        if turn.speaker != "patient" or turn.t >= before_t:
            continue
        for e in turn.extracted:
            if not e.negated and e.symptom not in seen:
                seen[e.symptom] = None
    return list(seen)


class CheckInSession:
    """One scripted check-in conversation, persisted turn by turn."""

    def __init__(
        self,
        store: Store,
        patient_id: str,
        t0: int,
        provider: UtteranceProvider | None = None,
        lexicon: Lexicon | None = None,
        knowledge: KnowledgeIndex | None = None,
        session_id: str | None = None,
    ):
        self.store = store
        self.patient_id = patient_id
        self.t0 = t0
        self.provider = provider or _FALLBACK
        self.lexicon = lexicon or Lexicon.load()
        self.knowledge = knowledge or KnowledgeIndex(load_knowledge())
        self.session_id = session_id or f"chk-{patient_id}-{t0}"
        self.state = "new"
        self.turns: list[Turn] = []
        self.alerts: list = []
        self._first_name = store.get_patient(patient_id).name.split()[0]
        self._last_t = t0
        self._session_symptoms: list[str] = []

    # -- internals ----------------------------------------------------------

    def _utter(self, kind: str, slots: dict) -> str:
        try:
            return self.provider.utterance(kind, slots)
        except ProviderError:
            return _FALLBACK.utterance(kind, slots)

    def _emit(self, speaker: str, t: int, text: str, extracted=None, tag=TAG_NORMAL) -> Turn:
        turn = Turn(
            turn_id=f"{self.session_id}-{len(self.turns):03d}",
            session_id=self.session_id,
            patient_id=self.patient_id,
            speaker=speaker,
            t=t,
            text=text,
            extracted=extracted or [],
            tag=tag,
        )
        self.store.append_turn(turn)
        self.turns.append(turn)
        self._last_t = t
        return turn

    def _assistant(self, kind: str, slots: dict, t: int) -> Turn:
        return self._emit("assistant", t, self._utter(kind, {"first_name": self._first_name, **slots}))

    # -- public API -----------------------------------------------------------

    @property
    def closed(self) -> bool:
        return self.state == "closed"

    def start(self) -> Turn:
        if self.state != "new":
            raise ContractError("session already started")
        self.state = "opening"
        return self._assistant("greeting", {}, self.t0)

    def reply(self, text: str, t: int | None = None) -> list[Turn]:
        """Record one patient utterance and advance the conversation.

        Returns the turns appended by this step (the patient turn plus the
        assistant's response).
        """
        if self.state == "new":
            raise ContractError("call start() before reply()")
        if self.state == "closed":
            raise ContractError("session is closed")
        t = self._last_t + 60_000 if t is None else t
        extracted = extract_symptoms(text, self.lexicon)
        tag = classify_turn(extracted, self.lexicon)
        patient_turn = self._emit("patient", t, text, extracted=extracted, tag=tag)
        for e in extracted:
            if not e.negated and e.symptom not in self._session_symptoms:
                self._session_symptoms.append(e.symptom)

        t_reply = t + 1_000
        if tag == TAG_RED_FLAG:
            first_red = next(
                e.symptom for e in extracted if not e.negated and e.symptom in self.lexicon.red_flags
            )
            for e in extracted:
                if not e.negated and e.symptom in self.lexicon.red_flags:
                    alert = symptom_alert(self.patient_id, e.symptom, t)
                    self.store.append_alert(alert)
                    self.alerts.append(alert)
            label = self.lexicon.label(first_red)
            answer = self._assistant(
                "escalation", {"symptom_label": label[0].upper() + label[1:]}, t_reply
            )
            self.state = "closed"
        elif self.state == "opening":
            prior = prior_symptoms(self.store, self.patient_id, before_t=self.t0)
            if prior:
                labels = format_list([self.lexicon.label(s) for s in prior])
                answer = self._assistant("follow_up_memory", {"prior_list": labels}, t_reply)
            else:
                answer = self._assistant("follow_up_fresh", {}, t_reply)
            self.state = "follow_up"
        elif self.state == "follow_up":
            answer = self._assistant("red_flag_probe", {}, t_reply)
            self.state = "probe"
        else:  # probe answered without red flags: close out
            answer = self._assistant("close", {"guidance": self._guidance()}, t_reply)
            self.state = "closed"
        return [patient_turn, answer]

    def _guidance(self) -> str:
        if not self._session_symptoms:
            return ""
        query = " ".join(self.lexicon.label(s) for s in self._session_symptoms)
        hits = self.knowledge.retrieve(query, k=1)
        if not hits:
            return ""
        first_sentence = hits[0].snippet.text.split(". ")[0].rstrip(".") + "."
        return " One note that may help: " + first_sentence


def run_check_in(
    store: Store,
    patient_id: str,
    t0: int,
    patient_lines: list[str],
    **session_kwargs,
) -> CheckInSession:
    """Drive a full session from scripted patient lines; stops when closed."""
    session = CheckInSession(store, patient_id, t0, **session_kwargs)
    session.start()
    for line in patient_lines:
        if session.closed:
            break
        session.reply(line)
    return session
