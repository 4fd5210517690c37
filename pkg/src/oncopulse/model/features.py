"""Patient feature encoding: static vector plus tokenized visit sequence.

Only clinician-observable fields are encoded. The generator's hidden risk
state never enters the feature path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..records import SEXES, VisitRecord
from ..sim import CANCER_STAGES, TREATMENT_TYPES
from .vocab import Vocabulary


@dataclass
class EncodedPatient:
    """Model-ready view of one patient."""

    patient_id: str
    visit_token_ids: list[np.ndarray]  # one int64 array per kept visit
    visit_dts: np.ndarray  # days before the reference time, most recent last
    static: np.ndarray  # float64 static feature vector


@dataclass
class StaticCodec:
    """Static feature vector layout.

    Standardized age, one-hot sex, ordinal stage, one-hot treatment type,
    then one presence indicator per screened risk-factor token.
    """

    age_mean: float = 60.0
    age_std: float = 12.0
    screened_tokens: list[str] = field(default_factory=list)

    def fit_age(self, ages: list[int]) -> None:
        arr = np.asarray(ages, dtype=float)
        self.age_mean = float(arr.mean())
        self.age_std = float(arr.std()) or 1.0

    @property
    def dim(self) -> int:
        return 1 + len(SEXES) + 1 + len(TREATMENT_TYPES) + len(self.screened_tokens)

    def transform(self, age: int, sex: str, stage: str, treatment: str, tokens: set[str]) -> np.ndarray:
        out = np.zeros(self.dim)
        out[0] = (age - self.age_mean) / self.age_std
        if sex in SEXES:
            out[1 + SEXES.index(sex)] = 1.0
        pos = 1 + len(SEXES)
        if stage in CANCER_STAGES:
            out[pos] = CANCER_STAGES.index(stage) / (len(CANCER_STAGES) - 1)
        pos += 1
        if treatment in TREATMENT_TYPES:
            out[pos + TREATMENT_TYPES.index(treatment)] = 1.0
        pos += len(TREATMENT_TYPES)
        for i, tok in enumerate(self.screened_tokens):
            if tok in tokens:
                out[pos + i] = 1.0
        return out

    def to_dict(self) -> dict:
        return {
            "age_mean": self.age_mean,
            "age_std": self.age_std,
            "screened_tokens": list(self.screened_tokens),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StaticCodec":
        return cls(
            age_mean=float(d["age_mean"]),
            age_std=float(d["age_std"]),
            screened_tokens=list(d.get("screened_tokens", [])),
        )


def encode_visits(
    visits: list[VisitRecord],
    vocab: Vocabulary,
    max_visits: int,
    t_ref: float | None = None,
    strict: bool = True,
) -> tuple[list[np.ndarray], np.ndarray]:
    """Tokenize visits: most recent ``max_visits`` kept, empty visits dropped.

    ``visit_dts[j]`` is the age of visit j in days relative to ``t_ref``
    (default: the latest visit time), so the most recent visit has dt 0.
    """
    if max_visits < 1:
        raise ConfigError("max_visits must be >= 1")
    ordered = sorted(visits, key=lambda v: v.visit_time)
    if t_ref is None:
        t_ref = ordered[-1].visit_time if ordered else 0.0
    kept_ids: list[np.ndarray] = []
    kept_dts: list[float] = []
    for v in ordered[-max_visits:]:
        ids = vocab.encode(v.tokens(), strict=strict)
        if len(ids) == 0:
            continue
        kept_ids.append(ids)
        kept_dts.append(max(0.0, t_ref - v.visit_time))
    return kept_ids, np.asarray(kept_dts, dtype=float)


def encode_patient(
    subject,
    visits: list[VisitRecord],
    vocab: Vocabulary,
    codec: StaticCodec,
    max_visits: int,
    t_ref: float | None = None,
    strict: bool = True,
) -> EncodedPatient:
    """Encode any object exposing patient_id/age/sex/cancer_stage/treatment_type."""
    token_ids, dts = encode_visits(visits, vocab, max_visits, t_ref=t_ref, strict=strict)
    tokens = {t for v in visits for t in v.tokens()}
    static = codec.transform(subject.age, subject.sex, subject.cancer_stage, subject.treatment_type, tokens)
    return EncodedPatient(
        patient_id=subject.patient_id,
        visit_token_ids=token_ids,
        visit_dts=dts,
        static=static,
    )
