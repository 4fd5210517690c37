"""High-level risk model: cohort in, calibrated survival scores out."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ContractError
from ..sim import Cohort
from .features import EncodedPatient, StaticCodec, encode_patient
from .io import decode_array, encode_array, read_archive, write_archive
from .network import ModelConfig, RiskEncoder
from .screen import screen_risk_factors
from .train import TrainConfig, TrainResult, train
from .vocab import Vocabulary
from .wcph import WeibullCoxHead


@dataclass(frozen=True)
class ModelOutput:
    linear_score: float
    event_prob: float
    horizon_days: float


def median_event_time(cohort: Cohort, fallback: float) -> float:
    times = [o.event_time for o in cohort.outcomes.values() if o.observed]
    return float(np.median(times)) if times else float(fallback)


class RiskModel:
    """Owns the vocabulary, static codec, encoder network and survival head."""

    def __init__(
        self,
        config: ModelConfig,
        vocab: Vocabulary,
        codec: StaticCodec,
        encoder: RiskEncoder,
        head: WeibullCoxHead,
        horizon_days: float = 90.0,
    ):
        if config.vocab_size != len(vocab):
            raise ContractError("config.vocab_size does not match vocabulary")
        if config.static_dim != codec.dim:
            raise ContractError("config.static_dim does not match codec")
        self.config = config
        self.vocab = vocab
        self.codec = codec
        self.encoder = encoder
        self.head = head
        self.horizon_days = float(horizon_days)
        self.history: list[dict] = []
        self.trained = False
        self.train_config: dict | None = None

    @classmethod
    def from_cohort(
        cls,
        cohort: Cohort,
        horizon_days: float = 90.0,
        seed: int = 0,
        screen: bool = True,
        **config_overrides,
    ) -> "RiskModel":
        """Assemble an untrained model sized to a cohort.

        Screening picks which token presence indicators join the static
        vector; the survival head's scale starts at the cohort's median
        observed event time so early epochs see sane hazards.
        """
        vocab = Vocabulary.from_tokens(cohort.all_tokens())
        screened: list[str] = []
        if screen:
            screened = screen_risk_factors(cohort, horizon_days=horizon_days).tokens
        codec = StaticCodec(screened_tokens=screened)
        codec.fit_age([p.age for p in cohort.profiles])
        config = ModelConfig(
            vocab_size=len(vocab),
            static_dim=codec.dim,
            **config_overrides,
        )
        encoder = RiskEncoder(config, np.random.default_rng(np.random.SeedSequence([seed, 7])))
        head = WeibullCoxHead(k_init=1.0, lam_init=median_event_time(cohort, horizon_days))
        return cls(config, vocab, codec, encoder, head, horizon_days=horizon_days)

    # ---- encoding ----------------------------------------------------

    def encode(self, subject, visits, t_ref=None, strict: bool = False) -> EncodedPatient:
        return encode_patient(
            subject, visits, self.vocab, self.codec, self.config.max_visits,
            t_ref=t_ref, strict=strict,
        )

    def encode_cohort(self, cohort: Cohort) -> tuple[list[EncodedPatient], np.ndarray, np.ndarray]:
        samples, times, deltas = [], [], []
        for p in cohort.profiles:
            samples.append(self.encode(p, cohort.visits[p.patient_id], strict=True))
            out = cohort.outcomes[p.patient_id]
            times.append(out.event_time)
            deltas.append(1.0 if out.observed else 0.0)
        return samples, np.asarray(times, dtype=float), np.asarray(deltas, dtype=float)

    # ---- training / inference -----------------------------------------

    def fit(self, cohort: Cohort, config: TrainConfig | None = None) -> TrainResult:
        config = config or TrainConfig()
        samples, times, deltas = self.encode_cohort(cohort)
        result = train(self.encoder, self.head, samples, times, deltas, config)
        self.history = result.history
        self.trained = True
        self.train_config = config.to_dict()
        return result

    def score(self, subject, visits, t_ref=None) -> float:
        sample = self.encode(subject, visits, t_ref=t_ref)
        s, _ = self.encoder.forward(sample)
        return float(s)

    def predict(self, subject, visits, t_ref=None) -> ModelOutput:
        s = self.score(subject, visits, t_ref=t_ref)
        prob = float(self.head.event_prob(np.array([self.horizon_days]), np.array([s]))[0])
        return ModelOutput(linear_score=s, event_prob=prob, horizon_days=self.horizon_days)

    def scores_for(self, cohort: Cohort, patient_ids: list[str]) -> np.ndarray:
        return np.array([
            self.score(cohort.profile(pid), cohort.visits[pid]) for pid in patient_ids
        ])

    # ---- persistence ---------------------------------------------------

    def save(self, path: str | Path) -> None:
        params = {**self.encoder.params(), **{f"wcph.{k}": v for k, v in self.head.p.items()}}
        write_archive(path, {
            "kind": "risk-model",
            "model_config": self.config.to_dict(),
            "vocab": self.vocab.to_dict(),
            "codec": self.codec.to_dict(),
            "horizon_days": self.horizon_days,
            "trained": self.trained,
            "train_config": self.train_config,
            "history": self.history,
            "params": {k: encode_array(v) for k, v in params.items()},
        })

    @classmethod
    def load(cls, path: str | Path) -> "RiskModel":
        doc = read_archive(path)
        if doc.get("kind") != "risk-model":
            raise ContractError(f"not a risk-model archive: {doc.get('kind')!r}")
        config = ModelConfig.from_dict(doc["model_config"])
        vocab = Vocabulary.from_dict(doc["vocab"])
        codec = StaticCodec.from_dict(doc["codec"])
        encoder = RiskEncoder(config, np.random.default_rng(0))
        head = WeibullCoxHead()
        model = cls(config, vocab, codec, encoder, head,
                    horizon_days=float(doc["horizon_days"]))
        params = {**encoder.params(), **{f"wcph.{k}": v for k, v in head.p.items()}}
        stored = doc["params"]
        if set(stored) != set(params):
            missing = sorted(set(params) - set(stored))
            extra = sorted(set(stored) - set(params))
            raise ContractError(f"parameter mismatch: missing={missing} extra={extra}")
        for k, v in params.items():
            loaded = decode_array(stored[k])
            if loaded.shape != v.shape:
                raise ContractError(f"shape mismatch for {k}: {loaded.shape} vs {v.shape}")
            v[...] = loaded
        model.history = list(doc.get("history", []))
        model.trained = bool(doc.get("trained", False))
        model.train_config = doc.get("train_config")
        return model


def evaluate_model(
    model: RiskModel,
    cohort: Cohort,
    patient_ids: list[str] | None = None,
    horizon_days: float | None = None,
) -> dict:
    """Discrimination metrics on (a subset of) a labeled cohort.

    Without a horizon, the AUC label is "event observed during the study".
    With one, it becomes "event within horizon_days"; patients censored
    before the horizon have unknown labels and are excluded from the AUC
    (never from the concordance, which compares raw times pairwise).
    """
    from .metrics import concordance_index, roc_auc

    ids = patient_ids if patient_ids is not None else [p.patient_id for p in cohort.profiles]
    scores = model.scores_for(cohort, ids)
    observed = np.array([cohort.outcomes[pid].observed for pid in ids])
    times = np.array([cohort.outcomes[pid].event_time for pid in ids])

    if horizon_days is None:
        keep = np.ones(len(ids), dtype=bool)
        labels = observed.astype(float)
    else:
        keep = observed | (times >= horizon_days)
        labels = (observed & (times <= horizon_days)).astype(float)
    return {
        "n": len(ids),
        "n_events": int(observed.sum()),
        "auc": roc_auc(labels[keep], scores[keep]),
        "concordance": concordance_index(times, observed.astype(float), scores),
    }
