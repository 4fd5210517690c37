"""Survival risk model: feature encoding, encoder network, training, screening."""

from .features import EncodedPatient, StaticCodec, encode_patient, encode_visits
from .metrics import concordance_index, roc_auc
from .network import ModelConfig, RiskEncoder
from .risk import ModelOutput, RiskModel, evaluate_model, median_event_time
from .screen import LogisticFit, ScreeningResult, fit_logistic, screen_risk_factors
from .train import TrainConfig, TrainResult, train
from .vocab import Vocabulary
from .wcph import WeibullCoxHead

__all__ = [
    "EncodedPatient",
    "StaticCodec",
    "encode_patient",
    "encode_visits",
    "concordance_index",
    "roc_auc",
    "ModelConfig",
    "RiskEncoder",
    "ModelOutput",
    "RiskModel",
    "evaluate_model",
    "median_event_time",
    "LogisticFit",
    "ScreeningResult",
    "fit_logistic",
    "screen_risk_factors",
    "TrainConfig",
    "TrainResult",
    "train",
    "Vocabulary",
    "WeibullCoxHead",
]
