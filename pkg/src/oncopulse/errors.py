"""Exception hierarchy shared by all oncopulse components."""

from __future__ import annotations


class OncopulseError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(OncopulseError):
    """Invalid configuration or generation spec."""


class ValidationError(OncopulseError):
    """A record failed field validation."""

    def __init__(self, message: str, fields: list[str] | None = None):
        super().__init__(message)
        self.fields = fields or []


class NotFoundError(OncopulseError):
    """Lookup by key found nothing."""


class QueryError(OncopulseError):
    """Malformed store query."""


class ContractError(OncopulseError):
    """A caller violated an operation precondition."""


class VocabularyError(OncopulseError):
    """Token not present in the model vocabulary."""


class DegenerateLabelsError(OncopulseError):
    """Screening labels are all one class."""


class NumericalError(OncopulseError):
    """A non-finite value appeared where a finite one is required."""


class TrainingDivergedError(NumericalError):
    """Training loss became non-finite."""

    def __init__(self, epoch: int, batch: int):
        super().__init__(f"training diverged at epoch {epoch}, batch {batch}")
        self.epoch = epoch
        self.batch = batch


class BudgetError(OncopulseError):
    """Exact computation would exceed its enumeration budget."""


class SinkError(OncopulseError):
    """A delivery sink rejected or failed a batch."""


class PartialDeliveryError(OncopulseError):
    """Stream emission gave up after retries; names the last delivered point."""

    def __init__(self, patient_id: str, metric: str, last_delivered_t: int | None):
        where = str(last_delivered_t) if last_delivered_t is not None else "none"
        super().__init__(
            f"delivery failed for {patient_id}/{metric}; last delivered timestamp: {where}"
        )
        self.patient_id = patient_id
        self.metric = metric
        self.last_delivered_t = last_delivered_t


class ProviderError(OncopulseError):
    """A pluggable text provider failed to produce output."""
