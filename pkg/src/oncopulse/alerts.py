"""Per-patient baseline learning and deviation alerting.

Baselines are learned online with Welford's single-pass moments, optionally
with exponential forgetting so the baseline tracks slow physiological drift
(the effective memory is ``window_days`` of samples at the device cadence).
A sample deviates when its z-score against the baseline learned BEFORE the
sample crosses ``z_threshold``; an alert fires only after
``persistence_samples`` consecutive deviating samples, and repeat alerts on
the same metric are rate-limited by ``cooldown_minutes``.

Red-flag symptom alerts are constructed directly and bypass persistence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .records import (
    METRIC_LABELS,
    SAMPLE_PERIOD_MS,
    SEVERITY_CRITICAL,
    SEVERITY_WARNING,
    Alert,
    VitalSample,
)
from .store import Store


@dataclass
class BaselineStats:
    """Streaming mean/variance; ``decay`` < 1 forgets old samples exponentially.

    With ``decay`` of exactly 1.0 this is plain Welford and matches a
    two-pass computation to floating-point accuracy.
    """

    count: float = 0.0  # effective sample weight
    mean: float = 0.0
    m2: float = 0.0
    decay: float = 1.0

    def update(self, x: float) -> None:
        self.count = self.decay * self.count + 1.0
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 = self.decay * self.m2 + delta * (x - self.mean)

    @property
    def variance(self) -> float:
        if self.count <= 1.0:
            return 0.0
        return self.m2 / (self.count - 1.0)

    @property
    def std(self) -> float:
        return math.sqrt(max(0.0, self.variance))

    def z_score(self, x: float) -> float:
        """Signed deviation of x from the current baseline, in baseline stds."""
        if self.count < 2.0:
            return 0.0
        s = self.std
        if s == 0.0:
            if x == self.mean:
                return 0.0
            return math.inf if x > self.mean else -math.inf
        return (x - self.mean) / s

    def to_dict(self) -> dict:
        return {"count": self.count, "mean": self.mean, "m2": self.m2, "decay": self.decay}

    @classmethod
    def from_dict(cls, d: dict) -> "BaselineStats":
        return cls(
            count=float(d.get("count", 0.0)),
            mean=float(d.get("mean", 0.0)),
            m2=float(d.get("m2", 0.0)),
            decay=float(d.get("decay", 1.0)),
        )


@dataclass(frozen=True)
class AlertPolicy:
    z_threshold: float = 3.0
    persistence_samples: int = 30  # 300 s at the 10 s cadence
    cooldown_minutes: float = 60.0
    min_baseline_count: int = 8640  # one full day before alerts may fire
    window_days: float = 14.0  # 0 disables forgetting

    def __post_init__(self) -> None:
        if self.z_threshold <= 0:
            raise ConfigError("z_threshold must be positive")
        if self.persistence_samples < 1:
            raise ConfigError("persistence_samples must be >= 1")
        if self.cooldown_minutes < 0:
            raise ConfigError("cooldown_minutes must be >= 0")
        if self.min_baseline_count < 2:
            raise ConfigError("min_baseline_count must be >= 2")
        if self.window_days < 0:
            raise ConfigError("window_days must be >= 0")

    @property
    def decay(self) -> float:
        if self.window_days == 0:
            return 1.0
        samples_per_day = 86_400_000 // SAMPLE_PERIOD_MS
        return 1.0 - 1.0 / (self.window_days * samples_per_day)

    @property
    def cooldown_ms(self) -> float:
        return self.cooldown_minutes * 60_000.0

    def to_dict(self) -> dict:
        return {
            "z_threshold": self.z_threshold,
            "persistence_samples": self.persistence_samples,
            "cooldown_minutes": self.cooldown_minutes,
            "min_baseline_count": self.min_baseline_count,
            "window_days": self.window_days,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AlertPolicy":
        defaults = cls()
        return cls(
            z_threshold=float(d.get("z_threshold", defaults.z_threshold)),
            persistence_samples=int(d.get("persistence_samples", defaults.persistence_samples)),
            cooldown_minutes=float(d.get("cooldown_minutes", defaults.cooldown_minutes)),
            min_baseline_count=int(d.get("min_baseline_count", defaults.min_baseline_count)),
            window_days=float(d.get("window_days", defaults.window_days)),
        )


@dataclass
class MetricAlertState:
    stats: BaselineStats = field(default_factory=BaselineStats)
    streak: int = 0
    z_peak: float = 0.0
    last_alert_t: int | None = None

    def to_dict(self) -> dict:
        return {
            "stats": self.stats.to_dict(),
            "streak": self.streak,
            "z_peak": self.z_peak,
            "last_alert_t": self.last_alert_t,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricAlertState":
        return cls(
            stats=BaselineStats.from_dict(d.get("stats", {})),
            streak=int(d.get("streak", 0)),
            z_peak=float(d.get("z_peak", 0.0)),
            last_alert_t=d.get("last_alert_t"),
        )


def fold_sample(
    state: MetricAlertState,
    patient_id: str,
    metric: str,
    t: int,
    value: float,
    policy: AlertPolicy,
) -> Alert | None:
    """Advance one metric's alert state by one sample; maybe emit an alert.

    The z-score is taken against the baseline as it stood before this
    sample, then the sample joins the baseline. Deterministic: equal states
    and inputs always produce equal outputs.
    """
    stats = state.stats
    ready = stats.count >= policy.min_baseline_count
    z = stats.z_score(value) if ready else 0.0
    if abs(z) >= policy.z_threshold:
        state.streak += 1
        state.z_peak = max(state.z_peak, abs(z))
    else:
        state.streak = 0
        state.z_peak = 0.0
    stats.update(value)

    if state.streak < policy.persistence_samples:
        return None
    # The streak is consumed whether or not the cooldown lets the alert out.
    z_peak, state.streak, state.z_peak = state.z_peak, 0, 0.0
    if state.last_alert_t is not None and t - state.last_alert_t < policy.cooldown_ms:
        return None
    state.last_alert_t = t
    severity = SEVERITY_CRITICAL if z_peak >= 2.0 * policy.z_threshold else SEVERITY_WARNING
    label = METRIC_LABELS.get(metric, metric)
    peak_text = "inf" if math.isinf(z_peak) else f"{z_peak:.1f}"
    return Alert(
        alert_id=f"al-{patient_id}-{metric}-{t}",
        patient_id=patient_id,
        source=metric,
        severity=severity,
        t_raised=t,
        z_peak=None if math.isinf(z_peak) else round(z_peak, 3),
        message=(
            f"{label} deviated from baseline (peak |z|={peak_text}) "
            f"for {policy.persistence_samples} consecutive samples"
        ),
    )


def symptom_alert(patient_id: str, symptom: str, t: int) -> Alert:
    """Red-flag symptom alert: always critical, no persistence requirement."""
    return Alert(
        alert_id=f"al-{patient_id}-symptom-{symptom}-{t}",
        patient_id=patient_id,
        source=f"symptom:{symptom}",
        severity=SEVERITY_CRITICAL,
        t_raised=t,
        z_peak=None,
        message=f"red-flag symptom reported: {symptom.replace('_', ' ')}",
    )


class AlertEngine:
    """Wires the fold to the store: persistent state, persistent alerts."""

    def __init__(self, store: Store, policy: AlertPolicy | None = None):
        self.store = store
        self.policy = policy or AlertPolicy()

    def load_state(self, patient_id: str) -> dict[str, MetricAlertState]:
        raw = self.store.load_baselines(patient_id)
        return {m: MetricAlertState.from_dict(d) for m, d in raw.items()}

    def save_state(self, patient_id: str, state: dict[str, MetricAlertState]) -> None:
        self.store.save_baselines(patient_id, {m: s.to_dict() for m, s in state.items()})

    def process(self, patient_id: str, metric: str, samples: list[VitalSample]) -> list[Alert]:
        """Fold a batch of samples (sorted by time) and persist any alerts."""
        state = self.load_state(patient_id)
        metric_state = state.setdefault(
            metric, MetricAlertState(stats=BaselineStats(decay=self.policy.decay))
        )
        alerts = []
        for s in sorted(samples, key=lambda s: s.t):
            alert = fold_sample(metric_state, patient_id, metric, s.t, s.value, self.policy)
            if alert is not None:
                alerts.append(alert)
        for a in alerts:
            self.store.append_alert(a)
        self.save_state(patient_id, state)
        return alerts

    def raise_symptom_alert(self, patient_id: str, symptom: str, t: int) -> Alert:
        alert = symptom_alert(patient_id, symptom, t)
        self.store.append_alert(alert)
        return alert
