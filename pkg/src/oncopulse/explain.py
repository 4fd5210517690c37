"""Shapley attribution over interpretable feature groups, plus the tiered
plain-language explanation.

Inputs are keyed by group: ``x`` and ``reference`` map each group_id to that
group's input fragment, and masking a group means substituting its fragment
with the reference's. Groups therefore partition the value function's input
by construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import SimpleNamespace
from typing import Callable

import numpy as np

from .errors import BudgetError, ConfigError
from .records import Attribution, RiskAssessment, VisitRecord

ASSETS_DIR = Path(__file__).parent / "assets"

GroupedInput = dict[str, object]
ValueFn = Callable[[GroupedInput], float]

TIERS = ("routine", "monitor", "refer")


@dataclass(frozen=True)
class FeatureGroup:
    """One interpretable unit of attribution.

    The masking rule is positional: replacing ``x[group_id]`` with
    ``reference[group_id]`` removes this group's influence.
    """

    group_id: str
    label: str


DEFAULT_GROUPS = (
    FeatureGroup("chest_discomfort", "Chest Discomfort"),
    FeatureGroup("palpitations", "Palpitations"),
    FeatureGroup("shortness_of_breath", "Shortness of Breath"),
    FeatureGroup("heart_rate", "Heart Rate"),
    FeatureGroup("respiration", "Respiration"),
    FeatureGroup("spo2", "Blood Oxygen"),
    FeatureGroup("treatment_history", "Treatment History"),
    FeatureGroup("demographics", "Demographics"),
)

MAX_EXACT_GROUPS = 12


def _check_groups(groups, x, reference):
    if not groups:
        raise ConfigError("at least one feature group is required")
    ids = [g.group_id for g in groups]
    labels = [g.label for g in groups]
    if len(set(ids)) != len(ids) or len(set(labels)) != len(labels):
        raise ConfigError("group ids and labels must be unique")
    for gid in ids:
        if gid not in x or gid not in reference:
            raise ConfigError(f"group {gid!r} missing from x or reference")


def _attributions(groups, phis) -> list[Attribution]:
    total = sum(abs(p) for p in phis)
    attrs = [
        Attribution(
            group_id=g.group_id,
            label=g.label,
            phi=p,
            share=(abs(p) / total) if total > 0 else 0.0,
        )
        for g, p in zip(groups, phis)
    ]
    attrs.sort(key=lambda a: (-abs(a.phi), a.label))
    return attrs


def shapley_exact(
    value_fn: ValueFn,
    x: GroupedInput,
    reference: GroupedInput,
    groups=DEFAULT_GROUPS,
) -> list[Attribution]:
    """Exact Shapley values by coalition enumeration.

    Every coalition's value is computed once (2^n evaluations); per-group
    sums use fsum, so the symmetry and dummy axioms hold exactly, not just
    within float-accumulation noise.
    """
    _check_groups(groups, x, reference)
    n = len(groups)
    if n > MAX_EXACT_GROUPS:
        raise BudgetError(
            f"{n} groups exceeds the exact enumeration budget of "
            f"{MAX_EXACT_GROUPS}; use shapley_sampled instead"
        )
    ids = [g.group_id for g in groups]

    values = np.empty(1 << n)
    for mask in range(1 << n):
        merged = {
            gid: (x[gid] if mask >> i & 1 else reference[gid])
            for i, gid in enumerate(ids)
        }
        values[mask] = float(value_fn(merged))

    fact = [math.factorial(i) for i in range(n + 1)]
    weight = [fact[s] * fact[n - 1 - s] / fact[n] for s in range(n)]

    phis = []
    for i in range(n):
        terms = []
        for mask in range(1 << n):
            if mask >> i & 1:
                continue
            s = bin(mask).count("1")
            terms.append(weight[s] * (values[mask | (1 << i)] - values[mask]))
        phis.append(math.fsum(terms))
    return _attributions(groups, phis)


@dataclass
class SampledAttributions:
    attributions: list[Attribution]
    stderr: dict[str, float]
    n_permutations: int


def shapley_sampled(
    value_fn: ValueFn,
    x: GroupedInput,
    reference: GroupedInput,
    groups=DEFAULT_GROUPS,
    n_permutations: int = 2000,
    seed: int = 0,
) -> SampledAttributions:
    """Antithetic permutation sampling with per-group Monte-Carlo errors.

    Permutations are drawn in antithetic pairs (a permutation and its
    reverse), which cancels first-order sampling noise. Coalition values
    are memoized, so repeated prefixes cost nothing.
    """
    _check_groups(groups, x, reference)
    if n_permutations < 10:
        raise ConfigError("n_permutations must be at least 10")
    n = len(groups)
    ids = [g.group_id for g in groups]
    rng = np.random.default_rng(seed)

    cache: dict[frozenset, float] = {}

    def coalition_value(included: frozenset) -> float:
        if included not in cache:
            merged = {
                gid: (x[gid] if i in included else reference[gid])
                for i, gid in enumerate(ids)
            }
            cache[included] = float(value_fn(merged))
        return cache[included]

    perms = []
    while len(perms) < n_permutations:
        p = rng.permutation(n)
        perms.append(p)
        if len(perms) < n_permutations:
            perms.append(p[::-1])

    marginals = np.zeros((len(perms), n))
    for row, perm in enumerate(perms):
        included: frozenset = frozenset()
        prev = coalition_value(included)
        for g in perm:
            included = included | {int(g)}
            cur = coalition_value(included)
            marginals[row, g] = cur - prev
            prev = cur

    phis = marginals.mean(axis=0)
    m = len(perms)
    stderr = marginals.std(axis=0, ddof=1) / math.sqrt(m)
    return SampledAttributions(
        attributions=_attributions(groups, phis.tolist()),
        stderr={ids[i]: float(stderr[i]) for i in range(n)},
        n_permutations=m,
    )


# -- tiering and narrative ------------------------------------------------


@dataclass(frozen=True)
class ExplainConfig:
    monitor_threshold: float = 0.3
    refer_threshold: float = 0.6
    symptom_weights: dict = field(
        default_factory=lambda: {
            "chest_discomfort": 0.9,
            "shortness_of_breath": 0.7,
            "palpitations": 0.4,
        }
    )
    vitals_weights: dict = field(
        default_factory=lambda: {
            "heart_rate": 0.5,
            "respiration": 0.35,
            "spo2": 0.45,
        }
    )
    z_cap: float = 6.0

    def __post_init__(self):
        if not 0.0 <= self.monitor_threshold < self.refer_threshold <= 1.0:
            raise ConfigError("tier thresholds must satisfy 0 <= monitor < refer <= 1")

    @classmethod
    def from_dict(cls, d: dict) -> "ExplainConfig":
        t = d.get("tier_thresholds", [0.3, 0.6])
        return cls(
            monitor_threshold=float(t[0]),
            refer_threshold=float(t[1]),
            symptom_weights=dict(d.get("symptom_weights", cls().symptom_weights)),
            vitals_weights=dict(d.get("vitals_weights", cls().vitals_weights)),
            z_cap=float(d.get("z_cap", 6.0)),
        )


def load_explain_config(path: str | Path | None = None) -> ExplainConfig:
    p = Path(path) if path else ASSETS_DIR / "explain_config.json"
    return ExplainConfig.from_dict(json.loads(p.read_text(encoding="utf-8")))


def tier_for(score: float, config: ExplainConfig) -> str:
    if score < config.monitor_threshold:
        return "routine"
    if score < config.refer_threshold:
        return "monitor"
    return "refer"


_ACTIONS = {
    "routine": "Continue routine monitoring.",
    "monitor": "Increase monitoring attention and review the next daily summaries closely.",
    "refer": "Contact the care team to consider a cardiology referral.",
}


def _format_top(attrs: list[Attribution]) -> str:
    top = [a for a in attrs if a.share > 0][:3]
    if not top:
        return "No single factor stands out as elevating risk."
    parts = [f"{a.label} ({a.share:.0%})" for a in top]
    if len(parts) == 1:
        listed = parts[0]
    else:
        listed = ", ".join(parts[:-1]) + " and " + parts[-1]
    return f"Main contributors: {listed}."


@dataclass
class ExplanationReport:
    assessment: RiskAssessment
    attributions: list[Attribution]
    narrative: str
    tier: str


def render_explanation(
    assessment: RiskAssessment,
    attributions: list[Attribution],
    config: ExplainConfig | None = None,
) -> ExplanationReport:
    """Deterministic template: score, horizon, top-3 groups, tier action."""
    config = config or ExplainConfig()
    tier = tier_for(assessment.score, config)
    ordered = sorted(attributions, key=lambda a: (-abs(a.phi), a.label))
    narrative = (
        f"Estimated {assessment.score:.0%} chance of a cardiac event within "
        f"the next {assessment.horizon_days:.0f} days. "
        f"{_format_top(ordered)} "
        f"Recommended action: {_ACTIONS[tier]}"
    )
    return ExplanationReport(
        assessment=assessment,
        attributions=ordered,
        narrative=narrative,
        tier=tier,
    )


# -- model-backed assessment ------------------------------------------------


@dataclass
class AssessmentInputs:
    """Everything the combined risk view needs about one patient right now."""

    patient_id: str
    t: int
    age: float
    sex: str
    cancer_stage: str
    treatment_type: str
    visits: list[VisitRecord] = field(default_factory=list)
    symptoms: dict[str, bool] = field(default_factory=dict)
    vitals_z: dict[str, float] = field(default_factory=dict)


def _history_part(visits: list[VisitRecord]) -> tuple:
    return tuple((v.visit_time, tuple(v.tokens())) for v in visits)


def _history_visits(part: tuple, patient_id: str) -> list[VisitRecord]:
    return [
        VisitRecord(patient_id=patient_id, visit_time=t, codes=list(tokens),
                    procedures=[], medications=[])
        for t, tokens in part
    ]


def assessment_value_fn(model, inputs: AssessmentInputs, config: ExplainConfig):
    """Value function for Shapley: combined event probability at the horizon.

    The model's linear score is shifted additively by symptom flags and by
    capped vitals deviations, then mapped through the survival head. The
    reference is a history-free patient at demographic and vital baselines.
    """
    x: GroupedInput = {
        "chest_discomfort": bool(inputs.symptoms.get("chest_discomfort", False)),
        "palpitations": bool(inputs.symptoms.get("palpitations", False)),
        "shortness_of_breath": bool(inputs.symptoms.get("shortness_of_breath", False)),
        "heart_rate": float(inputs.vitals_z.get("heart_rate", 0.0)),
        "respiration": float(inputs.vitals_z.get("respiration", 0.0)),
        "spo2": float(inputs.vitals_z.get("spo2", 0.0)),
        "treatment_history": _history_part(inputs.visits),
        "demographics": (inputs.age, inputs.sex, inputs.cancer_stage, inputs.treatment_type),
    }
    reference: GroupedInput = {
        "chest_discomfort": False,
        "palpitations": False,
        "shortness_of_breath": False,
        "heart_rate": 0.0,
        "respiration": 0.0,
        "spo2": 0.0,
        "treatment_history": (),
        "demographics": (model.codec.age_mean, "", "", ""),
    }

    def linear_score(parts: GroupedInput) -> float:
        age, sex, stage, treatment = parts["demographics"]
        subject = SimpleNamespace(
            patient_id=inputs.patient_id, age=age, sex=sex,
            cancer_stage=stage, treatment_type=treatment,
        )
        visits = _history_visits(parts["treatment_history"], inputs.patient_id)
        s = model.score(subject, visits)
        for symptom, weight in config.symptom_weights.items():
            if parts.get(symptom):
                s += weight
        for metric, weight in config.vitals_weights.items():
            z = abs(float(parts.get(metric, 0.0)))
            s += weight * min(z, config.z_cap) / config.z_cap
        return s

    def value(parts: GroupedInput) -> float:
        s = linear_score(parts)
        return float(model.head.event_prob(
            np.array([model.horizon_days]), np.array([s]))[0])

    return value, x, reference, linear_score


def build_assessment(model, inputs: AssessmentInputs,
                     config: ExplainConfig | None = None) -> RiskAssessment:
    """Score, attribute, and narrate one patient's current risk."""
    config = config or ExplainConfig()
    value, x, reference, linear_score = assessment_value_fn(model, inputs, config)
    attributions = shapley_exact(value, x, reference, DEFAULT_GROUPS)
    assessment = RiskAssessment(
        patient_id=inputs.patient_id,
        t=inputs.t,
        horizon_days=model.horizon_days,
        score=value(x),
        linear_score=linear_score(x),
        attributions=attributions,
        source="model",
    )
    report = render_explanation(assessment, attributions, config)
    assessment.narrative = report.narrative
    assessment.tier = report.tier
    return assessment
