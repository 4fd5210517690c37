"""Pre-training risk-factor screening.

An L2-regularized logistic regression maps bag-of-token visit counts plus
static features to the event-within-horizon label. Tokens whose
standardized coefficients are clearly positive are kept as screened risk
factors; they seed the encoder's static indicator features and give
clinicians a first, linear view of what drives risk in the cohort.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateLabelsError, NumericalError
from ..sim import CANCER_STAGES, TREATMENT_TYPES, Cohort
from .layers import sigmoid


@dataclass
class LogisticFit:
    weights: np.ndarray
    bias: float
    n_iter: int
    converged: bool

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(X @ self.weights + self.bias)


def fit_logistic(
    X: np.ndarray,
    y: np.ndarray,
    l2: float = 0.0,
    max_iter: int = 5000,
    tol: float = 1e-6,
) -> LogisticFit:
    """Full-batch Nesterov gradient descent on mean logistic loss + l2/2 ||w||^2.

    The step size is 1/L with L the loss gradient's Lipschitz constant
    (largest singular value argument), so no learning-rate tuning is needed.
    The intercept is not penalized. Stops when the gradient's max norm
    drops below ``tol``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.min() == y.max():
        raise DegenerateLabelsError("screening labels are all one class")
    n, p = X.shape
    Xa = np.hstack([X, np.ones((n, 1))])
    smax = np.linalg.norm(Xa, 2)
    lip = smax * smax / (4.0 * n) + l2
    step = 1.0 / lip
    penalty = np.ones(p + 1)
    penalty[-1] = 0.0  # intercept is free

    w = np.zeros(p + 1)
    w_prev = w.copy()
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        look = w + (it - 1.0) / (it + 2.0) * (w - w_prev)
        z = Xa @ look
        grad = Xa.T @ (sigmoid(z) - y) / n + l2 * penalty * look
        if not np.all(np.isfinite(grad)):
            raise NumericalError("screening gradient diverged")
        w_prev = w
        w = look - step * grad
        if np.max(np.abs(grad)) < tol:
            converged = True
            break
    return LogisticFit(weights=w[:-1], bias=float(w[-1]), n_iter=it, converged=converged)


@dataclass
class ScreeningResult:
    selected: list[tuple[str, float]]  # (token, standardized coefficient), descending
    fit: LogisticFit = field(repr=False)
    feature_names: list[str] = field(default_factory=list, repr=False)

    @property
    def tokens(self) -> list[str]:
        return [t for t, _ in self.selected]


def cohort_design_matrix(cohort: Cohort, horizon_days: float) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Standardized [token counts | age | stage | treatment one-hot] and labels."""
    tokens = cohort.all_tokens()
    token_col = {t: i for i, t in enumerate(tokens)}
    n_tok = len(tokens)
    names = list(tokens) + ["age", "stage"] + [f"treatment={t}" for t in TREATMENT_TYPES]
    X = np.zeros((len(cohort.profiles), len(names)))
    y = np.zeros(len(cohort.profiles))
    for i, p in enumerate(cohort.profiles):
        for v in cohort.visits[p.patient_id]:
            for tok in v.tokens():
                X[i, token_col[tok]] += 1.0
        X[i, n_tok] = p.age
        X[i, n_tok + 1] = CANCER_STAGES.index(p.cancer_stage)
        X[i, n_tok + 2 + TREATMENT_TYPES.index(p.treatment_type)] = 1.0
        o = cohort.outcomes[p.patient_id]
        y[i] = 1.0 if (o.observed and o.event_time <= horizon_days) else 0.0
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0.0] = 1.0
    return (X - mu) / sd, y, names


def screen_risk_factors(
    cohort: Cohort,
    horizon_days: float = 90.0,
    top_k: int = 10,
    l2: float = 0.05,
    min_coefficient: float = 0.33,
) -> ScreeningResult:
    """Tokens with clearly positive standardized coefficients, strongest first.

    ``min_coefficient`` is the noise floor: in a cohort with no planted
    signal the largest coefficients stay below it, so the selection comes
    back (near) empty instead of reporting noise.
    """
    X, y, names = cohort_design_matrix(cohort, horizon_days)
    fit = fit_logistic(X, y, l2=l2)
    token_set = set(cohort.all_tokens())
    scored = [
        (name, float(w))
        for name, w in zip(names, fit.weights)
        if name in token_set and w > min_coefficient
    ]
    scored.sort(key=lambda kv: (-kv[1], kv[0]))
    return ScreeningResult(selected=scored[:top_k], fit=fit, feature_names=names)
