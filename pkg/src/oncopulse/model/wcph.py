"""Weibull proportional-hazards head.

With shape k, scale lam, and a per-patient linear score s from the encoder:

    hazard   h(t|s) = (k/lam) * (t/lam)^(k-1) * exp(s)
    survival S(t|s) = exp(-(t/lam)^k * exp(s))
    NLL_i = -delta_i * [log k - k log lam + (k-1) log t_i + s_i]
            + (t_i/lam)^k * exp(s_i)

k and lam stay positive through a softplus reparameterization; their raw
values are the trainable parameters. Setting k = 1 collapses the model to
an exponential (constant-hazard) distribution, which the tests exploit as
a closed-form cross-check.
"""

from __future__ import annotations

import numpy as np

from ..errors import NumericalError
from .layers import Module, inv_softplus, sigmoid, softplus


class WeibullCoxHead(Module):
    def __init__(self, k_init: float = 1.0, lam_init: float = 90.0):
        super().__init__()
        if k_init <= 0 or lam_init <= 0:
            raise NumericalError("k and lam must start positive")
        self._add_param("raw_k", np.array([float(inv_softplus(k_init))]))
        self._add_param("raw_lam", np.array([float(inv_softplus(lam_init))]))

    @property
    def k(self) -> float:
        return float(softplus(self.p["raw_k"][0]))

    @property
    def lam(self) -> float:
        return float(softplus(self.p["raw_lam"][0]))

    # -- closed forms ---------------------------------------------------------

    def survival(self, t, s):
        """S(t|s); handles t = 0 exactly (survival one)."""
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        out = np.exp(-np.power(np.maximum(t, 0.0) / self.lam, self.k) * np.exp(s))
        return np.where(t <= 0.0, 1.0, out)

    def hazard(self, t, s):
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        if np.any(t <= 0):
            raise NumericalError("hazard requires t > 0")
        k, lam = self.k, self.lam
        return (k / lam) * np.power(t / lam, k - 1.0) * np.exp(s)

    def event_prob(self, t, s):
        """P(event by t | s) = 1 - S(t|s), computed with expm1 for precision."""
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        out = -np.expm1(-np.power(np.maximum(t, 0.0) / self.lam, self.k) * np.exp(s))
        return np.where(t <= 0.0, 0.0, out)

    # -- training -------------------------------------------------------------

    def nll(self, s, t, delta) -> np.ndarray:
        """Per-sample negative log likelihood."""
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        delta = np.asarray(delta, dtype=float)
        if np.any(t <= 0):
            raise NumericalError("event/censoring times must be positive")
        k, lam = self.k, self.lam
        if not (np.isfinite(k) and np.isfinite(lam) and k > 0 and lam > 0):
            raise NumericalError(f"survival head parameters collapsed: k={k}, lam={lam}")
        cum = np.power(t / lam, k) * np.exp(s)
        return -delta * (np.log(k) - k * np.log(lam) + (k - 1.0) * np.log(t) + s) + cum

    def nll_and_grad(self, s, t, delta) -> tuple[float, np.ndarray]:
        """Mean NLL over the batch; returns d(mean NLL)/ds and accumulates
        gradients for raw_k and raw_lam in ``self.g``."""
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        delta = np.asarray(delta, dtype=float)
        n = len(s)
        k, lam = self.k, self.lam
        loss = float(np.mean(self.nll(s, t, delta)))

        ratio_k = np.power(t / lam, k)
        log_ratio = np.log(t / lam)
        es = np.exp(s)
        ds = (-delta + ratio_k * es) / n
        dk = np.sum(-delta * (1.0 / k + log_ratio) + ratio_k * log_ratio * es) / n
        dlam = np.sum(delta * k / lam - (k / lam) * ratio_k * es) / n
        # chain through the softplus reparameterization
        self.g["raw_k"][0] += dk * sigmoid(self.p["raw_k"][0])
        self.g["raw_lam"][0] += dlam * sigmoid(self.p["raw_lam"][0])
        return loss, ds
