"""Discrimination metrics: ROC AUC and Harrell's concordance index."""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateLabelsError


def roc_auc(labels, scores) -> float:
    """Probability a random positive outscores a random negative (ties half).

    Midrank (Mann-Whitney) formulation, exact under tied scores.
    """
    labels = np.asarray(labels, dtype=bool)
    scores = np.asarray(scores, dtype=float)
    if labels.all() or not labels.any():
        raise DegenerateLabelsError("AUC needs both classes present")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores))
    ranks[order] = np.arange(1, len(scores) + 1)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        if j > i:
            ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    return float((ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def concordance_index(times, observed, scores) -> float:
    """Harrell's C: fraction of comparable pairs ranked correctly.

    A pair (i, j) is comparable when t_i < t_j and patient i had an observed
    event; it is concordant when the earlier-event patient has the higher
    risk score, and tied scores earn half credit.
    """
    times = np.asarray(times, dtype=float)
    observed = np.asarray(observed, dtype=bool)
    scores = np.asarray(scores, dtype=float)
    num = 0.0
    den = 0
    for i in np.flatnonzero(observed):
        later = times > times[i]
        den += int(later.sum())
        num += float((scores[i] > scores[later]).sum())
        num += 0.5 * float((scores[i] == scores[later]).sum())
    if den == 0:
        raise DegenerateLabelsError("no comparable pairs for concordance")
    return num / den
