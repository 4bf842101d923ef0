"""Shannon information for the attacked key channel (base-2 throughout).

The legitimate channel is symmetric: correct symbol with probability F,
each of the N-1 shifts with probability D_m, so

    i_ab = log2(N) + F*log2(F) + sum_m D_m*log2(D_m).

The eavesdropper learns the shift branch m exactly and, within branch
m, her best symbol guess is off by d with probability

    p_d = |sum_n a[m, n] * exp(2j*pi*d*n/N)|^2 / (N * sum_n |a[m, n]|^2)

so her information is log2(N) minus the branch-averaged entropy of
those conditionals.
"""
from __future__ import annotations

import math

import numpy as np

from .cloner import AmplitudeMatrix, CloneParams, _coerce_matrix, fidelity_disturbances

PROB_ATOL = 1e-10


def _as_prob_dist(dist) -> np.ndarray:
    p = np.asarray(dist, dtype=float).reshape(-1)
    if p.size == 0:
        raise ValueError("empty probability distribution")
    if p.min() < -1e-12:
        raise ValueError(f"negative probability {p.min()}")
    if abs(p.sum() - 1.0) > PROB_ATOL:
        raise ValueError(f"probabilities sum to {p.sum()}, expected 1 within 1e-10")
    return np.clip(p, 0.0, None)


def entropy(dist) -> float:
    """Shannon entropy in bits; 0*log(0) = 0."""
    p = _as_prob_dist(dist)
    p = p[p > 0.0]
    return float(-(p * np.log2(p)).sum())


def i_ab(p: CloneParams | AmplitudeMatrix) -> float:
    """Mutual information of the sifted key symbols, in bits."""
    fid, dist = fidelity_disturbances(p)
    probs = np.concatenate(([fid], dist))
    n = probs.size
    return math.log2(n) - entropy(probs)


def eve_conditional(p: CloneParams | AmplitudeMatrix, m: int) -> np.ndarray:
    """Distribution of (Alice's symbol - Eve's estimate) within branch m."""
    a = _coerce_matrix(p)
    n = a.shape[0]
    row = a[m % n]
    weight = float(np.sum(np.abs(row) ** 2))
    if weight <= 0.0:
        raise ValueError(f"branch {m} has zero weight")
    d = np.arange(n)[:, None]
    amps = np.sum(row[None, :] * np.exp(2j * math.pi * d * np.arange(n)[None, :] / n), axis=1)
    return np.abs(amps) ** 2 / (n * weight)


def i_ae(p: CloneParams | AmplitudeMatrix) -> float:
    """Eavesdropper's information about Alice's sifted symbol, in bits."""
    a = _coerce_matrix(p)
    n = a.shape[0]
    branch_weights = np.sum(np.abs(a) ** 2, axis=1)
    acc = 0.0
    for m in range(n):
        if branch_weights[m] <= 0.0:
            continue
        acc += branch_weights[m] * entropy(eve_conditional(p, m))
    return math.log2(n) - acc
