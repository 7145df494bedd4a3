"""Mutual information and capacity of a binary channel, in bits."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .channel import TransitionMatrix
from .errors import DegenerateChannelError

DEGENERACY_TOL = 1e-12
# Below this |p00 + p11 - 1| the closed-form prior loses ~eps/D^2 accuracy,
# so the prior is found numerically instead.
ILL_CONDITIONED_TOL = 1e-4
PRIOR_XTOL = 1e-10


@dataclass(frozen=True)
class CapacityResult:
    p1_star: float
    wp: float
    capacity_bits: float
    method: str  # "closed_form" or "numeric"


def entropy_term(z):
    """-z log2(z), with the value 0 at z = 0."""
    arr = np.asarray(z, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)) or np.any(np.isnan(arr)):
        raise ValueError(f"entropy_term needs z in [0, 1], got {z}")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(arr > 0.0, -arr * np.log2(np.where(arr > 0.0, arr, 1.0)), 0.0)
    return out if out.ndim else float(out)


def binary_entropy(p):
    return entropy_term(p) + entropy_term(1.0 - np.asarray(p, dtype=float))


def output_entropy(t: TransitionMatrix, p1):
    """H(Y) for input prior Pr(X = 1) = p1."""
    p1 = np.asarray(p1, dtype=float)
    y1 = t.p11 * p1 + (1.0 - t.p00) * (1.0 - p1)
    y0 = (1.0 - t.p11) * p1 + t.p00 * (1.0 - p1)
    return entropy_term(np.clip(y1, 0.0, 1.0)) + entropy_term(np.clip(y0, 0.0, 1.0))


def conditional_entropy(t: TransitionMatrix, p1):
    """H(Y|X) for input prior Pr(X = 1) = p1."""
    p1 = np.asarray(p1, dtype=float)
    out = (1.0 - p1) * binary_entropy(t.p00) + p1 * binary_entropy(t.p11)
    return out if out.ndim else float(out)


def mutual_information(t: TransitionMatrix, p1):
    out = output_entropy(t, p1) - conditional_entropy(t, p1)
    return out if np.ndim(out) else float(out)


def optimal_prior(t: TransitionMatrix) -> tuple[float, float]:
    """Closed-form maximizing prior p1* and wp = Pr(Y = 0) at that prior.

    Raises DegenerateChannelError when p00 + p11 - 1 is (numerically) zero.
    """
    d = t.p00 + t.p11 - 1.0
    if abs(d) < DEGENERACY_TOL:
        raise DegenerateChannelError(f"p00 + p11 - 1 = {d:.3g}")
    expo = math.log(2.0) * (binary_entropy(t.p00) - binary_entropy(t.p11)) / d
    wp = 0.0 if expo > 700.0 else 1.0 / (1.0 + math.exp(expo))
    p1 = (t.p00 - wp) / d
    return min(max(p1, 0.0), 1.0), wp


def _numeric_prior(t: TransitionMatrix) -> float:
    res = minimize_scalar(lambda p: -mutual_information(t, p), bounds=(0.0, 1.0),
                          method="bounded", options={"xatol": PRIOR_XTOL})
    # the optimum of a concave function can sit on an edge
    cands = [res.x, 0.0, 1.0]
    return max(cands, key=lambda p: mutual_information(t, p))


def channel_capacity(t: TransitionMatrix) -> CapacityResult:
    d = t.p00 + t.p11 - 1.0
    if abs(d) < DEGENERACY_TOL:
        # both inputs give the same output law
        return CapacityResult(0.5, 0.5 * (t.p00 + t.p01), 0.0, "numeric")
    p1, wp = optimal_prior(t)
    raw = (t.p00 - wp) / d
    method = "closed_form"
    if abs(d) < ILL_CONDITIONED_TOL or not 0.0 <= raw <= 1.0:
        p1 = _numeric_prior(t)
        wp = (1.0 - t.p11) * p1 + t.p00 * (1.0 - p1)
        method = "numeric"
    c = mutual_information(t, p1)
    return CapacityResult(p1, wp, min(max(c, 0.0), 1.0), method)
