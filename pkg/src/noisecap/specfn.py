"""Special functions used by the quadrature densities.

Everything here is pure and works on floats; the Hermite routines also
accept numpy arrays for ``x``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HermiteOverflowError

_PI_MINUS_QUARTER = math.pi ** -0.25
_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_ERF_SPLIT = 2.0


def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence.

    Raises HermiteOverflowError if the value is not representable; use
    `hermite_function` for high orders.
    """
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * x
    with np.errstate(over="ignore", invalid="ignore"):
        for m in range(2, n + 1):
            h_prev, h = h, 2.0 * x * h - 2.0 * (m - 1) * h_prev
    if not np.all(np.isfinite(h)):
        raise HermiteOverflowError(f"H_{n}(x) overflows float64")
    return h if h.ndim else float(h)


def hermite_table(n_max: int, x, gaussian: bool = True) -> np.ndarray:
    """Orthonormal Hermite functions psi_0..psi_{n_max} at ``x``.

    Returns an array of shape ``(n_max + 1,) + x.shape``. With
    ``gaussian=False`` the factor exp(-x^2/2) is dropped, which gives
    H_n(x) / sqrt(2^n n! sqrt(pi)) and keeps large |x| from underflowing.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = _PI_MINUS_QUARTER * (np.exp(-0.5 * x * x) if gaussian else 1.0)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(2, n_max + 1):
        out[n] = math.sqrt(2.0 / n) * x * out[n - 1] - math.sqrt((n - 1) / n) * out[n - 2]
    return out


def hermite_function(n: int, x):
    """Orthonormal Hermite function psi_n(x) = H_n(x) e^{-x^2/2} / sqrt(2^n n! sqrt(pi))."""
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    val = hermite_table(n, x)[n]
    return val if val.ndim else float(val)


def erf(x: float) -> float:
    """Error function, absolute error below 1e-12.

    Power series inside |x| < 2, Lentz continued fraction for erfc outside.
    """
    x = float(x)
    if x < 0.0:
        return -erf(-x)
    if x < _ERF_SPLIT:
        return _erf_series(x)
    return 1.0 - _erfc_cf(x)


def _erf_series(x: float) -> float:
    # erf(x) = 2/sqrt(pi) e^{-x^2} sum 2^n x^{2n+1} / (2n+1)!!, all terms positive
    x2 = x * x
    term = x
    total = x
    n = 0
    while term > 1e-17 * total:
        n += 1
        term *= 2.0 * x2 / (2 * n + 1)
        total += term
    return _TWO_OVER_SQRT_PI * math.exp(-x2) * total


def _erfc_cf(x: float) -> float:
    # erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    tiny = 1e-300
    f = x
    c = x
    d = 0.0
    for k in range(1, 500):
        a = 0.5 * k
        d = x + a * d
        d = 1.0 / (d if d != 0.0 else tiny)
        c = x + a / c
        if c == 0.0:
            c = tiny
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x * x) / (math.sqrt(math.pi) * f)


def log_factorial(n: int) -> float:
    """ln(n!)."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if n < 2:
        return 0.0
    return math.lgamma(n + 1.0)


@dataclass(frozen=True)
class PoissonWeights:
    """Truncated Poisson law e^{-mean} mean^n / n! for n = 0..n_max."""

    mean: float
    weights: np.ndarray
    tail_tol: float

    @property
    def n_max(self) -> int:
        return len(self.weights) - 1

    @property
    def mass(self) -> float:
        return math.fsum(self.weights)


def poisson_weights(lam: float, tail_tol: float = 1e-12) -> PoissonWeights:
    """Poisson weights up to the first n_max whose cumulative mass reaches 1 - tail_tol."""
    if lam < 0 or not math.isfinite(lam):
        raise ValueError(f"mean must be finite and non-negative, got {lam}")
    if not 0.0 < tail_tol < 1.0:
        raise ValueError(f"tail_tol must lie in (0, 1), got {tail_tol}")
    if lam == 0.0:
        return PoissonWeights(0.0, np.ones(1), tail_tol)

    log_lam = math.log(lam)
    weights = []
    cum = 0.0
    n = 0
    while True:
        w = math.exp(-lam + n * log_lam - log_factorial(n))
        weights.append(w)
        cum += w
        if cum >= 1.0 - tail_tol:
            break
        # Past the mode the tail is dominated by a geometric series; this
        # stops the loop when round-off keeps cum from reaching 1 - tail_tol.
        ratio = lam / (n + 1)
        if ratio < 1.0 and w * ratio / (1.0 - ratio) < 0.5 * tail_tol:
            break
        n += 1
    return PoissonWeights(lam, np.array(weights), tail_tol)
