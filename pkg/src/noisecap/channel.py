"""Binary channel: dephased-coherent encoding, amplitude damping, threshold decoding.

Transition probabilities use p_ij = Pr(output i | input j). Output 0 means
|y| < theta; the boundary |y| = theta has zero probability and is sent to 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SeriesConvergenceError
from .quadist import NumericsConfig, SignalDensity, interval_probability
from .specfn import erf, hermite_table, log_factorial

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class ChannelParams:
    r: float = 5.0
    tau: float = 0.5
    theta: float = 4.2
    sigma: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r > 0):
            raise ValueError(f"r must be positive, got {self.r}")
        for name in ("tau", "theta", "sigma"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {v}")

    @property
    def lam(self) -> float:
        """Mean photon number of symbol 1 after damping."""
        return damp(encode(1, self.r), self.tau)


@dataclass(frozen=True)
class TransitionMatrix:
    p00: float
    p01: float

    def __post_init__(self):
        for name in ("p00", "p01"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")

    @property
    def p10(self) -> float:
        return 1.0 - self.p00

    @property
    def p11(self) -> float:
        return 1.0 - self.p01

    @classmethod
    def from_diagonal(cls, p00: float, p11: float) -> TransitionMatrix:
        return cls(p00, 1.0 - p11)


def encode(bit: int, r: float) -> float:
    """Mean photon number of the state sent for ``bit`` (vacuum or dephased coherent)."""
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit}")
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    return 0.0 if bit == 0 else r * r


def damp(lam: float, tau: float) -> float:
    """Amplitude map r -> r e^{-tau}, applied to the mean photon number."""
    if lam < 0 or tau < 0:
        raise ValueError("lam and tau must be non-negative")
    return lam * math.exp(-2.0 * tau)


def vacuum_inside(theta: float, sigma: float) -> float:
    """p00 = erf(theta / sqrt(1 + sigma^2))."""
    return erf(theta / math.sqrt(1.0 + sigma * sigma))


def transition_matrix(p: ChannelParams, cfg: NumericsConfig | None = None) -> TransitionMatrix:
    cfg = cfg or NumericsConfig()
    p00 = vacuum_inside(p.theta, p.sigma)
    sd = SignalDensity.build(p.lam, p.sigma, cfg)
    if p.theta >= sd.y_max(cfg):
        # every bit of retained mass lies inside the decoding interval
        p01 = 1.0
    else:
        p01 = interval_probability(sd, -p.theta, p.theta, cfg)
    return TransitionMatrix(p00, p01)


def p01_series(p: ChannelParams, n_terms: int | None = None, tol: float = 1e-13,
               max_terms: int = 600, cancel_tol: float = 1e-8) -> float:
    """p01 from the explicit double sum over (n, k), as a cross-check.

    The k = n terms need H_{-1}; they are taken as the m = 0 antiderivative,
    so that term contributes (sqrt(pi)/2) erf(theta / sqrt(1 + sigma^2)).
    With ``n_terms=None`` the sum runs until three consecutive n-shells are
    below ``tol``; with an explicit ``n_terms`` the last shell must be.
    Rounding in the alternating terms grows like e^{2 lam} at sigma = 0, so the
    sum is rejected once eps * sum|terms| exceeds ``cancel_tol``.
    """
    if n_terms is not None and n_terms < 1:
        raise ValueError("n_terms must be positive")
    lam = p.lam
    s2 = 1.0 + p.sigma**2
    t = p.theta / math.sqrt(s2)
    limit = max_terms if n_terms is None else n_terms

    # log|B_m| and sign, B_m = H_{2m-1}(0) - e^{-t^2} H_{2m-1}(t); H_odd(0) = 0
    scaled = hermite_table(2 * limit + 1, t, gaussian=False)
    log_b = np.full(limit + 1, -np.inf)
    sign_b = np.zeros(limit + 1)
    erf_t = erf(t)
    if erf_t > 0:
        log_b[0] = math.log(0.5 * math.sqrt(math.pi) * erf_t)
        sign_b[0] = 1.0
    for m in range(1, limit + 1):
        j = 2 * m - 1
        h = scaled[j]
        if h != 0.0:
            # H_j = h * sqrt(2^j j! sqrt(pi))
            log_b[m] = -t * t + math.log(abs(h)) + 0.5 * (j * _LN2 + log_factorial(j)
                                                          + 0.5 * math.log(math.pi))
            sign_b[m] = -math.copysign(1.0, h)

    if lam == 0.0:
        # only the n = k = 0 term survives
        return erf_t

    log_half_lam = math.log(0.5 * lam)
    log_s2 = math.log(s2)
    terms: list[float] = []
    abs_sum = 0.0
    quiet = 0
    prev = 0.0
    shell = math.inf
    for n in range(limit + 1):
        for k in range(n + 1):
            m = n - k
            if sign_b[m] == 0.0:
                continue
            log_t = (-lam + n * log_half_lam - 2.0 * log_factorial(m) + k * _LN2
                     - log_factorial(k) - m * log_s2 + log_b[m])
            term = math.exp(log_t)
            abs_sum += term
            terms.append(sign_b[m] * term)
        cur = math.fsum(terms)
        shell = abs(cur - prev)
        prev = cur
        if n_terms is None and n > lam:
            quiet = quiet + 1 if shell <= tol else 0
            if quiet >= 3:
                break
    else:
        if shell > tol:
            raise SeriesConvergenceError(
                f"series not converged after {limit} shells (last shell {shell:.3g})")
    if abs_sum * np.finfo(float).eps > cancel_tol:
        raise SeriesConvergenceError(
            f"series lost accuracy to cancellation (sum of |terms| = {abs_sum:.3g})")
    return 2.0 / math.sqrt(math.pi) * prev
