"""Quadrature-measurement densities for Fock mixtures, with Gaussian detector noise.

The broadened measurement uses the kernel

    K_sigma(u) = exp(-u^2 / sigma^2) / sqrt(pi sigma^2),

i.e. a Gaussian of variance sigma^2 / 2. With that convention the vacuum
outcome density has variance (1 + sigma^2) / 2 and
P(|y| < theta | vacuum) = erf(theta / sqrt(1 + sigma^2)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss

from .errors import QuadratureError
from .specfn import PoissonWeights, hermite_table, poisson_weights

_SQRT_PI = math.sqrt(math.pi)
_GL_ORDER = 20


@dataclass(frozen=True)
class NumericsConfig:
    """Accuracy knobs shared by every density and integral.

    ``y_max=None`` picks the cutoff per density as
    sqrt(2 n_max + 1) + 6 max(1, sigma).
    """

    tail_tol: float = 1e-12
    quad_tol: float = 1e-10
    y_max: float | None = None
    max_panels: int = 10**6

    def __post_init__(self):
        if not 0.0 < self.tail_tol < 1.0:
            raise ValueError(f"tail_tol must lie in (0, 1), got {self.tail_tol}")
        if not self.quad_tol > 0.0:
            raise ValueError(f"quad_tol must be positive, got {self.quad_tol}")
        if self.y_max is not None and not self.y_max > 0.0:
            raise ValueError(f"y_max must be positive, got {self.y_max}")
        if self.max_panels < 1:
            raise ValueError("max_panels must be at least 1")

    def cutoff(self, n_max: int, sigma: float) -> float:
        if self.y_max is not None:
            return self.y_max
        return math.sqrt(2 * n_max + 1) + 6.0 * max(1.0, sigma)


@dataclass(frozen=True)
class SignalDensity:
    """Outcome density of a Poisson mixture of Fock states seen through K_sigma."""

    lam: float
    sigma: float
    weights: PoissonWeights = field(repr=False)

    def __post_init__(self):
        if self.lam < 0 or self.sigma < 0:
            raise ValueError("lam and sigma must be non-negative")

    @classmethod
    def build(cls, lam: float, sigma: float, cfg: NumericsConfig | None = None) -> SignalDensity:
        cfg = cfg or NumericsConfig()
        return cls(lam, sigma, poisson_weights(lam, cfg.tail_tol))

    def y_max(self, cfg: NumericsConfig) -> float:
        return cfg.cutoff(self.weights.n_max, self.sigma)


def fock_density(n: int, y):
    """|<y|n>|^2 = e^{-y^2} H_n(y)^2 / (2^n n! sqrt(pi))."""
    val = hermite_table(n, y)[n] ** 2
    return val if val.ndim else float(val)


def _mixture(weights: np.ndarray, y: np.ndarray) -> np.ndarray:
    psi = hermite_table(len(weights) - 1, y)
    return np.tensordot(weights, psi * psi, axes=1)


def damped_density(lam: float, y, cfg: NumericsConfig | None = None):
    """Outcome density of the damped, dephased coherent state (no detector noise)."""
    cfg = cfg or NumericsConfig()
    pw = poisson_weights(lam, cfg.tail_tol)
    val = _mixture(pw.weights, np.asarray(y, dtype=float))
    return val if val.ndim else float(val)


@lru_cache(maxsize=64)
def _hermgauss(n: int):
    return hermgauss(n)


def smeared_density(sd: SignalDensity, y, cfg: NumericsConfig | None = None):
    """p(y|r): the Poisson-Fock mixture convolved with K_sigma.

    Each Fock term is convolved exactly: after completing the square the
    integrand is a degree-2n polynomial against a Gaussian weight, so
    Gauss-Hermite with n_max + 2 nodes integrates it exactly. All summands
    are non-negative, so there is no cancellation.
    """
    y = np.asarray(y, dtype=float)
    if sd.sigma == 0.0:
        val = _mixture(sd.weights.weights, y)
        return val if val.ndim else float(val)

    n_max = sd.weights.n_max
    s2 = 1.0 + sd.sigma**2
    s = math.sqrt(s2)
    nodes, gh_weights = _hermgauss(n_max + 2)
    x = y[None, ...] / s2 - (sd.sigma / s) * nodes.reshape((-1,) + (1,) * y.ndim)
    h = hermite_table(n_max, x, gaussian=False)
    inner = np.tensordot(sd.weights.weights, h * h, axes=1)
    val = np.exp(-y * y / s2) / (_SQRT_PI * s) * np.tensordot(gh_weights, inner, axes=1)
    return val if val.ndim else float(val)


@lru_cache(maxsize=8)
def _legendre_rule(order: int):
    return leggauss(order)


def adaptive_gauss_legendre(f, a: float, b: float, tol: float, max_panels: int = 10**6,
                            order: int = _GL_ORDER) -> float:
    """Integrate a vectorized ``f`` over [a, b] by panel bisection.

    A panel is accepted when its one-panel and two-half-panel Gauss-Legendre
    estimates agree to within its width-proportional share of ``tol``.
    All active panels of a level are evaluated in one call to ``f``.
    """
    if b == a:
        return 0.0
    if b < a:
        return -adaptive_gauss_legendre(f, b, a, tol, max_panels, order)
    t, w = _legendre_rule(order)
    total_width = b - a
    n0 = max(1, int(math.ceil(total_width)))
    edges = np.linspace(a, b, n0 + 1)
    lo, hi = edges[:-1], edges[1:]
    accepted = []
    n_panels = n0
    while lo.size:
        mid = 0.5 * (lo + hi)
        starts = np.concatenate([lo, lo, mid])
        ends = np.concatenate([hi, mid, hi])
        half = 0.5 * (ends - starts)
        pts = (starts + ends)[:, None] * 0.5 + half[:, None] * t[None, :]
        vals = f(pts.ravel()).reshape(pts.shape) @ w * half
        k = lo.size
        whole, left, right = vals[:k], vals[k:2 * k], vals[2 * k:]
        fine = left + right
        ok = np.abs(whole - fine) <= tol * (hi - lo) / total_width
        accepted.extend(fine[ok].tolist())
        lo, hi, mid = lo[~ok], hi[~ok], mid[~ok]
        if lo.size:
            n_panels += lo.size
            if n_panels > max_panels:
                raise QuadratureError(
                    f"adaptive quadrature on [{a}, {b}] exceeded {max_panels} panels")
            lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
    return math.fsum(accepted)


def interval_probability(sd: SignalDensity, a: float, b: float,
                         cfg: NumericsConfig | None = None) -> float:
    """Probability that the outcome lands in [a, b], integrated to cfg.quad_tol.

    The real line is cut at +-y_max. Symmetric intervals are folded onto
    [0, b] using the evenness of the density.
    """
    cfg = cfg or NumericsConfig()
    if a > b:
        raise ValueError(f"need a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0
    y_max = sd.y_max(cfg)
    a, b = max(a, -y_max), min(b, y_max)
    if a >= b:
        return 0.0

    def f(y):
        return smeared_density(sd, y, cfg)

    if a == -b:
        val = 2.0 * adaptive_gauss_legendre(f, 0.0, b, 0.5 * cfg.quad_tol, cfg.max_panels)
    else:
        val = adaptive_gauss_legendre(f, a, b, cfg.quad_tol, cfg.max_panels)
    return min(max(val, 0.0), 1.0)
