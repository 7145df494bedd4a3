"""Event-by-event Monte Carlo of the channel, used to check the quadrature path.

Nothing here touches the density or channel code: the Fock quadrature
density is evaluated with numpy's Hermite series in log space, and samples
are drawn photon number -> quadrature -> detector noise -> threshold.

Samples are generated in fixed-size blocks, block ``b`` drawing from a
Philox stream keyed by ``(seed, b)``. Results therefore do not depend on
how blocks are spread over threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import hermite as npherm

from .errors import RejectionBudgetError

BLOCK_SIZE = 1 << 16
MIN_SAMPLES = 1000
_BATCH = 4096


@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    std_err: float
    n_samples: int
    seed: int

    @classmethod
    def from_counts(cls, hits: int, n_samples: int, seed: int) -> McEstimate:
        p = hits / n_samples
        return cls(p, math.sqrt(p * (1.0 - p) / n_samples), n_samples, seed)


def fock_pdf(n: int, y) -> np.ndarray:
    """exp(-y^2) H_n(y)^2 / (2^n n! sqrt(pi)), evaluated via log|H_n|."""
    y = np.asarray(y, dtype=float)
    coef = np.zeros(n + 1)
    coef[n] = 1.0
    h = np.abs(npherm.hermval(y, coef))
    with np.errstate(divide="ignore"):
        log_pdf = 2.0 * np.log(h) - y * y - n * math.log(2.0) - math.lgamma(n + 1) \
            - 0.5 * math.log(math.pi)
    return np.exp(log_pdf)


@lru_cache(maxsize=256)
def _envelope(n: int) -> tuple[float, float]:
    half_width = math.sqrt(2 * n + 1) + 4.0
    grid = np.linspace(0.0, half_width, 20001)
    return half_width, 1.1 * float(fock_pdf(n, grid).max())


def sample_fock_quadratures(n: int, size: int, rng: np.random.Generator,
                            max_trials: int | None = None) -> np.ndarray:
    """Rejection-sample ``size`` quadrature outcomes of the n-photon state.

    Uniform envelope on [-L, L], L = sqrt(2n + 1) + 4, with height 1.1 times
    the density maximum found on a grid.
    """
    if n < 0:
        raise ValueError(f"photon number must be non-negative, got {n}")
    half_width, height = _envelope(n)
    if max_trials is None:
        max_trials = 200 * size + 100_000
    out = np.empty(size)
    filled = 0
    trials = 0
    while filled < size:
        batch = max(_BATCH, 2 * (size - filled))
        y = rng.uniform(-half_width, half_width, batch)
        u = rng.uniform(0.0, height, batch)
        acc = y[u < fock_pdf(n, y)]
        take = min(acc.size, size - filled)
        out[filled:filled + take] = acc[:take]
        filled += take
        trials += batch
        if trials > max_trials and filled < size:
            raise RejectionBudgetError(f"n={n}: {filled}/{size} accepted in {trials} trials")
    return out


def sample_fock_quadrature(n: int, rng: np.random.Generator) -> float:
    return float(sample_fock_quadratures(n, 1, rng)[0])


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _block_hits(lam: float, theta: float, sigma: float, size: int, seed: int,
                block: int) -> int:
    rng = _block_rng(seed, block)
    photons = rng.poisson(lam, size) if lam > 0 else np.zeros(size, dtype=np.int64)
    y = np.empty(size)
    for n in np.unique(photons):
        idx = np.flatnonzero(photons == n)
        y[idx] = sample_fock_quadratures(int(n), idx.size, rng)
    if sigma > 0:
        y += rng.normal(0.0, sigma / math.sqrt(2.0), size)
    return int(np.count_nonzero(np.abs(y) < theta))


def estimate_inside(lam: float, theta: float, sigma: float, n_samples: int, seed: int,
                    threads: int = 1) -> McEstimate:
    """MC estimate of Pr(|y| < theta) for a Poisson(lam) Fock mixture plus noise."""
    if n_samples < MIN_SAMPLES:
        raise ValueError(f"n_samples must be at least {MIN_SAMPLES}, got {n_samples}")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    sizes = [BLOCK_SIZE] * (n_samples // BLOCK_SIZE)
    if n_samples % BLOCK_SIZE:
        sizes.append(n_samples % BLOCK_SIZE)
    args = [(lam, theta, sigma, m, seed, b) for b, m in enumerate(sizes)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            hits = list(pool.map(lambda a: _block_hits(*a), args))
    else:
        hits = [_block_hits(*a) for a in args]
    return McEstimate.from_counts(sum(hits), n_samples, seed)


def estimate_transition(p, n_samples: int, seed: int, threads: int = 1
                        ) -> tuple[McEstimate, McEstimate]:
    """MC estimates of (p00, p01) for channel parameters ``p``.

    Symbol 0 is the vacuum; symbol 1 is a Poisson mixture with mean
    r^2 e^{-2 tau}. Detector noise is Gaussian with variance sigma^2 / 2.
    The two symbols use disjoint seeds derived from ``seed``.
    """
    lam = p.r * p.r * math.exp(-2.0 * p.tau)
    e0 = estimate_inside(0.0, p.theta, p.sigma, n_samples, 2 * seed, threads)
    e1 = estimate_inside(lam, p.theta, p.sigma, n_samples, 2 * seed + 1, threads)
    return (McEstimate(e0.p_hat, e0.std_err, n_samples, seed),
            McEstimate(e1.p_hat, e1.std_err, n_samples, seed))


def z_score(est: McEstimate, p_ref: float) -> float:
    """(p_hat - p_ref) / se, with se floored at the binomial error of p_ref.

    The floor matters when p_hat is exactly 0 or 1 and its own standard error
    vanishes; half an event (0.5 / N) bounds it from below so z stays finite.
    """
    n = est.n_samples
    se = max(est.std_err, math.sqrt(p_ref * (1.0 - p_ref) / n), 0.5 / n)
    return (est.p_hat - p_ref) / se
