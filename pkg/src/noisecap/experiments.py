"""Capacity-versus-noise sweeps and the search for the best added noise."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .capacity import channel_capacity
from .channel import ChannelParams, transition_matrix
from .errors import NumericsError
from .quadist import NumericsConfig

FIG1_R = 5.0
FIG1_TAU = 0.5
FIG1_THETAS = (3.6, 3.8, 4.0, 4.2)
FIG1_SIGMA_MAX = 3.0
FIG1_SIGMA_STEPS = 61

SIGMA_XTOL = 1e-4


def sigma_grid(lo: float, hi: float, steps: int) -> tuple[float, ...]:
    """``steps`` equally spaced noise widths from lo to hi inclusive."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if steps == 1:
        return (float(lo),)
    return tuple(float(s) for s in np.linspace(lo, hi, steps))


@dataclass(frozen=True)
class SweepSpec:
    base: ChannelParams
    sigma_grid: tuple[float, ...]
    theta_list: tuple[float, ...]
    cfg: NumericsConfig = field(default_factory=NumericsConfig)

    def __post_init__(self):
        object.__setattr__(self, "sigma_grid", tuple(float(s) for s in self.sigma_grid))
        object.__setattr__(self, "theta_list", tuple(float(t) for t in self.theta_list))
        if not self.sigma_grid or not self.theta_list:
            raise ValueError("sigma_grid and theta_list must be non-empty")
        if any(b <= a for a, b in zip(self.sigma_grid, self.sigma_grid[1:])):
            raise ValueError("sigma_grid must be strictly increasing")
        if self.sigma_grid[0] < 0 or min(self.theta_list) < 0:
            raise ValueError("sigma and theta values must be non-negative")


@dataclass(frozen=True)
class SweepRow:
    theta: float
    sigma: float
    p00: float
    p01: float
    p1_star: float
    capacity_bits: float


def evaluate_point(base: ChannelParams, theta: float, sigma: float,
                   cfg: NumericsConfig | None = None) -> SweepRow:
    p = replace(base, theta=theta, sigma=sigma)
    try:
        tm = transition_matrix(p, cfg)
    except NumericsError as exc:
        raise type(exc)(f"theta={theta!r}, sigma={sigma!r}: {exc}") from exc
    res = channel_capacity(tm)
    return SweepRow(theta, sigma, tm.p00, tm.p01, res.p1_star, res.capacity_bits)


def sweep(spec: SweepSpec, threads: int = 1) -> list[SweepRow]:
    """One row per (theta, sigma), theta outer, sigma inner."""
    points = [(t, s) for t in spec.theta_list for s in spec.sigma_grid]

    def run(ts):
        return evaluate_point(spec.base, ts[0], ts[1], spec.cfg)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(run, points))
    return [run(ts) for ts in points]


def fig1_spec(cfg: NumericsConfig | None = None) -> SweepSpec:
    return SweepSpec(
        base=ChannelParams(r=FIG1_R, tau=FIG1_TAU, theta=FIG1_THETAS[0], sigma=0.0),
        sigma_grid=sigma_grid(0.0, FIG1_SIGMA_MAX, FIG1_SIGMA_STEPS),
        theta_list=FIG1_THETAS,
        cfg=cfg or NumericsConfig(),
    )


def fig1_dataset(cfg: NumericsConfig | None = None, threads: int = 1) -> list[SweepRow]:
    """Capacity against sigma in [0, 3] (step 0.05) for the four reference thresholds."""
    return sweep(fig1_spec(cfg), threads)


class SigmaOptimum(NamedTuple):
    sigma_star: float
    capacity_at_star: float
    at_boundary: bool


def optimal_sigma(base: ChannelParams, sigma_lo: float, sigma_hi: float,
                  cfg: NumericsConfig | None = None, n_grid: int = 61) -> SigmaOptimum:
    """Noise width maximizing capacity on [sigma_lo, sigma_hi].

    A coarse grid picks the best bracket, which is then refined with a
    bounded scalar search to SIGMA_XTOL. ``at_boundary`` is set when the
    optimum sits at either end of the interval, or beats the better end by
    no more than the quadrature resolution (then that end is returned).
    """
    if not 0.0 <= sigma_lo < sigma_hi:
        raise ValueError(f"need 0 <= sigma_lo < sigma_hi, got [{sigma_lo}, {sigma_hi}]")
    if n_grid < 50:
        raise ValueError("coarse grid needs at least 50 points")
    cfg = cfg or NumericsConfig()

    def cap(s):
        return channel_capacity(transition_matrix(replace(base, sigma=float(s)), cfg)).capacity_bits

    grid = np.linspace(sigma_lo, sigma_hi, n_grid)
    caps = [cap(s) for s in grid]
    i = int(np.argmax(caps))
    best_s, best_c = float(grid[i]), caps[i]

    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, n_grid - 1)]
    res = minimize_scalar(lambda s: -cap(s), bounds=(lo, hi), method="bounded",
                          options={"xatol": SIGMA_XTOL})
    if -res.fun > best_c:
        best_s, best_c = float(res.x), float(-res.fun)

    # a gain over the better endpoint below the quadrature resolution is not
    # an interior optimum
    edge_s, edge_c = (sigma_lo, caps[0]) if caps[0] >= caps[-1] else (sigma_hi, caps[-1])
    if best_c - edge_c <= 10.0 * cfg.quad_tol:
        best_s, best_c = float(edge_s), edge_c

    at_boundary = (best_s - sigma_lo <= SIGMA_XTOL) or (sigma_hi - best_s <= SIGMA_XTOL)
    return SigmaOptimum(best_s, best_c, at_boundary)


def noise_benefit(rows: Sequence[SweepRow], theta: float) -> float:
    """max_sigma C - C(smallest sigma) along one theta curve of a sweep."""
    curve = [row for row in rows if math.isclose(row.theta, theta)]
    if not curve:
        raise ValueError(f"no rows for theta={theta}")
    return max(r.capacity_bits for r in curve) - curve[0].capacity_bits
