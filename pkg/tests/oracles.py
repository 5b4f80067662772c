"""Independent brute-force oracles used to validate the closed-form policy.

The surplus maximization is re-solved by exhaustive search over a fixed
energy grid: a max-plus convolution builds the best aggregate utility
achievable at every total-consumption level, then the billed objective
is maximized over those levels.  No thresholds, no shadow prices --
nothing shared with the implementation under test.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


def _maxplus(g: np.ndarray, u: np.ndarray) -> np.ndarray:
    """(max, +) convolution: out[E] = max_j g[E - j] + u[j]."""
    m = len(g) + len(u) - 1
    energies = np.arange(m)[:, None]
    j = np.arange(len(u))[None, :]
    idx = energies - j
    valid = (idx >= 0) & (idx < len(g))
    vals = np.where(valid, g[np.clip(idx, 0, len(g) - 1)] + u, -np.inf)
    return vals.max(axis=1)


def best_utility_by_total(
    alphas: Sequence[float],
    betas: Sequence[float],
    caps: Sequence[float],
    step: float,
) -> np.ndarray:
    """Max aggregate quadratic utility for each total consumption level.

    Entry D of the result is the best utility over per-device grid
    allocations summing to exactly ``D * step``.
    """
    g = np.zeros(1)
    for alpha, beta, cap in zip(alphas, betas, caps):
        k = int(round(cap / step))
        levels = np.arange(k + 1) * step
        u = alpha * levels - 0.5 * beta * levels**2
        g = _maxplus(g, u)
    return g


def grid_surplus(
    alphas: Sequence[float],
    betas: Sequence[float],
    caps: Sequence[float],
    pi_plus: float,
    pi_minus: float,
    r: float,
    step: float = 0.01,
    fixed_charge: float = 0.0,
) -> float:
    """Brute-force maximum of utility minus the net-metered bill."""
    g = best_utility_by_total(alphas, betas, caps, step)
    totals = np.arange(len(g)) * step
    z = totals - r
    pay = np.where(z >= 0, pi_plus * z, pi_minus * z) + fixed_charge
    return float(np.max(g - pay))


def grid_total_consumption(
    alphas, betas, caps, pi_plus, pi_minus, r, step: float = 0.01
) -> float:
    """Argmax total consumption of the brute-force search (grid resolution)."""
    g = best_utility_by_total(alphas, betas, caps, step)
    totals = np.arange(len(g)) * step
    z = totals - r
    pay = np.where(z >= 0, pi_plus * z, pi_minus * z)
    return float(totals[np.argmax(g - pay)])
