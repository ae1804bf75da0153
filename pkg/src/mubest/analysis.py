"""Numerical verification helpers: closed forms, rate fits, run statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

_Z95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class RateFit:
    """Least-squares power-law fit of regret against budget, in log space."""

    slope: float
    intercept: float
    residual: float  # RMS of log-regret residuals
    n_points: int


def expected_min_sphere(lam: int, d: int) -> float:
    """Expected minimum squared norm among lam uniform points in the unit ball.

    Equals Gamma((d+2)/d) * Gamma(lam+1) / Gamma(lam+1+2/d), evaluated with
    log-gamma so large budgets cannot overflow. Multiply by r^2 for a ball
    of radius r; the optimum is assumed at the center.
    """
    if lam < 1:
        raise ValueError("budget must be >= 1")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return math.exp(
        math.lgamma((d + 2.0) / d) + math.lgamma(lam + 1.0) - math.lgamma(lam + 1.0 + 2.0 / d)
    )


def fit_rate(budgets, regrets) -> RateFit:
    """Ordinary least squares of ln(regret) on ln(budget)."""
    lam = np.asarray(budgets, dtype=float)
    reg = np.asarray(regrets, dtype=float)
    if lam.shape != reg.shape or lam.ndim != 1:
        raise ValueError("budgets and regrets must be 1-d arrays of equal length")
    if lam.size < 3:
        raise ValueError("need at least 3 points for a rate fit")
    if np.any(lam <= 0):
        raise ValueError("budgets must be positive")
    if np.any(reg <= 0):
        raise ValueError("regrets must be positive to fit in log space")
    x = np.log(lam)
    y = np.log(reg)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return RateFit(
        slope=float(slope),
        intercept=float(intercept),
        residual=float(np.sqrt(np.mean(resid**2))),
        n_points=int(lam.size),
    )


def _check_phi_args(h: float, bound: float, alpha: float) -> None:
    if h < 0:
        raise ValueError("level h must be >= 0")
    if bound < 0:
        raise ValueError("perturbation bound must be >= 0")
    if alpha <= 2:
        raise ValueError("alpha must exceed 2")


def sublevel_radius_inner(h: float, bound: float, alpha: float) -> float:
    """Radius of the inscribed sublevel ellipsoid at level h.

    The unique nonnegative root u of u^2 + bound * u^alpha = h. The root is
    bracketed by [0, sqrt(h)] because the perturbation term is nonnegative.
    For small h it behaves like sqrt(h) - (bound/2) * h^((alpha-1)/2).
    """
    _check_phi_args(h, bound, alpha)
    if h == 0.0:
        return 0.0
    if bound == 0.0:
        return math.sqrt(h)
    hi = math.sqrt(h)
    return float(brentq(lambda u: u * u + bound * u**alpha - h, 0.0, hi,
                        xtol=1e-300, rtol=8.9e-16))


def sublevel_radius_outer(h: float, bound: float, alpha: float) -> float:
    """Radius of the circumscribed sublevel ellipsoid at level h.

    The root of u^2 - bound * u^alpha = h on the increasing branch
    [0, r0] with r0 = (2 / (alpha * bound))^(1/(alpha-2)); levels at or
    above the branch maximum are out of domain. For small h it behaves
    like sqrt(h) + (bound/2) * h^((alpha-1)/2).
    """
    _check_phi_args(h, bound, alpha)
    if bound == 0.0:
        raise ValueError("perturbation bound must be positive for the outer radius")
    r0 = (2.0 / (alpha * bound)) ** (1.0 / (alpha - 2.0))
    peak = r0 * r0 - bound * r0**alpha
    if h >= peak:
        raise ValueError(f"level h={h} at or above the invertible-branch maximum {peak}")
    if h == 0.0:
        return 0.0
    lo = math.sqrt(h)
    return float(brentq(lambda u: u * u - bound * u**alpha - h, lo, r0,
                        xtol=1e-300, rtol=8.9e-16))


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std_error: float
    ci_low: float
    ci_high: float


def summarize(values) -> SummaryStats:
    """Sample mean, standard error and normal-approximation 95% interval."""
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("need at least 2 values to summarize")
    mean = float(x.mean())
    se = float(x.std(ddof=1) / math.sqrt(x.size))
    return SummaryStats(mean=mean, std_error=se, ci_low=mean - _Z95 * se, ci_high=mean + _Z95 * se)
