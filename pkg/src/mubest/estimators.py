"""Turn an evaluated batch into a recommended point.

Recommendation strategies: return the best sample, average the mu best, or
average a prefix trimmed by the convex-hull filter, with mu chosen by a
fixed value, the asymptotic power-law rule, or the dimension-decay ratio
rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hull import in_hull_interior

ESTIMATOR_KINDS = ("best", "zero", "mu_average", "hull_filtered_average")
MU_RULES = ("fixed", "power_law", "ratio_pow")


@dataclass(frozen=True)
class RankedBatch:
    """Samples sorted ascending by objective value.

    Ties are broken by the original sampling index (lower index first), so
    the ranking is a deterministic function of the batch.
    """

    points: np.ndarray  # (lam, d), sorted
    values: np.ndarray  # (lam,), non-decreasing
    order: np.ndarray   # (lam,) original indices

    def __len__(self) -> int:
        return self.points.shape[0]


def rank(points, values) -> RankedBatch:
    """Sort a batch by objective value with index tie-breaking."""
    pts = np.asarray(points, dtype=float)
    vals = np.asarray(values, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("points must be a non-empty (n, d) array")
    if vals.shape != (pts.shape[0],):
        raise ValueError("values must be one per point")
    nan = np.isnan(vals)
    if nan.any():
        raise ValueError(f"NaN objective value at sample index {int(np.flatnonzero(nan)[0])}")
    order = np.argsort(vals, kind="stable")
    return RankedBatch(points=pts[order], values=vals[order], order=order)


def best_of(ranked: RankedBatch) -> np.ndarray:
    """The sample with the lowest objective value (pure random search)."""
    return ranked.points[0]


def mu_best_average(ranked: RankedBatch, mu: int) -> np.ndarray:
    """Equal-weight mean of the mu best points."""
    if not 1 <= mu <= len(ranked):
        raise ValueError(f"mu={mu} outside [1, {len(ranked)}]")
    return ranked.points[:mu].mean(axis=0)


def _round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5))  # x >= 0 in all mu rules


def _clamp_mu(mu: int, lam: int) -> int:
    return max(1, min(mu, lam - 1))


def select_mu_power_law(lam: int, d: int, alpha: float, coeff: float = 1.0) -> int:
    """mu = round(coeff * lam^(2(alpha-2)/(d+2(alpha-2)))), clamped to [1, lam-1].

    The exponent is strictly inside (0, 1) for every d >= 1 and alpha > 2,
    so the selection ratio mu/lam vanishes as the budget grows.
    """
    if lam < 2:
        raise ValueError("budget must be >= 2")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if alpha <= 2:
        raise ValueError("alpha must exceed 2")
    if coeff <= 0:
        raise ValueError("coefficient must be positive")
    exponent = 2.0 * (alpha - 2.0) / (d + 2.0 * (alpha - 2.0))
    return _clamp_mu(_round_half_away(coeff * lam**exponent), lam)


def select_mu_ratio_pow(lam: int, d: int, base: float = 1.1) -> int:
    """mu = round(lam / base^d), clamped to [1, lam-1]."""
    if lam < 2:
        raise ValueError("budget must be >= 2")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if base <= 1:
        raise ValueError("base must exceed 1")
    # log space: base**d overflows Python floats already at moderate d
    return _clamp_mu(_round_half_away(math.exp(math.log(lam) - d * math.log(base))), lam)


def hull_filtered_mu(ranked: RankedBatch, mu_max: int, tol: float = 1e-9) -> int:
    """Largest mu such that no kept point hides a worse point in its hull.

    Returns the largest mu <= mu_max such that for every i < mu and every j
    with i < j <= mu_max, the j-th best point is not in the open interior of
    the convex hull of the i best points. A violation at prefix size i is
    evidence against quasi-convexity, so the average is restricted to the
    first i points. Always returns at least 1.

    Prefix-hull interiors are nested, so for each candidate point the
    smallest violated prefix is found by binary search: one membership test
    per candidate plus a logarithmic number on violations.
    """
    lam = len(ranked)
    if not 2 <= mu_max <= lam:
        raise ValueError(f"mu_max={mu_max} outside [2, {lam}]")
    pts = ranked.points[:mu_max]
    d = pts.shape[1]
    if mu_max <= d + 1:
        return mu_max  # prefixes of d or fewer points have empty interior in R^d

    def member(j: int, i: int) -> bool:  # is the j-th best interior to the i-point prefix hull?
        return in_hull_interior(pts[j - 1], pts[:i], tol=tol, on_failure="outside")

    best = mu_max
    for j in range(d + 2, mu_max + 1):
        if best == d + 1:
            break  # no smaller violation is possible
        hi = min(j - 1, best - 1)
        if not member(j, hi):
            continue
        lo = d + 1
        while lo < hi:
            mid = (lo + hi) // 2
            if member(j, mid):
                hi = mid
            else:
                lo = mid + 1
        best = lo
    return best


def hull_filtered_mu_self(ranked: RankedBatch, mu_max: int, tol: float = 1e-9) -> int:
    """Weaker filter: only each kept point is tested against its own prefix hull.

    Returns the largest mu <= mu_max such that for every i <= mu, the i-th
    best point is not interior to the hull of the i best points. Kept for
    comparison with the stricter pairwise filter, which detects strictly
    more non-quasiconvex configurations.
    """
    lam = len(ranked)
    if not 2 <= mu_max <= lam:
        raise ValueError(f"mu_max={mu_max} outside [2, {lam}]")
    pts = ranked.points[:mu_max]
    d = pts.shape[1]
    for i in range(d + 1, mu_max + 1):
        if in_hull_interior(pts[i - 1], pts[:i], tol=tol, on_failure="outside"):
            return i - 1
    return mu_max


@dataclass(frozen=True)
class EstimatorSpec:
    """Declarative recommendation strategy.

    ``kind`` picks the estimator; ``mu_rule`` how mu (or mu_max for the
    hull-filtered kind) is resolved from the budget and dimension.
    """

    kind: str = "best"
    mu_rule: str = "fixed"
    mu: int = 1
    coeff: float = 1.0
    alpha: float = 3.0
    base: float = 1.1
    tol: float = 1e-9
    label: str = "best"

    def __post_init__(self):
        if self.kind not in ESTIMATOR_KINDS:
            raise ValueError(f"unknown estimator kind {self.kind!r}")
        if self.mu_rule not in MU_RULES:
            raise ValueError(f"unknown mu rule {self.mu_rule!r}")

    def resolve_mu(self, lam: int, d: int) -> int:
        if self.kind in ("best", "zero"):
            return 1
        if self.mu_rule == "fixed":
            return _clamp_mu(self.mu, lam) if lam > 1 else 1
        if self.mu_rule == "power_law":
            return select_mu_power_law(lam, d, self.alpha, self.coeff)
        return select_mu_ratio_pow(lam, d, self.base)

    def recommend(self, ranked: RankedBatch) -> tuple[np.ndarray, int]:
        """Recommendation point and the mu actually used (0 for zero)."""
        d = ranked.points.shape[1]
        if self.kind == "zero":
            return np.zeros(d), 0
        if self.kind == "best":
            return best_of(ranked), 1
        mu = self.resolve_mu(len(ranked), d)
        if self.kind == "hull_filtered_average" and mu >= 2:
            mu = hull_filtered_mu(ranked, mu, tol=self.tol)
        return mu_best_average(ranked, mu), mu


def parse_estimator(text: str) -> EstimatorSpec:
    """Parse an estimator string.

    Grammar: ``best``, ``zero``, ``avg:fixed:<mu>``, ``avg:power:<C>:<alpha>``,
    ``avg:ratio:<base>``, and ``havg:<rule...>[:<tol>]`` for the
    hull-filtered variants (tol defaults to 1e-9).
    """
    label = text.strip()
    parts = label.split(":")
    head = parts[0].lower()
    if head == "best":
        if len(parts) > 1:
            raise ValueError(f"'best' takes no parameters: {text!r}")
        return EstimatorSpec(kind="best", label=label)
    if head == "zero":
        if len(parts) > 1:
            raise ValueError(f"'zero' takes no parameters: {text!r}")
        return EstimatorSpec(kind="zero", label=label)
    if head not in ("avg", "havg"):
        raise ValueError(f"unknown estimator {text!r}")
    kind = "mu_average" if head == "avg" else "hull_filtered_average"
    if len(parts) < 2:
        raise ValueError(f"estimator {text!r} needs a mu rule")
    rule = parts[1].lower()
    args = parts[2:]
    tol = 1e-9
    if rule == "fixed":
        want = 1
    elif rule == "power":
        want = 2
    elif rule == "ratio":
        want = 1
    else:
        raise ValueError(f"unknown mu rule {rule!r} in {text!r}")
    if head == "havg" and len(args) == want + 1:
        tol = float(args[-1])
        args = args[:-1]
    if len(args) != want:
        raise ValueError(f"wrong number of parameters in {text!r}")
    if rule == "fixed":
        return EstimatorSpec(kind=kind, mu_rule="fixed", mu=int(args[0]), tol=tol, label=label)
    if rule == "power":
        return EstimatorSpec(kind=kind, mu_rule="power_law", coeff=float(args[0]),
                             alpha=float(args[1]), tol=tol, label=label)
    return EstimatorSpec(kind=kind, mu_rule="ratio_pow", base=float(args[0]), tol=tol, label=label)
