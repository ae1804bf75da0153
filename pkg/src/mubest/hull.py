"""Convex-hull interior membership via a small dense linear program.

A point of conv(S) lies in the relative interior exactly when it admits a
barycentric representation with all weights strictly positive; combined with
a full affine-rank screen this characterizes the topological interior. The
feasibility engine is a dense two-phase simplex with Bland's rule, which is
exact near vertices and cheap at the tiny sizes used by the hull filter
(tens of generators, d small).
"""
from __future__ import annotations

import numpy as np


class SimplexIterationError(RuntimeError):
    """The simplex solver exceeded its iteration cap (numerical failure)."""


INFEASIBLE = float("-inf")

_COST_TOL = 1e-11
_PIVOT_TOL = 1e-11
_FEAS_TOL = 1e-10


def affine_rank(points, tol: float = 1e-9) -> int:
    """Affine rank of a point set.

    Singular values of the difference matrix (points[k] - points[0]) below
    ``tol`` times the largest singular value count as zero.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("points must be a non-empty (k, d) array")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if pts.shape[0] == 1:
        return 0
    sv = np.linalg.svd(pts[1:] - pts[0], compute_uv=False)
    if sv.size == 0 or sv[0] <= 0.0:
        return 0
    return int(np.count_nonzero(sv > tol * sv[0]))


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])


def _run_simplex(T: np.ndarray, basis: list[int], allowed: np.ndarray, max_iter: int) -> None:
    """Minimize the cost row of tableau T in place (Bland's rule)."""
    m = T.shape[0] - 1
    for _ in range(max_iter):
        eligible = np.flatnonzero(allowed & (T[-1, :-1] < -_COST_TOL))
        if eligible.size == 0:
            return
        enter = int(eligible[0])  # Bland: smallest eligible index
        col = T[:m, enter]
        positive = col > _PIVOT_TOL
        if not positive.any():
            raise SimplexIterationError("LP unbounded; the weight program should never be")
        ratios = np.full(m, np.inf)
        ratios[positive] = T[:m, -1][positive] / col[positive]
        ties = np.flatnonzero(ratios <= ratios.min() + 1e-12)
        leave = int(min(ties, key=lambda i: basis[i]))  # Bland tie-break on the basic variable
        _pivot(T, leave, enter)
        basis[leave] = enter
    raise SimplexIterationError(f"simplex iteration cap reached ({max_iter})")


def lp_max_min_weight(generators, p, max_iter: int | None = None) -> tuple[float, np.ndarray]:
    """Maximize the minimum barycentric weight representing ``p``.

    Solves max t subject to sum_j w_j * generators[j] = p, sum_j w_j = 1 and
    w_j >= t >= 0 for all j. Returns the optimal (t, w); when p has no convex
    representation the sentinel (-inf, empty array) is returned.

    The substitution v_j = w_j - t turns this into a standard-form LP with
    k + 1 nonnegative variables and d + 1 equality constraints.
    """
    gens = np.asarray(generators, dtype=float)
    query = np.asarray(p, dtype=float)
    if gens.ndim != 2 or gens.shape[0] == 0:
        raise ValueError("generators must be a non-empty (k, d) array")
    if query.shape != (gens.shape[1],):
        raise ValueError("query point dimension does not match the generators")
    k, d = gens.shape
    if max_iter is None:
        max_iter = 10 * (k + d) ** 2

    n_real = k + 1  # v_1..v_k and t
    m = d + 1
    a_eq = np.empty((m, n_real))
    a_eq[:d, :k] = gens.T
    a_eq[:d, k] = gens.sum(axis=0)
    a_eq[d, :k] = 1.0
    a_eq[d, k] = float(k)
    b = np.concatenate([query, [1.0]])

    neg = b < 0
    a_eq[neg] *= -1.0
    b = np.where(neg, -b, b)

    # Phase 1: minimize the sum of one artificial variable per constraint.
    T = np.zeros((m + 1, n_real + m + 1))
    T[:m, :n_real] = a_eq
    T[:m, n_real:n_real + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n_real] = -a_eq.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = [n_real + i for i in range(m)]
    allowed = np.ones(n_real + m, dtype=bool)
    allowed[n_real:] = False  # artificials never re-enter
    _run_simplex(T, basis, allowed, max_iter)
    if -T[-1, -1] > _FEAS_TOL:
        return INFEASIBLE, np.empty(0)

    # Drive leftover artificials out of the basis; drop redundant rows.
    keep = []
    for i in range(m):
        if basis[i] < n_real:
            keep.append(i)
            continue
        col = -1
        for j in range(n_real):
            if j not in basis and abs(T[i, j]) > _PIVOT_TOL:
                col = j
                break
        if col >= 0:
            _pivot(T, i, col)
            basis[i] = col
            keep.append(i)
    rows = keep
    basis = [basis[i] for i in rows]

    # Phase 2: minimize -t over the surviving rows and real columns.
    T2 = np.zeros((len(rows) + 1, n_real + 1))
    T2[:-1, :n_real] = T[rows][:, :n_real]
    T2[:-1, -1] = T[rows][:, -1]
    T2[-1, k] = -1.0
    for i, bi in enumerate(basis):
        c = -1.0 if bi == k else 0.0
        if c != 0.0:
            T2[-1] -= c * T2[i]
    _run_simplex(T2, basis, np.ones(n_real, dtype=bool), max_iter)

    x = np.zeros(n_real)
    for i, bi in enumerate(basis):
        x[bi] = T2[i, -1]
    t = float(x[k])
    return t, x[:k] + t


def in_hull_interior(p, generators, tol: float | None = None, on_failure: str = "raise") -> bool:
    """True when ``p`` lies in the open interior of conv(generators).

    Requires (a) the generators to have full affine rank d (otherwise the
    interior is empty) and (b) the max-min barycentric weight of p to exceed
    the tolerance. The default tolerance is 1e-9 times the generator
    bounding-box diameter; internally everything is normalized to unit
    diameter so the verdict is invariant under global translation/scaling.

    ``on_failure="outside"`` converts a solver failure into False instead of
    propagating SimplexIterationError.
    """
    gens = np.asarray(generators, dtype=float)
    query = np.asarray(p, dtype=float)
    if gens.ndim != 2 or gens.shape[0] == 0:
        raise ValueError("generators must be a non-empty (k, d) array")
    d = gens.shape[1]
    if query.shape != (d,):
        raise ValueError("query point dimension does not match the generators")
    if on_failure not in ("raise", "outside"):
        raise ValueError("on_failure must be 'raise' or 'outside'")

    span = gens.max(axis=0) - gens.min(axis=0)
    diam = float(np.linalg.norm(span))
    if diam == 0.0:
        return False  # all generators coincide; no interior in d >= 1
    rel_tol = (tol / diam) if tol is not None else 1e-9
    if rel_tol <= 0:
        raise ValueError("tol must be positive")

    if affine_rank(gens, rel_tol) < d:
        return False

    center = 0.5 * (gens.max(axis=0) + gens.min(axis=0))
    try:
        t, _ = lp_max_min_weight((gens - center) / diam, (query - center) / diam)
    except SimplexIterationError:
        if on_failure == "outside":
            return False
        raise
    return t > rel_tol
