"""Benchmark objectives with known optima.

Every objective evaluates single points of shape ``(d,)`` or batches of
shape ``(n, d)`` and attains its minimum value at a known location, so the
exact simple regret of any recommendation is available.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .sampling import RngStream, sample_uniform_ball


@dataclass(frozen=True)
class ObjectiveSpec:
    """An evaluatable objective with known optimum."""

    name: str
    dimension: int
    x_star: np.ndarray
    f_star: float
    evaluate: Callable[[np.ndarray], np.ndarray]


def _displacement(x, x_star) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    xs = np.asarray(x_star, dtype=float)
    if x.shape[-1] != xs.shape[-1]:
        raise ValueError(f"dimension mismatch: point has {x.shape[-1]}, optimum has {xs.shape[-1]}")
    return x - xs


def sphere(x, x_star) -> np.ndarray:
    """Sum of squared displacements from the optimum."""
    u = _displacement(x, x_star)
    return (u * u).sum(axis=-1)


def rastrigin(x, x_star) -> np.ndarray:
    """Sphere plus a cosine ripple: sum of u^2 + 1 - cos(2*pi*u)."""
    u = _displacement(x, x_star)
    return (u * u + 1.0 - np.cos(2.0 * np.pi * u)).sum(axis=-1)


def perturbed_sphere(x, x_star) -> np.ndarray:
    """Sphere plus the cube of an asymmetric linear form.

    The per-coordinate form is u for u > 0 and -2u otherwise, which makes
    the sublevel sets highly asymmetric while keeping a unique optimum.
    """
    u = _displacement(x, x_star)
    skew = np.where(u > 0, u, -2.0 * u).sum(axis=-1)
    return (u * u).sum(axis=-1) + skew**3


def griewank(x, x_star) -> np.ndarray:
    """1 + sum(u^2)/4000 - prod(cos(u_i / sqrt(i))), i counted from 1."""
    u = _displacement(x, x_star)
    scale = np.sqrt(np.arange(1, u.shape[-1] + 1, dtype=float))
    return 1.0 + (u * u).sum(axis=-1) / 4000.0 - np.cos(u / scale).prod(axis=-1)


def monotone_wrap(spec: ObjectiveSpec, g: Callable, name: str | None = None) -> ObjectiveSpec:
    """Compose an objective with a strictly increasing function.

    The optimum location is unchanged and the optimum value becomes g(f*);
    sample rankings are exactly preserved.
    """
    def evaluate(x):
        return g(spec.evaluate(x))

    return ObjectiveSpec(
        name=name or f"{spec.name}:wrapped",
        dimension=spec.dimension,
        x_star=spec.x_star,
        f_star=float(g(spec.f_star)),
        evaluate=evaluate,
    )


@dataclass(frozen=True)
class PerturbedQuadratic:
    """Quadratic form plus a bounded higher-order perturbation.

    evaluate(x) = q(x) + q(x)^(alpha/2) * eps(x - x*) with
    q(x) = (x - x*)^T H (x - x*), H symmetric positive definite, alpha > 2
    and |eps| <= eps_bound everywhere.
    """

    matrix: np.ndarray
    alpha: float
    x_star: np.ndarray
    eps: Callable[[np.ndarray], np.ndarray]
    eps_bound: float
    _eigenvalues: np.ndarray

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def smallest_eigenvalue(self) -> float:
        return float(self._eigenvalues[0])

    @property
    def largest_eigenvalue(self) -> float:
        return float(self._eigenvalues[-1])

    def quadratic_form(self, x) -> np.ndarray:
        u = _displacement(x, self.x_star)
        return np.einsum("...i,ij,...j->...", u, self.matrix, u)

    def evaluate(self, x) -> np.ndarray:
        u = _displacement(x, self.x_star)
        q = np.einsum("...i,ij,...j->...", u, self.matrix, u)
        return q + q ** (self.alpha / 2.0) * self.eps(u)

    def as_objective(self, name: str) -> ObjectiveSpec:
        return ObjectiveSpec(name, self.dimension, self.x_star, 0.0, self.evaluate)


def make_perturbed_quadratic(
    rng: RngStream,
    d: int,
    alpha: float,
    condition_number: float = 1.0,
    eps_bound: float = 0.0,
    x_star=None,
) -> PerturbedQuadratic:
    """Random instance of the perturbed-quadratic family.

    H = Q^T D Q with Q a Haar-random rotation and D log-uniform in
    [1, condition_number]; eps is eps_bound * cos(w . u) for a random unit
    vector w, so it is smooth, bounded and direction-dependent.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if alpha <= 2:
        raise ValueError("alpha must exceed 2")
    if condition_number < 1:
        raise ValueError("condition number must be >= 1")
    if eps_bound < 0:
        raise ValueError("eps bound must be >= 0")
    g = rng.generator()
    if condition_number == 1:
        matrix = np.eye(d)  # rotating the identity only adds rounding noise
    else:
        diag = np.exp(g.uniform(0.0, np.log(condition_number), size=d))
        q_mat, r_mat = np.linalg.qr(g.standard_normal((d, d)))
        q_mat = q_mat * np.sign(np.diag(r_mat))  # fix signs for a proper Haar draw
        matrix = q_mat.T @ np.diag(diag) @ q_mat
        matrix = 0.5 * (matrix + matrix.T)
    w = g.standard_normal(d)
    w = w / np.linalg.norm(w)
    bound = float(eps_bound)

    def eps(u):
        return bound * np.cos(np.asarray(u, dtype=float) @ w)

    xs = np.zeros(d) if x_star is None else np.asarray(x_star, dtype=float)
    if xs.shape != (d,):
        raise ValueError("x_star has the wrong shape")
    return PerturbedQuadratic(
        matrix=matrix,
        alpha=float(alpha),
        x_star=xs,
        eps=eps,
        eps_bound=bound,
        _eigenvalues=np.linalg.eigvalsh(matrix),
    )


def sample_optimum(rng: RngStream, d: int, rho: float, r: float = 1.0) -> np.ndarray:
    """Uniform optimum location in the ball B(0, rho), with rho < r."""
    if rho < 0:
        raise ValueError("rho must be >= 0")
    if rho >= r:
        raise ValueError(f"optimum radius {rho} must stay strictly inside the domain radius {r}")
    if rho == 0:
        return np.zeros(d)
    return sample_uniform_ball(rng, d, rho, 1)[0]


_SUITE = {
    "sphere": sphere,
    "rastrigin": rastrigin,
    "perturbed_sphere": perturbed_sphere,
    "griewank": griewank,
}


def split_objective_name(name: str) -> tuple[str, bool]:
    """Split an objective name into its base descriptor and the exp-wrap flag."""
    parts = name.strip().split(":")
    wrap = False
    if parts and parts[-1] == "exp":
        wrap = True
        parts = parts[:-1]
    if not parts or not parts[0]:
        raise ValueError(f"empty objective name in {name!r}")
    return ":".join(parts), wrap


def make_objective(name: str, d: int, x_star, rng: RngStream | None = None) -> ObjectiveSpec:
    """Build a named objective at the given optimum location.

    Recognized names: ``sphere``, ``rastrigin``, ``perturbed_sphere``,
    ``griewank``, ``pq:<alpha>:<kappa>:<M>``; append ``:exp`` to compose
    with the exponential. The stream is consumed only by the ``pq`` family.
    """
    base, wrap = split_objective_name(name)
    xs = np.asarray(x_star, dtype=float)
    if xs.shape != (d,):
        raise ValueError("x_star has the wrong shape")
    if base in _SUITE:
        fn = _SUITE[base]

        def evaluate(x, _fn=fn, _xs=xs):
            return _fn(x, _xs)

        spec = ObjectiveSpec(base, d, xs, 0.0, evaluate)
    elif base.startswith("pq:"):
        tokens = base.split(":")
        if len(tokens) != 4:
            raise ValueError(f"expected pq:<alpha>:<kappa>:<M>, got {name!r}")
        alpha, kappa, bound = (float(t) for t in tokens[1:])
        if rng is None:
            raise ValueError("the pq objective family needs an RngStream")
        spec = make_perturbed_quadratic(rng, d, alpha, kappa, bound, x_star=xs).as_objective(base)
    else:
        raise ValueError(f"unknown objective {name!r}")
    if wrap:
        spec = monotone_wrap(spec, np.exp, name=f"{base}:exp")
    return spec
