"""Candidate-batch samplers for one-shot optimization.

Points are plain float64 arrays: a single point has shape ``(d,)``, a batch
has shape ``(n, d)``. All samplers are pure functions of their inputs and an
:class:`RngStream`, so repeated calls with the same stream reproduce the same
batch bit-for-bit.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtri

_MASK64 = (1 << 64) - 1

SAMPLER_KINDS = ("uniform_ball", "gaussian", "scrambled_hammersley")
RESCALINGS = ("none", "meta_recentering", "meta_tune_recentering")


@dataclass(frozen=True)
class RngStream:
    """Deterministic, splittable random stream.

    Identical ``(master_seed, stream_index)`` pairs reproduce the identical
    draw sequence; distinct indices give statistically independent streams.
    Child seeds are derived through numpy's SeedSequence spawn keys, which is
    a stable keyed hash of the pair.
    """

    master_seed: int
    stream_index: tuple[int, ...] = ()

    def __post_init__(self):
        idx = self.stream_index
        if isinstance(idx, int):
            idx = (idx,)
        object.__setattr__(self, "stream_index", tuple(int(i) for i in idx))

    def generator(self) -> np.random.Generator:
        """Fresh generator; calling twice yields identical sequences."""
        seq = np.random.SeedSequence(self.master_seed & _MASK64, spawn_key=self.stream_index)
        return np.random.default_rng(seq)

    def split(self, *indices: int) -> "RngStream":
        """Derive an independent child stream."""
        return RngStream(self.master_seed, self.stream_index + tuple(int(i) for i in indices))


def stream_for_key(master_seed: int, *parts) -> RngStream:
    """Stream addressed by an arbitrary content key.

    The key parts are stringified and hashed, so the stream depends on the
    values of the parts rather than on any enumeration order. Used by the
    experiment harness to give every grid cell its private stream.
    """
    text = "/".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    key = tuple(int.from_bytes(digest[4 * i:4 * i + 4], "little") for i in range(4))
    return RngStream(master_seed, key)


@dataclass(frozen=True)
class SamplerSpec:
    """Declarative description of a batch sampler.

    ``radius`` applies to the uniform-ball kind, ``sigma`` and ``rescaling``
    to the gaussian kind. ``quasi_opposite`` pairs every draw x with -u*x,
    u uniform in (0,1); ``middle_point`` forces the first point to the
    center of the domain.
    """

    kind: str = "uniform_ball"
    radius: float = 1.0
    sigma: float = 1.0
    quasi_opposite: bool = False
    middle_point: bool = False
    rescaling: str = "none"

    def __post_init__(self):
        if self.kind not in SAMPLER_KINDS:
            raise ValueError(f"unknown sampler kind {self.kind!r}")
        if self.rescaling not in RESCALINGS:
            raise ValueError(f"unknown rescaling {self.rescaling!r}")
        if self.rescaling != "none" and self.kind != "gaussian":
            raise ValueError("rescaling applies only to the gaussian sampler")
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


def sample_uniform_ball(rng: RngStream, d: int, r: float, n: int) -> np.ndarray:
    """Draw ``n`` points uniformly from the closed ball B(0, r) in R^d.

    A standard-normal direction is normalized and scaled by r*U^(1/d),
    which gives the exact uniform law in every dimension.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if r <= 0:
        raise ValueError("radius must be positive")
    if n < 1:
        raise ValueError("need at least one point")
    g = rng.generator()
    z = g.standard_normal((n, d))
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0  # measure-zero guard: maps to the origin
    radii = r * g.random(n) ** (1.0 / d)
    return z / norms * radii[:, None]


def sample_gaussian(rng: RngStream, d: int, sigma: float, n: int) -> np.ndarray:
    """Draw ``n`` i.i.d. points from sigma * N(0, I_d)."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if n < 1:
        raise ValueError("need at least one point")
    return sigma * rng.generator().standard_normal((n, d))


def quasi_opposite_extend(points: np.ndarray, rng: RngStream) -> np.ndarray:
    """Interleave every point x with its quasi-opposite -u*x, u ~ U(0,1).

    Output row 2k is ``points[k]``, row 2k+1 its opposite; length doubles.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("points must be a non-empty (n, d) array")
    u = rng.generator().random(pts.shape[0])
    out = np.empty((2 * pts.shape[0], pts.shape[1]))
    out[0::2] = pts
    out[1::2] = -u[:, None] * pts
    return out


def with_middle_point(points: np.ndarray) -> np.ndarray:
    """Replace the first point of the batch by the center of the domain."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("points must be a non-empty (n, d) array")
    out = pts.copy()
    out[0] = 0.0
    return out


def meta_recentering_sigma(lam: int, d: int) -> float:
    """Gaussian width (1 + ln(lam)) / (4 ln(d)); requires d >= 2."""
    if lam < 1:
        raise ValueError("budget must be >= 1")
    if d <= 1:
        raise ValueError("dimension must be >= 2 (ln d would vanish)")
    return (1.0 + math.log(lam)) / (4.0 * math.log(d))


def meta_tune_recentering_sigma(lam: int, d: int) -> float:
    """Gaussian width sqrt(ln(lam) / d); requires lam >= 2."""
    if lam <= 1:
        raise ValueError("budget must be >= 2 (sigma would vanish)")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return math.sqrt(math.log(lam) / d)


# ---------------------------------------------------------------------------
# Scrambled Hammersley
# ---------------------------------------------------------------------------

_PRIME_CACHE: list[int] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]


def _first_primes(count: int) -> list[int]:
    while len(_PRIME_CACHE) < count:
        candidate = _PRIME_CACHE[-1] + 2
        while True:
            limit = int(math.isqrt(candidate))
            if all(candidate % p for p in _PRIME_CACHE if p <= limit):
                _PRIME_CACHE.append(candidate)
                break
            candidate += 2
    return _PRIME_CACHE[:count]


def _digit_permutation(base: int, scramble_seed: int) -> np.ndarray:
    """Permutation of {0..base-1} keyed by (scramble_seed, base); 0 = identity."""
    if scramble_seed == 0:
        return np.arange(base)
    seq = np.random.SeedSequence(scramble_seed & _MASK64, spawn_key=(base,))
    return np.random.default_rng(seq).permutation(base)


def _radical_inverse(indices: np.ndarray, base: int, n_total: int, scramble_seed: int) -> np.ndarray:
    """Scrambled base-b digit reversal of each index, as a value in [0, 1).

    Every index is expanded to the fixed digit count needed for n_total so
    the scramble treats all indices consistently (leading zeros included).
    """
    perm = _digit_permutation(base, scramble_seed)
    n_digits = max(1, math.ceil(math.log(max(n_total, 2)) / math.log(base)))
    while base ** n_digits < n_total:  # guard against log rounding
        n_digits += 1
    rem = np.asarray(indices, dtype=np.int64).copy()
    out = np.zeros(rem.shape, dtype=float)
    denom = float(base)
    for _ in range(n_digits):
        rem, digit = np.divmod(rem, base)
        out += perm[digit] / denom
        denom *= base
    return out


def scrambled_hammersley(index: int, d: int, n_total: int, scramble_seed: int = 0) -> np.ndarray:
    """Point ``index`` of the scrambled Hammersley set of size n_total in [0,1)^d.

    Coordinate 0 is the stratified (index + 0.5) / n_total; coordinate k >= 1
    is the radical inverse of the index in the k-th prime base, with digits
    sent through a deterministic permutation keyed by (scramble_seed, base).
    A zero scramble_seed disables the scramble.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if n_total < 1:
        raise ValueError("n_total must be >= 1")
    if not 0 <= index < n_total:
        raise ValueError(f"index {index} outside [0, {n_total})")
    return hammersley_batch(n_total, d, scramble_seed)[index]


def hammersley_batch(n_total: int, d: int, scramble_seed: int = 0) -> np.ndarray:
    """Full scrambled Hammersley point set, shape (n_total, d)."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if n_total < 1:
        raise ValueError("n_total must be >= 1")
    indices = np.arange(n_total, dtype=np.int64)
    out = np.empty((n_total, d))
    out[:, 0] = (indices + 0.5) / n_total
    if d > 1:
        for k, base in enumerate(_first_primes(d - 1), start=1):
            out[:, k] = _radical_inverse(indices, base, n_total, scramble_seed)
    return out


# ---------------------------------------------------------------------------
# Spec-driven batch generation (harness entry point)
# ---------------------------------------------------------------------------

def effective_sigma(spec: SamplerSpec, lam: int, d: int) -> float:
    """Gaussian width after applying the spec's rescaling rule to budget lam."""
    if spec.rescaling == "meta_recentering":
        return meta_recentering_sigma(lam, d)
    if spec.rescaling == "meta_tune_recentering":
        return meta_tune_recentering_sigma(lam, d)
    return spec.sigma


def generate_batch(spec: SamplerSpec, rng: RngStream, d: int, n: int) -> np.ndarray:
    """Produce exactly ``n`` points in R^d according to ``spec``.

    Quasi-opposition draws ceil(n/2) base points, extends, and truncates to
    the budget. Hammersley points are mapped to R^d through the inverse
    normal CDF so they play the role of the Gaussian cloud; the scramble
    seed is derived from the stream.
    """
    if n < 1:
        raise ValueError("need at least one point")
    base_n = (n + 1) // 2 if spec.quasi_opposite else n
    if spec.kind == "uniform_ball":
        pts = sample_uniform_ball(rng.split(0), d, spec.radius, base_n)
    elif spec.kind == "gaussian":
        sigma = effective_sigma(spec, n, d)
        pts = sample_gaussian(rng.split(0), d, sigma, base_n)
    else:  # scrambled_hammersley
        scramble = int(rng.split(2).generator().integers(1, 2**63))
        u = hammersley_batch(base_n, d, scramble)
        lo = 0.5 / max(base_n, 2)
        pts = ndtri(np.clip(u, lo, 1.0 - lo))
    if spec.quasi_opposite:
        pts = quasi_opposite_extend(pts, rng.split(1))[:n]
    if spec.middle_point:
        pts = with_middle_point(pts)
    return pts


def parse_sampler(text: str) -> SamplerSpec:
    """Parse a compact sampler string.

    Grammar: ``<base>[@<rescaling>][:qo][:mid]`` with base one of
    ``uniform``/``ball``, ``gaussian``/``normal``, ``hammersley`` and
    rescaling one of ``metarec``, ``metatune``. Radius/sigma keep their
    defaults and can be overridden via config fields.
    """
    parts = text.strip().split(":")
    head, flags = parts[0], parts[1:]
    if "@" in head:
        base, rescale_token = head.split("@", 1)
    else:
        base, rescale_token = head, ""
    kind = {
        "uniform": "uniform_ball", "ball": "uniform_ball", "uniform_ball": "uniform_ball",
        "gaussian": "gaussian", "normal": "gaussian",
        "hammersley": "scrambled_hammersley", "scrambled_hammersley": "scrambled_hammersley",
    }.get(base.strip().lower())
    if kind is None:
        raise ValueError(f"unknown sampler {base!r}")
    rescaling = {"": "none", "metarec": "meta_recentering", "metatune": "meta_tune_recentering"}.get(
        rescale_token.strip().lower())
    if rescaling is None:
        raise ValueError(f"unknown rescaling {rescale_token!r}")
    qo = mid = False
    for flag in flags:
        f = flag.strip().lower()
        if f == "qo":
            qo = True
        elif f == "mid":
            mid = True
        elif f:
            raise ValueError(f"unknown sampler flag {flag!r}")
    return SamplerSpec(kind=kind, quasi_opposite=qo, middle_point=mid, rescaling=rescaling)


def sampler_with(spec: SamplerSpec, **changes) -> SamplerSpec:
    """Copy of ``spec`` with the given fields replaced."""
    return replace(spec, **changes)
