"""Fixed spatial prior and per-point latent codes.

The generator never sees raw noise alone: every latent code is attached to a
point of a fixed, evenly distributed point set (the "prior"), and that pairing
is the handle for all part-level manipulation downstream.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_LATENT_DIM = 128


@dataclass(frozen=True)
class SpherePoints:
    """N unit-norm 3D points, deterministic in (n, seed)."""

    coords: np.ndarray  # (n, 3) float64, rows unit-norm
    seed: int
    n: int = field(init=False)

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[1] != 3:
            raise ValueError(f"coords must be (n, 3), got {coords.shape}")
        norms = np.linalg.norm(coords, axis=1)
        if not np.all(np.abs(norms - 1.0) < 1e-6):
            raise ValueError("sphere rows must have unit norm")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "n", coords.shape[0])


@dataclass(frozen=True)
class LatentCode:
    """A d-dimensional real vector; all entries finite."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if values.size == 0:
            raise ValueError("latent code must have d >= 1")
        if not np.all(np.isfinite(values)):
            raise ValueError("latent code entries must be finite")
        object.__setattr__(self, "values", values)

    @property
    def d(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class PriorLatentMatrix:
    """Sphere points with one latent row per point; the generator's sole input."""

    sphere: SpherePoints
    codes: np.ndarray  # (n, d)

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.float64)
        if codes.ndim != 2:
            raise ValueError(f"codes must be 2-D, got shape {codes.shape}")
        if codes.shape[0] != self.sphere.n:
            raise ValueError(
                f"codes has {codes.shape[0]} rows but sphere has {self.sphere.n} points"
            )
        if not np.all(np.isfinite(codes)):
            raise ValueError("latent rows must be finite")
        object.__setattr__(self, "codes", codes)

    @property
    def d(self) -> int:
        return self.codes.shape[1]


def sample_sphere(n: int, seed: int = 0) -> SpherePoints:
    """Evenly distributed points on the unit sphere via the Fibonacci spiral.

    Deterministic in (n, seed): the seed only rotates the spiral's azimuthal
    offset, so different seeds give distinct but equally uniform lattices.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    i = np.arange(n, dtype=np.float64)
    # z runs from just below +1 to just above -1; golden-angle azimuth.
    z = 1.0 - (2.0 * i + 1.0) / n
    golden = np.pi * (3.0 - np.sqrt(5.0))
    offset = np.random.default_rng(seed).uniform(0.0, 2.0 * np.pi)
    phi = i * golden + offset
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    coords = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    coords /= np.linalg.norm(coords, axis=1, keepdims=True)
    return SpherePoints(coords=coords, seed=seed)


def sample_cube(n: int, seed: int = 0) -> SpherePoints:
    """Uniform points on the surface of the axis-aligned cube inscribed in the
    unit ball (half-side 1/sqrt(3)); the prior-shape ablation counterpart of
    :func:`sample_sphere`. Returned coords are NOT unit-norm, so this bypasses
    the SpherePoints constructor check via direct construction.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    h = 1.0 / np.sqrt(3.0)
    face = rng.integers(0, 6, size=n)
    uv = rng.uniform(-h, h, size=(n, 2))
    coords = np.empty((n, 3), dtype=np.float64)
    axis = face // 2
    sign = np.where(face % 2 == 0, h, -h)
    for k in range(3):
        m = axis == k
        coords[m, k] = sign[m]
        others = [a for a in range(3) if a != k]
        coords[np.ix_(m, others)] = uv[m]
    out = object.__new__(SpherePoints)
    object.__setattr__(out, "coords", coords)
    object.__setattr__(out, "seed", seed)
    object.__setattr__(out, "n", n)
    return out


def sample_prior(kind: str, n: int, seed: int = 0) -> SpherePoints:
    """Dispatch on prior kind: "sphere" (default) or "cube" (ablation)."""
    if kind == "sphere":
        return sample_sphere(n, seed)
    if kind == "cube":
        return sample_cube(n, seed)
    raise ValueError(f"unknown prior kind {kind!r}")


def sample_code(d: int, rng: np.random.Generator) -> LatentCode:
    """One latent code: d independent standard-normal draws."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return LatentCode(values=rng.standard_normal(d))


def pack_uniform(sphere: SpherePoints, z: LatentCode) -> PriorLatentMatrix:
    """Attach the same code z to every prior point (whole-shape sampling)."""
    codes = np.tile(z.values, (sphere.n, 1))
    return PriorLatentMatrix(sphere=sphere, codes=codes)


def pack_perpoint(sphere: SpherePoints, codes: np.ndarray) -> PriorLatentMatrix:
    """Attach explicit per-point codes (the manipulation entry point)."""
    codes = np.asarray(codes, dtype=np.float64)
    if codes.ndim != 2 or codes.shape[0] != sphere.n:
        raise ValueError(
            f"codes must be ({sphere.n}, d), got {codes.shape}"
        )
    return PriorLatentMatrix(sphere=sphere, codes=codes.copy())
