"""Seeded samplers for the sets the maps act on."""
from __future__ import annotations

import math

import numpy as np

from .core_seq import lp_norm


def unit_sphere(rng: np.random.Generator, dim: int, p: float = 2.0) -> np.ndarray:
    v = rng.standard_normal(dim)
    return v / lp_norm(v, p)


def ball_point(rng: np.random.Generator, dim: int, p: float = 2.0, radius: float = 1.0) -> np.ndarray:
    """Random point of the l_p ball; the radius is drawn with an atom on the sphere."""
    u = rng.random()
    rad = radius if u < 0.2 else radius * u ** (1 / min(dim, 8))
    return rad * unit_sphere(rng, dim, p)


def cap_point(rng: np.random.Generator, dim: int, p: float = 2.0) -> np.ndarray:
    """Random point of the monotone cap: sorted magnitudes, random support and norm.

    A fifth of the draws sit on the unit sphere, a tenth are flat blocks
    ``c(1, ..., 1, 0, ...)``, which saturate the fundamental function.
    """
    k = int(rng.integers(1, dim + 1))
    mode = rng.random()
    if mode < 0.1:
        v = np.ones(k)
    else:
        v = np.sort(np.abs(rng.standard_normal(k)) * np.exp(-rng.random() * 3 * np.arange(k) / k))[::-1]
    n = lp_norm(v, p)
    if n == 0:
        return np.zeros(0)
    scale = 1.0 if rng.random() < 0.2 else rng.random()
    return v * (scale / n)


def close_pair(rng: np.random.Generator, x: np.ndarray, scale: float) -> np.ndarray:
    d = rng.standard_normal(x.size)
    return x + scale * d / np.linalg.norm(d)


def log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return math.exp(rng.uniform(math.log(lo), math.log(hi)))


def cube_point(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Point of ``[0, 1]^dim`` with some coordinates pinned at 0 or 1."""
    v = rng.random(dim)
    pins = rng.random(dim)
    v[pins < 0.1] = 0.0
    v[pins > 0.9] = 1.0
    return v


def simplex_point(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.dirichlet(np.full(dim, 0.5))
