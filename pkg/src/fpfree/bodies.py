"""Finite-dimensional convex bodies with membership, projection and slice oracles.

Slices are taken along the coordinate chain ``E_m = span{e_1, ..., e_m}``.  All
oracles are vectorized over a leading batch axis.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .flat_construction import RSchedule

MEMBER_TOL = 1e-12


class ConvexBody:
    """Base class; subclasses provide ``project`` and ``slice``."""

    dim: int
    r: RSchedule
    name: str = "body"

    def project(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def slice(self, m: int) -> "ConvexBody":
        """``K ∩ E_m`` as a body in the same ambient space."""
        raise NotImplementedError

    def vertices(self) -> np.ndarray:
        raise NotImplementedError

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.vertices()
        return v.min(axis=0), v.max(axis=0)

    def distance(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.linalg.norm(x - self.project(x), axis=-1)

    def contains(self, x: np.ndarray, tol: float = MEMBER_TOL) -> np.ndarray:
        return self.distance(x) <= tol

    def slice_dim(self, m: int) -> int:
        """Number of free coordinates of the level-``m`` slice."""
        return min(max(m, 1), self.dim)

    def lattice_samples(self, m: int, h: float) -> tuple[np.ndarray, float]:
        """Projected lattice points of ``K ∩ E_m`` at spacing ``h``.

        Returns the samples and their density radius ``h sqrt(k) / 2``: every
        point of the slice lies within that distance of a sample, because the
        projection is nonexpansive and fixes the slice.
        """
        s = self.slice(m)
        k = self.slice_dim(m)
        lo, hi = s.bbox()
        axes = [np.arange(np.floor(lo[j] / h), np.ceil(hi[j] / h) + 1) * h for j in range(k)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, k)
        pts = np.zeros((grid.shape[0], self.dim))
        pts[:, :k] = grid
        pts = np.unique(s.project(pts), axis=0)
        return pts, h * np.sqrt(k) / 2


@dataclass(frozen=True, eq=False)
class Box(ConvexBody):
    lo: tuple
    hi: tuple
    r: RSchedule = field(default_factory=lambda: RSchedule.exponential(0.5))
    name: str = "box"

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError("box needs lo <= hi coordinatewise")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def project(self, x):
        return np.clip(np.asarray(x, dtype=float), self.lo, self.hi)

    def vertices(self):
        return np.array(list(itertools.product(*zip(self.lo, self.hi))), dtype=float)

    def slice(self, m):
        k = self.slice_dim(m)
        lo, hi = list(self.lo), list(self.hi)
        for j in range(k, self.dim):
            if not (lo[j] <= 0.0 <= hi[j]):
                raise ValueError(f"slice E_{m} misses the box")
            lo[j] = hi[j] = 0.0
        return Box(tuple(lo), tuple(hi), self.r, f"{self.name}|E{k}")


class Simplex(ConvexBody):
    """Convex hull of affinely independent vertices.

    Projection enumerates faces: the nearest point lies in the relative
    interior of exactly one face, where it is the affine projection with
    positive barycentric weights.  Every feasible face projection lies in the
    body, so the nearest feasible candidate is the projection.
    """

    def __init__(self, vertices, r: RSchedule | None = None, name: str = "simplex"):
        v = np.atleast_2d(np.asarray(vertices, dtype=float))
        if v.shape[0] > 1 and np.linalg.matrix_rank(v[1:] - v[0]) != v.shape[0] - 1:
            raise ValueError("simplex vertices must be affinely independent")
        self._v = v
        self.dim = v.shape[1]
        self.r = r or RSchedule.exponential(0.5)
        self.name = name
        self._faces = []
        for size in range(1, v.shape[0] + 1):
            for idx in itertools.combinations(range(v.shape[0]), size):
                base = v[idx[0]]
                edges = v[list(idx[1:])] - base  # (size-1, dim)
                pinv = np.linalg.pinv(edges.T) if size > 1 else None
                self._faces.append((idx, base, edges, pinv))

    def vertices(self):
        return self._v.copy()

    def project(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, self.dim)
        best = np.full(flat.shape[0], np.inf)
        out = np.empty_like(flat)
        for idx, base, edges, pinv in self._faces:
            if pinv is None:
                cand = np.broadcast_to(base, flat.shape)
                ok = np.ones(flat.shape[0], dtype=bool)
            else:
                lam = (flat - base) @ pinv.T  # (B, size-1)
                ok = (lam >= 0).all(axis=1) & (lam.sum(axis=1) <= 1)
                cand = base + lam @ edges
            d = np.linalg.norm(flat - cand, axis=1)
            take = ok & (d < best)
            best[take] = d[take]
            out[take] = cand[take]
        return out.reshape(x.shape)

    def slice(self, m):
        """Hull of the vertices lying in ``E_m``; exact when all vertices have
        nonnegative trailing coordinates (checked)."""
        k = self.slice_dim(m)
        if k == self.dim:
            return self
        trailing = self._v[:, k:]
        if np.any(trailing < 0):
            raise ValueError("slice oracle needs nonnegative trailing vertex coordinates")
        keep = np.all(trailing == 0, axis=1)
        if not keep.any():
            raise ValueError(f"slice E_{m} misses the simplex")
        return Simplex(self._v[keep], self.r, f"{self.name}|E{k}")


class SummingSimplex(ConvexBody):
    """``{sum s_k alpha_k e_k : mu >= s_1 >= ... >= s_d >= 0}``: the flat set cut to ``R^d``.

    A simplex with vertices ``0`` and ``mu w_k``, but its weights may span
    hundreds of binary orders, so the projection works in ``s``-coordinates:
    a weighted nonincreasing fit of ``x / alpha`` with weights ``alpha^2``,
    clipped to ``[0, mu]``.  The fit is the best feasible piecewise-constant
    candidate over all contiguous block partitions (vectorized; fine for small ``d``).
    """

    def __init__(self, alphas, mu: float = 1.0, r: RSchedule | None = None, name: str = "flat",
                 ambient: int | None = None):
        a = np.asarray(alphas, dtype=float)
        if a.ndim != 1 or a.size == 0 or np.any(a <= 0):
            raise ValueError("weights must be positive")
        self.alphas = a
        self.mu = float(mu)
        self.dim = ambient or a.size
        self.r = r or RSchedule.exponential(0.5)
        self.name = name
        w = a**2
        self._parts = []
        for cuts in itertools.product((False, True), repeat=a.size - 1):
            labels = np.concatenate([[0], np.cumsum(cuts, dtype=int)]).astype(int)
            onehot = (labels[None, :] == np.arange(labels[-1] + 1)[:, None]).astype(float)
            self._parts.append((onehot, onehot @ w, labels))

    def vertices(self):
        out = np.zeros((self.alphas.size + 1, self.dim))
        for k in range(1, self.alphas.size + 1):
            out[k, :k] = self.mu * self.alphas[:k]
        return out

    def project(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, self.dim)
        a = self.alphas
        y = flat[:, : a.size] / a
        w = a**2
        best_val = np.full(flat.shape[0], np.inf)
        best = np.zeros_like(y)
        for onehot, bw, labels in self._parts:
            means = (y * w) @ onehot.T / bw
            ok = np.all(np.diff(means, axis=1) <= 0, axis=1)
            cand = np.clip(means[:, labels], 0.0, self.mu)
            val = ((cand - y) ** 2 * w).sum(axis=1)
            take = ok & (val < best_val)
            best_val[take] = val[take]
            best[take] = cand[take]
        out = np.zeros_like(flat)
        out[:, : a.size] = best * a
        return out.reshape(x.shape)

    def slice(self, m):
        k = self.slice_dim(m)
        if k >= self.alphas.size:
            return self
        return SummingSimplex(self.alphas[:k], self.mu, self.r, f"{self.name}|E{k}", self.dim)


def summing_simplex(alphas, mu: float = 1.0, r: RSchedule | None = None) -> SummingSimplex:
    return SummingSimplex(alphas, mu, r)


def heights(body: ConvexBody) -> list[float]:
    """``h_m = sup_{x in K} d(x, K ∩ E_m)`` for ``m = 1..dim``.

    Distance to a convex set is convex, so over a polytope the sup sits at a
    vertex; the vertex maximum is exact.
    """
    v = body.vertices()
    return [float(body.slice(m).distance(v).max()) for m in range(1, body.dim + 1)]


def check_flat(body: ConvexBody) -> list[tuple[int, float, float]]:
    """Rows ``(m, h_m, r_m)``; raises when some ``h_m > r_m``."""
    rows = [(m, h, body.r.r_float(m)) for m, h in enumerate(heights(body), start=1)]
    bad = [row for row in rows if row[1] > row[2]]
    if bad:
        raise ValueError(f"body is not flat for {body.r.label}: {bad}")
    return rows


def preset(name: str, schedule: RSchedule | None = None) -> ConvexBody:
    """Named bodies: ``segment2d``, ``thinbox2d``, ``simplex2d``, ``flat3d``."""
    if name == "segment2d":
        return Box((0.0, 0.0), (1.0, 0.0), schedule or RSchedule.exponential(0.5), name)
    if name == "thinbox2d":
        return Box((0.0, 0.0), (1.0, 0.05), schedule or RSchedule.exponential(0.5), name)
    if name == "simplex2d":
        return Simplex([(0.0, 0.0), (1.0, 0.0), (0.4, 0.2)], schedule or RSchedule.exponential(0.5), name)
    if name == "flat3d":
        b = summing_simplex([0.4, 0.2, 0.1], 1.0, schedule or RSchedule.exponential(0.5))
        b.name = name
        return b
    raise KeyError(f"unknown body preset {name!r}")


PRESETS = ("segment2d", "thinbox2d", "simplex2d", "flat3d")
