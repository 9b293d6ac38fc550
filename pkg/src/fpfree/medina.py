"""Net-and-partition-of-unity retraction onto a flat convex body in ``R^d``.

Level ``n`` (any integer) uses ``eps_n = 2^-n`` and an ``(eps, eps)``-net of the
slice ``K ∩ E_{n(eps)}``.  A point ``x`` outside ``K`` lies in cells of the levels
whose shell ``[eps_n, eps_{n-1})``, fattened by ``eps_{n+1}``, reaches ``d(x, K)``.

The exact cell weight ``d(x, V^c)`` is replaced by
``sigma = max(0, eps_{n+1} - dist(x, cell lattice points))`` where the cell
lattice is the fixed grid ``h_n Z^d`` filtered by the shell and
nearest-net-point predicates.  Distance to a fixed finite set is 1-Lipschitz,
so every weight, and therefore ``R``, is locally Lipschitz.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .bodies import MEMBER_TOL, ConvexBody
from .flat_construction import RSchedule


class EmptySliceError(ValueError):
    pass


def level_index(eps: float, r: RSchedule) -> int:
    """``n(eps) = min{n >= 0 : r_n <= eps}`` with ``r_0 = 1``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if eps >= 1:
        return 0
    n = max(0, math.floor(math.log(eps) / float(r.log_base)) - 1)
    while r.r_float(n) > eps:
        n += 1
    while n > 0 and r.r_float(n - 1) <= eps:
        n -= 1
    return n


def eps_of(n: int) -> float:
    return math.ldexp(1.0, -n)


def farthest_point_net(samples: np.ndarray, eps: float) -> np.ndarray:
    """Greedy farthest-point selection until every sample is within ``eps``.

    Starts from the first sample; each new point is the sample farthest from
    the current net, so chosen points are pairwise ``> eps`` apart.
    """
    if len(samples) == 0:
        raise EmptySliceError("sampler returned no points")
    S = len(samples)
    B = 1024
    nb = -(-S // B)
    # pad to whole blocks with -inf so block maxima are one reshape away
    dmin = np.full(nb * B, -np.inf)
    dmin[:S] = np.linalg.norm(samples - samples[0], axis=1)
    bmax = dmin.reshape(nb, B).max(axis=1)
    tree = cKDTree(samples) if S > B else None
    chosen = [0]
    while True:
        b = int(np.argmax(bmax))
        j = b * B + int(np.argmax(dmin[b * B:(b + 1) * B]))
        if dmin[j] <= eps:
            break
        chosen.append(j)
        # only samples closer to s_j than their current net distance (<= dmin[j]) can change
        if tree is None:
            idx = np.arange(S)
        else:
            idx = np.asarray(tree.query_ball_point(samples[j], dmin[j]), dtype=np.int64)
        if idx.size:
            np.minimum.at(dmin, idx, np.linalg.norm(samples[idx] - samples[j], axis=1))
            blocks = np.unique(idx // B)
            bmax[blocks] = dmin.reshape(nb, B)[blocks].max(axis=1)
    return samples[chosen]


def greedy_net(body: ConvexBody, m: int, eps: float, resolution: float = 8.0):
    """``(eps, eps + h)``-net of ``K ∩ E_m`` from projected lattice samples at spacing
    ``eps / resolution``; returns ``(points, h)``."""
    samples, h = body.lattice_samples(m, eps / resolution)
    return farthest_point_net(samples, eps), h


@dataclass
class Level:
    n: int
    eps: float
    slice_m: int
    points: np.ndarray
    sample_h: float
    tree: cKDTree
    spacing: float
    offsets: np.ndarray  # integer lattice offsets covering a ball of radius eps_{n+1}

    def nearest(self, z: np.ndarray) -> np.ndarray:
        """Index of the nearest net point; exact ties go to the lowest index."""
        k = min(4, len(self.points))
        d, idx = self.tree.query(z, k=k)
        if k == 1:
            return np.asarray(idx).reshape(-1)
        d = np.atleast_2d(d)
        idx = np.atleast_2d(idx)
        tied = d == d[:, :1]
        return np.where(tied, idx, np.iinfo(np.int64).max).min(axis=1)


@dataclass
class NetHierarchy:
    """Lazily built per-level nets over a flat body.

    ``kappa`` sets the cell lattice spacing ``h_n = kappa eps_n``; a smaller
    value brings the surrogate weights closer to the exact ones.
    """

    body: ConvexBody
    kappa: float | None = None
    resolution: float = 8.0
    _levels: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kappa is None:
            self.kappa = 1 / 32 if self.body.dim <= 2 else 1 / 8

    def slice_for(self, n: int) -> int:
        return max(1, level_index(eps_of(n), self.body.r))

    def level(self, n: int) -> Level:
        lv = self._levels.get(n)
        if lv is None:
            eps = eps_of(n)
            m = self.slice_for(n)
            pts, h = greedy_net(self.body, m, eps, self.resolution)
            spacing = self.kappa * eps
            reach = int(math.ceil(0.5 / self.kappa + math.sqrt(self.body.dim)))
            rng = np.arange(-reach, reach + 1)
            off = np.stack(np.meshgrid(*([rng] * self.body.dim), indexing="ij"), -1).reshape(-1, self.body.dim)
            off = off[np.linalg.norm(off, axis=1) <= reach]
            lv = Level(n, eps, m, pts, h, cKDTree(pts), spacing, off)
            self._levels[n] = lv
        return lv

    @staticmethod
    def active_levels(d: float) -> range:
        """Levels with ``eps_n / 2 <= d < 5 eps_n / 2``."""
        lo = math.ceil(-math.log2(2 * d) - 1e-9)
        hi = math.ceil(math.log2(2.5 / d) + 1e-9) - 1
        return range(lo, max(lo, hi) + 1)


@dataclass
class CellWeight:
    n: int
    i: int
    weight: float
    sigma: float


def _cell_sigmas(x: np.ndarray, body: ConvexBody, lv: Level):
    """Surrogate sigma for every level-``n`` cell within reach of ``x``."""
    h = lv.spacing
    z = (np.round(x / h) + lv.offsets) * h
    dz = np.linalg.norm(z - x, axis=1)
    near = dz < lv.eps / 2
    z, dz = z[near], dz[near]
    dk = body.distance(z)
    shell = (dk >= lv.eps) & (dk < 2 * lv.eps)
    if not shell.any():
        return {}
    labels = lv.nearest(z[shell])
    out = {}
    for lab, dist in zip(labels, dz[shell]):
        s = lv.eps / 2 - dist
        if s > out.get(int(lab), 0.0):
            out[int(lab)] = s
    return out


def cell_weights(x, body: ConvexBody, H: NetHierarchy) -> list[CellWeight]:
    x = np.asarray(x, dtype=float)
    d = float(body.distance(x))
    if d <= MEMBER_TOL:
        raise ValueError("cell weights are defined outside the body only")
    raw = []
    for n in H.active_levels(d):
        lv = H.level(n)
        for i, s in _cell_sigmas(x, body, lv).items():
            raw.append((n, i, s))
    total = math.fsum(s for _, _, s in raw)
    if total <= 0:
        raise RuntimeError("no cell reaches the point; lattice too coarse")
    return [CellWeight(n, i, s / total, s) for n, i, s in raw]


def medina_retract(x, body: ConvexBody, H: NetHierarchy) -> np.ndarray:
    """``R(x) = sum phi_i^n(x) x_i^n`` outside the body and ``x`` on it."""
    x = np.asarray(x, dtype=float)
    if float(body.distance(x)) <= MEMBER_TOL:
        # projections land within rounding of K; treat them as members
        return x.copy()
    out = np.zeros_like(x)
    for cw in cell_weights(x, body, H):
        out += cw.weight * H.level(cw.n).points[cw.i]
    return out


def retract_many(xs: np.ndarray, body: ConvexBody, H: NetHierarchy) -> np.ndarray:
    return np.array([medina_retract(x, body, H) for x in xs])


def _omega_bound_factor(t: float, r: RSchedule) -> float:
    return 1520.0 * 20.0 ** level_index(t / 20, r)


def modulus_bound(t: float, r: RSchedule) -> float:
    """``1520 * 20^{n(t/20)} * t``."""
    return _omega_bound_factor(t, r) * t


def holder_bound(t: float, alpha: float) -> float:
    """``1520 * 20^{2-alpha} * t^alpha``."""
    return 1520.0 * 20.0 ** (2 - alpha) * t**alpha


def two_point_bound(x, y, body: ConvexBody) -> float:
    """``760 (20^{n(d(x)/10)} + 20^{n(d(y)/10)}) ||x - y||`` for exterior pairs."""
    r = body.r
    dx, dy = float(body.distance(x)), float(body.distance(y))
    return 760.0 * (20.0 ** level_index(dx / 10, r) + 20.0 ** level_index(dy / 10, r)) * float(
        np.linalg.norm(np.asarray(x) - np.asarray(y)))


def sample_exterior(body: ConvexBody, n: int, rng: np.random.Generator,
                    dmin: float = 0.02, dmax: float = 1.0) -> np.ndarray:
    """Points at distance in ``[dmin, dmax]`` from the body, log-uniform in distance."""
    lo, hi = body.bbox()
    out = []
    while len(out) < n:
        base = body.project(lo + (hi - lo) * rng.random(body.dim))
        u = rng.standard_normal(body.dim)
        u /= np.linalg.norm(u)
        target = math.exp(rng.uniform(math.log(dmin), math.log(dmax)))
        p = base + target * u
        d = float(body.distance(p))
        if dmin <= d <= dmax:
            out.append(p)
    return np.array(out)


@dataclass
class ModulusResult:
    t: float
    estimate: float
    pairs: int
    worst_pair: tuple


def modulus_estimate(body: ConvexBody, H: NetHierarchy, t: float, samples: int,
                     seed: int, climbs: int = 2, climb_steps: int = 8,
                     dmin: float = 0.02, dmax: float = 1.0) -> ModulusResult:
    """Empirical ``sup ||R(x) - R(y)||`` over pairs with ``||x - y|| <= t``.

    Anchors are exterior points with ``dmin <= d(x, K) <= dmax``.  Partners sit
    at distance ``t``; every other one is pulled onto the body when that keeps
    it within ``t``, to cover mixed pairs.  Partners falling in the band
    ``0 < d < dmin / 2`` are redrawn: resolving the retraction there needs nets
    far finer than the sampled region.  The best pairs are then refined by
    seeded hill-climbing on the partner direction.
    """
    rng = np.random.default_rng(seed)
    xs = sample_exterior(body, samples, rng, dmin, dmax)
    floor = dmin / 2

    def admissible(y):
        d = float(body.distance(y))
        return d <= MEMBER_TOL or d >= floor

    def partner(x, direction):
        y = x + t * direction / np.linalg.norm(direction)
        return y if admissible(y) else None

    def val(x, y):
        return float(np.linalg.norm(medina_retract(x, body, H) - medina_retract(y, body, H)))

    best, best_pair, scored = 0.0, None, []
    for k, x in enumerate(xs):
        y = None
        for _ in range(32):
            y = partner(x, rng.standard_normal(body.dim))
            if y is not None:
                break
        if y is None:
            continue
        if k % 2:
            py = body.project(y)
            if np.linalg.norm(py - x) <= t:
                y = py
        v = val(x, y)
        scored.append((v, k, y))
        if v > best:
            best, best_pair = v, (x, y)
    scored.sort(key=lambda s: -s[0])
    for v, k, y in scored[:climbs]:
        x, step = xs[k], 0.5
        for _ in range(climb_steps):
            u = rng.standard_normal(body.dim)
            cand = partner(x, (y - x) / max(np.linalg.norm(y - x), 1e-300) + step * u / np.linalg.norm(u))
            w = val(x, cand) if cand is not None else -1.0
            if w > v:
                v, y = w, cand
                if w > best:
                    best, best_pair = w, (x, cand)
            else:
                step /= 2
    return ModulusResult(t, best, len(scored), best_pair)


# oracle mode -------------------------------------------------------------

def oracle_cover_depth(x, body: ConvexBody, H: NetHierarchy, h: float = 1e-3) -> float:
    """Brute-force ``max_V d(x, V^c)`` over the exact cells, on a grid of step ``h``.

    Exact cells are approximated by grid points passing the shell and
    nearest-net-point predicates; ``V`` is their ``eps_{n+1}`` fattening.  The
    answer is accurate to about ``2h``.  Planar bodies only.
    """
    x = np.asarray(x, dtype=float)
    if body.dim != 2:
        raise ValueError("oracle mode is planar")
    d = float(body.distance(x))
    best = 0.0
    for n in H.active_levels(d):
        lv = H.level(n)
        rad = d + lv.eps / 2 + 2 * h
        ax = [np.arange(math.floor((x[j] - rad) / h), math.ceil((x[j] + rad) / h) + 1) * h for j in range(2)]
        g = np.stack(np.meshgrid(*ax, indexing="ij"), -1).reshape(-1, 2)
        g = g[np.linalg.norm(g - x, axis=1) <= rad]
        dk = body.distance(g)
        shell = (dk >= lv.eps) & (dk < 2 * lv.eps)
        if not shell.any():
            continue
        cells = g[shell]
        labels = lv.nearest(cells)
        inner = g[np.linalg.norm(g - x, axis=1) <= d + 2 * h]
        r_inner = np.linalg.norm(inner - x, axis=1)
        for lab in np.unique(labels):
            tree = cKDTree(cells[labels == lab])
            dv, _ = tree.query(inner)
            outside = dv > lv.eps / 2
            depth = float(r_inner[outside].min()) if outside.any() else d
            best = max(best, min(depth, d))
    return best
