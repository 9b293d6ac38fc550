"""Fixed-point-free Lipschitz map on the monotone cap of the unit ball.

The cap ``K`` holds the nonincreasing nonnegative coefficient vectors of norm
at most one.  ``g`` duplicates the leading coefficient (or tops it up to
``1 - ||x||``) and shifts the rest right; ``F = g / ||g||`` maps ``K`` into its
unit sphere without fixed points whenever the fundamental function of the
basis is unbounded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core_seq import L2, Coeffs, SpaceSpec, as_coeffs, fundamental_function, lp_norm
from .isotonic import project_monotone_cone

MEMBERSHIP_TOL = 1e-12


class NotInSetError(ValueError):
    """A point handed to a map lies outside the map's domain."""


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class MonotoneCapK:
    space: SpaceSpec = L2

    def __post_init__(self):
        if self.space.is_sup:
            # sup-norm partial sums stay bounded, so F would have fixed points
            raise ValueError("the monotone cap construction needs an l_p norm, not sup")

    def contains(self, x: Coeffs, tol: float = MEMBERSHIP_TOL) -> bool:
        return in_k(x, self, tol)


def in_k(x: Coeffs, K: MonotoneCapK, tol: float = MEMBERSHIP_TOL) -> bool:
    v = as_coeffs(x).values
    if v.size == 0:
        return True
    if np.any(v < 0) or np.any(np.diff(v) > 0):
        return False
    return lp_norm(v, K.space.p) <= 1 + tol


def _g_array(v: np.ndarray, p: float) -> np.ndarray:
    out = np.empty(v.size + 1)
    t1 = v[0] if v.size else 0.0
    out[0] = max(t1, 1.0 - lp_norm(v, p))
    out[1:] = v
    return out


def g_map(x: Coeffs, K: MonotoneCapK) -> Coeffs:
    """``g(x) = max(t_1, 1 - ||x||) e_1 + sum_n t_n e_{n+1}``."""
    x = as_coeffs(x)
    if not in_k(x, K):
        raise NotInSetError("g is only defined on the monotone cap")
    return Coeffs(_g_array(x.values, K.space.p))


def f_map(x: Coeffs, K: MonotoneCapK) -> Coeffs:
    """``F(x) = g(x) / ||g(x)||``; ``||g(x)|| >= 1/2`` on the cap."""
    x = as_coeffs(x)
    if not in_k(x, K):
        raise NotInSetError("F is only defined on the monotone cap")
    g = _g_array(x.values, K.space.p)
    return Coeffs(g / lp_norm(g, K.space.p))


def retract_monotone(x: Coeffs, K: MonotoneCapK | None = None) -> Coeffs:
    """Running minimum of absolute coordinates: a retraction of the ball onto K.

    On vectors of length N it is exactly ``N^{1/p}``-Lipschitz in l_p: each
    output coordinate moves by at most ``||x - y||_inf``, and nudging the first
    entry of a flat block ``c(1, ..., 1)`` moves all of them.
    """
    v = as_coeffs(x).values
    if v.size == 0:
        return Coeffs()
    return Coeffs(np.minimum.accumulate(np.abs(v)))


def _project_ball(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    return v / n if n > 1 else v


def hilbert_project_k(x: Coeffs, tol: float = 1e-10, max_sweeps: int = 100_000) -> Coeffs:
    """Metric projection of ``x`` onto the l2 monotone cap by Dykstra's algorithm.

    Alternates the cone projection (isotonic fit then clamp at zero) with the
    radial projection onto the unit ball, carrying Dykstra's correction terms.
    Raises ``ConvergenceError`` when successive iterates are still ``>= tol``
    apart after ``max_sweeps`` sweeps.
    """
    y = np.array(as_coeffs(x).values, dtype=float)
    p = np.zeros_like(y)
    q = np.zeros_like(y)
    for _ in range(max_sweeps):
        z = project_monotone_cone(y + p)
        p = y + p - z
        y_new = _project_ball(z + q)
        q = z + q - y_new
        if np.linalg.norm(y_new - y) < tol and np.linalg.norm(y_new - z) < tol:
            return Coeffs(y_new)
        y = y_new
    raise ConvergenceError(f"Dykstra projection did not reach tol={tol} in {max_sweeps} sweeps")


@dataclass
class OrbitRecord:
    """Orbit ``F(x), F^2(x), ..., F^n(x)`` with asymptotic-regularity bookkeeping.

    ``iterates[j] = F^{j+1}(x)``; ``gaps[j] = ||F^{j+2}(x) - F^{j+1}(x)||``;
    ``tails[j] = ||g(F^{j+1}x) - F^{j+1}x||`` and ``g_norms[j] = ||g(F^{j+1}x)||``.
    """

    seed: Coeffs
    iterates: list[Coeffs]
    gaps: list[float]
    tails: list[float]
    g_norms: list[float]
    space: SpaceSpec = field(default=L2)

    def iterate(self, k: int) -> Coeffs:
        return self.seed if k == 0 else self.iterates[k - 1]

    def ar_rows(self):
        """Rows ``(n, gap, 1/Phi(n), tail, bound)`` comparing ``||F^{n+2}x - F^{n+1}x||``
        with ``1/Phi(n) + ||g(F^{n+1}x) - F^{n+1}x||``."""
        rows = []
        for n in range(1, len(self.gaps)):
            inv_phi = 1.0 / fundamental_function(n, self.space)
            rows.append((n, self.gaps[n], inv_phi, self.tails[n], inv_phi + self.tails[n]))
        return rows


def orbit(x: Coeffs, K: MonotoneCapK, n: int) -> OrbitRecord:
    if n < 1:
        raise ValueError("need at least one step")
    x = as_coeffs(x)
    if not in_k(x, K):
        raise NotInSetError("orbit seed must lie in the monotone cap")
    p = K.space.p
    iterates, gaps, tails, g_norms = [], [], [], []
    v = x.values.astype(float)
    for _ in range(n):
        g = _g_array(v, p)
        v = g / lp_norm(g, p)
        iterates.append(Coeffs(v))
    for j, it in enumerate(iterates):
        u = it.values
        g = _g_array(u, p)
        gn = lp_norm(g, p)
        g_norms.append(gn)
        tails.append(lp_norm(g - np.append(u, 0.0), p))
        if j + 1 < len(iterates):
            nxt = iterates[j + 1].values
            gaps.append(lp_norm(nxt - np.append(u, np.zeros(len(nxt) - len(u))), p))
    return OrbitRecord(x, iterates, gaps, tails, g_norms, K.space)


class FastOrbit:
    """O(1)-per-step orbit of ``F`` on the monotone cap.

    The current iterate is ``scale * buf[head:]``.  Applying ``F`` prepends the
    new leading coefficient and rescales, so only the running ``p``-th power of
    the norm has to be tracked.
    """

    def __init__(self, x: Coeffs, K: MonotoneCapK, max_steps: int):
        x = as_coeffs(x)
        if not in_k(x, K):
            raise NotInSetError("orbit seed must lie in the monotone cap")
        self.p = K.space.p
        v = x.values.astype(float)
        self.buf = np.zeros(max_steps + v.size)
        self.head = max_steps
        self.buf[self.head:] = v
        self.scale = 1.0
        self.pow_norm = float(np.sum(np.abs(v) ** self.p)) if v.size else 0.0
        self.steps = 0

    def current(self) -> np.ndarray:
        return self.scale * self.buf[self.head:]

    def step(self):
        if self.head == 0:
            raise RuntimeError("orbit buffer exhausted")
        t1 = self.scale * self.buf[self.head] if self.head < self.buf.size else 0.0
        g1 = max(t1, 1.0 - self.pow_norm ** (1.0 / self.p))
        g_pow = g1**self.p + self.pow_norm
        gn = g_pow ** (1.0 / self.p)
        self.head -= 1
        self.buf[self.head] = g1 / self.scale
        self.scale /= gn
        self.pow_norm = g_pow / gn**self.p
        self.steps += 1
        if self.scale < 1e-150 or self.scale > 1e150:
            self.buf[self.head:] *= self.scale
            self.scale = 1.0

    def displacement(self) -> float:
        """``||F(y) - y||`` at the current iterate ``y``."""
        y = self.current()
        g = _g_array(y, self.p)
        fy = g / lp_norm(g, self.p)
        return lp_norm(fy - np.append(y, 0.0), self.p)


def displacement_hit(x: Coeffs, K: MonotoneCapK, eps: float, max_steps: int):
    """First iterate index ``k`` with ``||T(T^k x) - T^k x|| < eps`` for ``T = F o R``.

    ``R`` is the running-min retraction, so ``T`` agrees with ``F`` from the
    first iterate on.  Displacements are probed at geometrically spaced steps;
    returns ``(k, displacement)`` or ``(None, smallest displacement seen)``.
    """
    start = retract_monotone(x)
    best = math.inf
    fo = FastOrbit(start, K, max_steps)
    probe_at = 0
    while True:
        if fo.steps >= probe_at:
            d = fo.displacement()
            best = min(best, d)
            if d < eps:
                return fo.steps, d
            probe_at = fo.steps + max(1, fo.steps // 64)
        if fo.steps >= max_steps:
            return None, best
        fo.step()
