"""Combinators that move fixed-point-free maps between sets.

Points are dense float arrays; maps may lengthen their input (the Lin map
shifts), so distances pad the shorter operand with zeros.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath
import numpy as np

from . import flat_construction as fc
from .bodies import summing_simplex
from .core_seq import L2, SpaceSpec, lp_norm
from .isotonic import project_monotone_cone
from .lin_map import _g_array
from .medina import NetHierarchy, medina_retract, sample_exterior

RETRACTION_CONSTANT = 1520.0


# moduli ------------------------------------------------------------------

@dataclass(frozen=True)
class Lipschitz:
    L: float

    def __call__(self, t):
        return self.L * t


@dataclass(frozen=True)
class Holder:
    alpha: float
    lam: float

    def __call__(self, t):
        return self.lam * np.power(t, self.alpha)


@dataclass(frozen=True)
class ModulusTable:
    """Monotone piecewise-linear modulus on a grid ``t`` (constant beyond the last node)."""

    ts: tuple
    values: tuple

    def __call__(self, t):
        vals = np.maximum.accumulate(np.asarray(self.values))
        return np.interp(t, self.ts, vals, left=vals[0], right=vals[-1])


@dataclass(frozen=True)
class IterateForm:
    """Per-iterate bound ``r_n (||x - y||^alpha + 1)``."""

    r: fc.RSchedule
    alpha: float = 1.0

    def bound(self, n: int, t: float) -> float:
        return self.r.r_float(n) * (t**self.alpha + 1)


T_GRID = tuple(2.0**k for k in range(-20, 2))


def compose_moduli(outer, inner):
    """Modulus of ``outer_map o inner_map`` given both moduli."""
    if isinstance(outer, Lipschitz) and isinstance(inner, Lipschitz):
        return Lipschitz(outer.L * inner.L)
    if isinstance(outer, Holder) and isinstance(inner, Lipschitz):
        return Holder(outer.alpha, outer.lam * inner.L**outer.alpha)
    if isinstance(outer, Lipschitz) and isinstance(inner, Holder):
        return Holder(inner.alpha, outer.L * inner.lam)
    if isinstance(outer, Holder) and isinstance(inner, Holder):
        return Holder(outer.alpha * inner.alpha, outer.lam * inner.lam**outer.alpha)
    vals = tuple(float(outer(inner(t))) for t in T_GRID)
    return ModulusTable(T_GRID, vals)


# handles -----------------------------------------------------------------

def pad_pair(a: np.ndarray, b: np.ndarray):
    n = max(a.size, b.size)
    return np.pad(a, (0, n - a.size)), np.pad(b, (0, n - b.size))


def distance(a, b, s: SpaceSpec = L2) -> float:
    a, b = pad_pair(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    return lp_norm(a - b, s.p)


@dataclass(frozen=True)
class MapHandle:
    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    modulus: object
    radius: float = 1.0
    uniform: bool = False
    space: SpaceSpec = L2
    notes: dict = field(default_factory=dict, compare=False)

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    def iterate(self, x, n: int):
        x = np.asarray(x, dtype=float)
        for _ in range(n):
            x = self.fn(x)
        return x

    def displacement(self, x) -> float:
        return distance(self(x), x, self.space)


# building blocks -----------------------------------------------------------

def radial_retract(x, r: float, s: SpaceSpec = L2) -> np.ndarray:
    """``x`` inside ``B(r)``, ``r x / ||x||`` outside; 2-Lipschitz in any norm."""
    x = np.asarray(x, dtype=float)
    nx = lp_norm(x, s.p)
    return x if nx <= r else x * (r / nx)


def lin_f_array(v: np.ndarray, p: float = 2.0) -> np.ndarray:
    g = _g_array(v, p)
    return g / lp_norm(g, p)


def project_cap_closed(v: np.ndarray) -> np.ndarray:
    """l2 projection onto the monotone cap as ball-after-cone.

    For a closed convex cone and a ball centred at its apex the projection onto
    the intersection is the composition of the two projections.
    """
    z = project_monotone_cone(v)
    nz = float(np.linalg.norm(z))
    return z / nz if nz > 1 else z


def scale_map(S: MapHandle, r: float, alpha: float | None = None) -> MapHandle:
    """``S_r(x) = r S(x / r)`` on ``B(r)``.

    A Lipschitz(L) source becomes Holder(alpha, (2r)^{1-alpha} L) when ``alpha``
    is given and Lipschitz(L) otherwise.
    """
    if not 0 < r <= 1:
        raise ValueError("r must lie in (0, 1]")
    mod = S.modulus
    if alpha is not None:
        if not isinstance(mod, Lipschitz):
            raise TypeError("Hoelder rescaling needs a Lipschitz source")
        mod = Holder(alpha, (2 * r) ** (1 - alpha) * mod.L)
    return MapHandle(f"scale({S.name},r={r:g})", lambda x: r * S.fn(x / r), mod,
                     radius=r * S.radius, uniform=S.uniform, space=S.space,
                     notes={**S.notes, "scale": r})


def shrink_map(G: MapHandle, lam: float) -> MapHandle:
    """``(1 - lam) G + lam I``; Lipschitz constant ``(1 - lam) L + lam``."""
    if not 0 < lam < 1:
        raise ValueError("lam must lie in (0, 1)")

    def fn(x):
        gx, xx = pad_pair(G.fn(x), x)
        return (1 - lam) * gx + lam * xx

    mod = Lipschitz((1 - lam) * G.modulus.L + lam) if isinstance(G.modulus, Lipschitz) else None
    return MapHandle(f"shrink({G.name},{lam:g})", fn, mod, G.radius, False, G.space,
                     {**G.notes, "shrink": lam})


def compose_with_retraction(F: MapHandle, R: MapHandle, name: str | None = None) -> MapHandle:
    """``F o R``; equals ``F`` wherever ``R`` is the identity."""
    return MapHandle(name or f"{F.name}∘{R.name}", lambda x: F.fn(R.fn(x)),
                     compose_moduli(F.modulus, R.modulus), R.radius, F.uniform, F.space,
                     {**R.notes, **F.notes})


def radial_handle(r: float, s: SpaceSpec = L2) -> MapHandle:
    return MapHandle(f"radial(r={r:g})", lambda x: radial_retract(x, r, s), Lipschitz(2.0),
                     radius=1.0, space=s)


def lin_handle(source: str = "Hilbert", p: float = 2.0) -> MapHandle:
    """Lin map composed with a retraction of the unit ball onto the monotone cap.

    ``Hilbert``: metric projection (l2 only); F o P is 2-Lipschitz because
    ``g`` is sqrt(2)-Lipschitz, ``||g|| >= 1/sqrt(2)`` on the cap, and radial
    normalization outside radius rho is 1/rho-Lipschitz in Hilbert space.
    ``LinBall``: running-min retraction under the bound ``4(D+2) = 12`` for F.
    The declared 2 for the retraction only holds in dimension ``N <= 2^p``;
    on ``R^N`` the running minimum is ``N^{1/p}``-Lipschitz and no better, so
    this handle's modulus is nominal.
    """
    if source == "Hilbert":
        if p != 2:
            raise ValueError("the metric projection route is l2 only")
        return MapHandle("lin:l2∘P", lambda x: lin_f_array(project_cap_closed(x)), Lipschitz(2.0),
                         space=L2)
    if source == "LinBall":
        s = SpaceSpec.lp(p)
        return MapHandle(f"lin:l{p:g}∘runmin",
                         lambda x: lin_f_array(np.minimum.accumulate(np.abs(x)), p),
                         Lipschitz(24.0), space=s)
    raise ValueError(f"unknown Lin source {source!r}")


def largest_dyadic(pred, start: int = 0, stop: int = 200) -> float:
    """Largest ``2^-k`` (``k >= start``) satisfying the monotone predicate ``pred``."""
    for k in range(start, stop):
        if pred(2.0**-k):
            return 2.0**-k
    raise ValueError("no dyadic value satisfies the constraint")


# flat-set handles ------------------------------------------------------------

@dataclass
class FlatRetraction:
    """Retraction of ``R^d`` onto the flat set: identity on K, else the net
    retraction onto the ``d``-dimensional truncation ``K_d`` (a simplex)."""

    K: fc.FlatSetK
    schedule: fc.RSchedule
    d: int = 3

    def __post_init__(self):
        alphas = [float(a) for a in self.K.weights.alphas(self.d)]
        self.body = summing_simplex(alphas, float(self.K.mu), self.schedule)
        self._hier = NetHierarchy(self.body)

    def to_w(self, x: np.ndarray) -> fc.WPoint:
        x = np.asarray(x, dtype=float)[: self.d]
        try:
            return fc.x_to_w(fc.Coeffs(x), self.K.weights, self.K.mu)
        except ValueError:
            y = medina_retract(x, self.body, self._hier)
            return fc.x_to_w(fc.Coeffs(y), self.K.weights, self.K.mu)


@dataclass
class FlatHandle:
    """``T = F o R`` on w-coordinates; ``T^n(x) = F^n(R(x))`` since ``F`` keeps ``K``."""

    K: fc.FlatSetK
    r: fc.RSchedule
    R: FlatRetraction
    modulus: object
    name: str
    notes: dict = field(default_factory=dict)

    def orbit(self, x, n: int) -> list:
        p = self.R.to_w(x)
        out = []
        for _ in range(n):
            p = fc.flat_shift(p)
            out.append(p)
        return out

    def iterate_distances(self, x, y, n: int) -> list:
        """``||T^m x - T^m y||`` for ``m = 1..n`` as mpf (they underflow float64)."""
        return [fc.x_distance(a, b, self.K) for a, b in zip(self.orbit(x, n), self.orbit(y, n))]

    def witness(self, n: int) -> list:
        return fc.witness_orbit(self.K, n)


def _flat_handle(alpha: float, mu: Fraction, schedule: fc.RSchedule, d: int, name: str, modulus,
                 notes: dict) -> FlatHandle:
    w = fc.solve_alphas(schedule)
    K = fc.FlatSetK(w, mu)
    return FlatHandle(K, schedule, FlatRetraction(K, schedule, d), modulus, name,
                      {**notes, "truncation_dim": d, "weights": f"c=2^-{w.c_exp}, q=2^-{w.q_exp}"})


def build_holder_free_map(alpha: float, lam: float = 1.0, source: str = "Hilbert", d: int = 3):
    """Assemble a fixed-point-free Hoelder map of the unit ball with null minimal displacement.

    ``Hilbert`` / ``LinBall``: ``T = S_r o radial_r`` for the Lin map ``S``
    with ``r`` the largest power of 1/2 such that ``2 L r^{1-alpha} <= lam``.
    ``ThmM4``: ``T = F o R`` over the flat set with ``r_n = 20^{n/(alpha-1)}``
    and budget 1; certified per iterate by ``r_n(||x - y||^alpha + 1)``.
    ``Pipeline``: the same flat construction at budget ``mu``, with
    ``theta = (1 + alpha)/2``, ``gamma = alpha/theta`` and ``mu`` the largest
    power of 1/2 with ``(2 mu)^{1-gamma} 1520 20^{2-theta} <= lam``.
    Flat-set handles use the net retraction on the ``d``-dimensional truncation.
    """
    if not 0 < alpha < 1 or lam <= 0:
        raise ValueError("need alpha in (0, 1) and lam > 0")
    if source in ("Hilbert", "LinBall"):
        S = lin_handle(source)
        L = S.modulus.L
        r = largest_dyadic(lambda r: 2 * L * r ** (1 - alpha) <= lam)
        T = compose_with_retraction(scale_map(S, r, alpha), radial_handle(r, S.space),
                                    name=f"holder[{source}](alpha={alpha:g},lam={lam:g})")
        return MapHandle(T.name, T.fn, Holder(alpha, 2 * L * r ** (1 - alpha)), 1.0, T.uniform,
                         T.space, {"source": source, "r": r, "L": L})
    if source == "ThmM4":
        sched = fc.RSchedule.holder(alpha)
        return _flat_handle(alpha, Fraction(1), sched, d, f"thmM4(alpha={alpha:g})",
                            IterateForm(sched, alpha), {"source": source})
    if source == "Pipeline":
        theta = (1 + alpha) / 2
        gamma = alpha / theta
        mu = largest_dyadic(lambda m: (2 * m) ** (1 - gamma) * RETRACTION_CONSTANT * 20 ** (2 - theta) <= lam)
        sched = fc.RSchedule.holder(theta)
        return _flat_handle(alpha, Fraction(mu), sched, d, f"pipeline(alpha={alpha:g},lam={lam:g})",
                            IterateForm(sched, alpha),
                            {"source": source, "theta": theta, "gamma": gamma, "mu": mu})
    raise ValueError(f"unknown source {source!r}")


# adversarial search ----------------------------------------------------------

def sample_ball(n: int, dim: int, rng: np.random.Generator, radius: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((n, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * (radius * rng.random((n, 1)) ** (1 / dim))


@dataclass
class SearchResult:
    pairs: int
    violations: int
    worst_ratio: float
    worst_pair: tuple | None


def holder_search(T: MapHandle, alpha: float, lam: float, dim: int, pairs: int, restarts: int,
                  seed: int, steps: int = 20, tol: float = 1e-12,
                  record: list | None = None) -> SearchResult:
    """Random and hill-climbed pairs in the unit ball against ``||Tx - Ty|| <= lam ||x - y||^alpha``.

    Random pairs mix far pairs with close pairs at log-uniform scales; each
    restart climbs the ratio ``||Tx - Ty|| / (lam ||x - y||^alpha)``.
    ``record`` collects ``(phase, ||x - y||, ratio)`` per evaluated pair.
    """
    rng = np.random.default_rng(seed)

    def ratio(x, y):
        dxy = float(np.linalg.norm(x - y))
        if dxy == 0:
            return 0.0
        return distance(T(x), T(y), T.space) / (lam * dxy**alpha)

    def project_ball(z):
        nz = np.linalg.norm(z)
        return z if nz <= 1 else z / nz

    xs = sample_ball(pairs, dim, rng)
    ys = sample_ball(pairs, dim, rng)
    close = rng.random(pairs) < 0.5
    scales = 10.0 ** rng.uniform(-8, 0, pairs)
    dirs = rng.standard_normal((pairs, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    ys[close] = xs[close] + scales[close, None] * dirs[close]
    worst, worst_pair, viol = 0.0, None, 0
    scored = []
    for x, y in zip(xs, ys):
        y = project_ball(y)
        q = ratio(x, y)
        scored.append(q)
        if record is not None:
            record.append(("random", float(np.linalg.norm(x - y)), q))
        if q > 1 + tol:
            viol += 1
        if q > worst:
            worst, worst_pair = q, (x, y)
    order = np.argsort(scored)[::-1]
    for j in range(restarts):
        k = order[j % len(order)] if j < len(order) // 2 else rng.integers(pairs)
        x, y = xs[k], project_ball(ys[k])
        q, step = ratio(x, y), 0.1
        for _ in range(steps):
            nx = project_ball(x + step * rng.standard_normal(dim) * max(np.linalg.norm(x - y), 1e-9))
            ny = project_ball(y + step * rng.standard_normal(dim) * max(np.linalg.norm(x - y), 1e-9))
            qn = ratio(nx, ny)
            if qn > q:
                x, y, q = nx, ny, qn
            else:
                step *= 0.7
        if record is not None:
            record.append(("climb", float(np.linalg.norm(x - y)), q))
        if q > 1 + tol:
            viol += 1
        if q > worst:
            worst, worst_pair = q, (x, y)
    return SearchResult(pairs + restarts, viol, worst, worst_pair)


def iterate_search(H: FlatHandle, n_max: int, pairs: int, seed: int, dmin: float = 1e-3,
                   record: list | None = None) -> SearchResult:
    """Pairs against ``r_n (||x - y||^alpha + 1)`` for ``n <= n_max``.

    Points are drawn in equal shares from the unit ball of ``R^d``, from a
    log-uniform distance band ``[dmin, 1/2]`` around the truncated body, and
    from the body itself; the flat set has tiny diameter, so uniform draws
    alone would almost all retract to one coarse net point.  Ratios are
    evaluated in mpf because ``F^n`` differences underflow float64.
    """
    rng = np.random.default_rng(seed)
    d = H.R.d
    body = H.R.body
    form: IterateForm = H.modulus

    def draw(k):
        mode = k % 3
        if mode == 1:
            return sample_exterior(body, 1, rng, dmin, 0.5)[0]
        if mode == 2:
            lam = rng.dirichlet(np.ones(d + 1))
            return lam @ body.vertices()
        while True:
            x = sample_ball(1, d, rng)[0]
            dist = float(body.distance(x))
            if dist == 0 or dist >= dmin:
                return x

    def worst_ratio(x, y):
        t = float(np.linalg.norm(x - y))
        pa, pb = H.R.to_w(x), H.R.to_w(y)
        worst = mpmath.mpf(0)
        for n in range(1, n_max + 1):
            pa, pb = fc.flat_shift(pa), fc.flat_shift(pb)
            dn = fc.x_distance(pa, pb, H.K)
            worst = max(worst, dn / (form.r.r(n) * (mpmath.mpf(t) ** form.alpha + 1)))
        return float(worst)

    worst, worst_pair, viol = 0.0, None, 0
    for k in range(pairs):
        x, y = draw(k), draw(k // 3 + k)
        q = worst_ratio(x, y)
        if record is not None:
            record.append(("mixed", float(np.linalg.norm(x - y)), q))
        if q > 1:
            viol += 1
        if q > worst:
            worst, worst_pair = q, (x, y)
    return SearchResult(pairs, viol, worst, worst_pair)
