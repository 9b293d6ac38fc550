"""Flat convex set of weighted summing vectors and its affine shift map.

Weights ``alpha_i = c q^{i^2}`` define summing vectors ``w_n = sum_{i<=n} alpha_i e_i``
and their limit ``w_0``.  A point of the flat set is stored in w-coordinates
``(t_0, t_1, ..., t_N)`` with ``t >= 0`` and ``sum t <= mu``; its x-coordinates are
``(t_0 + sum_{i>=k} t_i) alpha_k``.  w-coordinates are exact ``Fraction`` values
(floats convert losslessly), so the shift keeps the budget exactly and
differences of nearby points do not cancel.

Weights decay like ``q^{i^2}`` and leave the float64 exponent range after a few
dozen indices, so x-coordinates are ``mpmath.mpf`` values (53-bit mantissa,
unbounded exponent).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .core_seq import L2, Coeffs, SpaceSpec, as_coeffs, lp_norm, to_mpf

mpf = mpmath.mpf

#: Hoelder-Lipschitz constant factor of the net retraction, times 20.
RETRACTION_FACTOR = 1520 * 20
W_TOL = 1e-12


class SolverError(RuntimeError):
    """No weights on the search grid satisfy the decay condition."""


@dataclass(frozen=True)
class RSchedule:
    """Decreasing null sequence ``r_n = base**n`` (so ``r_{n+k} = r_n r_k`` exactly).

    ``exponential(b)`` gives ``r_n = b^n``; ``holder(a)`` gives ``r_n = 20^{n/(a-1)}``.
    """

    base: float
    kind: str = "exponential"
    alpha: float | None = None

    def __post_init__(self):
        if not (0 < self.base < 1):
            raise ValueError("base must lie in (0, 1)")

    @classmethod
    def exponential(cls, b: float) -> "RSchedule":
        return cls(base=float(b))

    @classmethod
    def holder(cls, alpha: float) -> "RSchedule":
        if not (0 < alpha < 1):
            raise ValueError("alpha must lie in (0, 1)")
        return cls(base=20.0 ** (1.0 / (alpha - 1.0)), kind="holder", alpha=float(alpha))

    @property
    def log_base(self) -> mpmath.mpf:
        if self.kind == "holder":
            return mpmath.log(20) / (mpf(self.alpha) - 1)
        return mpmath.log(mpf(self.base))

    def r(self, n: int) -> mpmath.mpf:
        return mpmath.exp(n * self.log_base)

    def r_float(self, n: int) -> float:
        return float(self.r(n))

    @property
    def label(self) -> str:
        if self.kind == "holder":
            return f"holder(alpha={self.alpha:g})"
        return f"exponential(b={self.base:g})"


@dataclass(frozen=True)
class FlatWeights:
    """``alpha_i = 2^{-c_exp} * 2^{-q_exp i^2}`` with a stored decay certificate."""

    c_exp: int
    q_exp: int
    basis_constant: float = 1.0
    certificate: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def c(self) -> mpmath.mpf:
        return mpmath.ldexp(mpf(1), -self.c_exp)

    @property
    def q(self) -> mpmath.mpf:
        return mpmath.ldexp(mpf(1), -self.q_exp)

    def alpha(self, i: int) -> mpmath.mpf:
        return mpmath.ldexp(mpf(1), -self.c_exp - self.q_exp * i * i)

    def alphas(self, n: int) -> list:
        """``[alpha_1, ..., alpha_n]``."""
        return [self.alpha(i) for i in range(1, n + 1)]

    def tail_bound(self, n: int) -> mpmath.mpf:
        """Closed-form bound ``c q^{n^2} / (1 - q) >= sum_{i>=n} alpha_i``."""
        return self.alpha(n) / (1 - self.q)

    def ratio_sum(self, n: int) -> mpmath.mpf:
        """Exact ``sum_{i>=1} alpha_{i+n} / alpha_i = q^{n^2+2n} / (1 - q^{2n})``."""
        q = self.q
        return q ** (n * n + 2 * n) / (1 - q ** (2 * n))

    def total(self) -> mpmath.mpf:
        return self.tail_bound(1)


def decay_terms(w: FlatWeights, r: RSchedule, n: int):
    """Both sides of the weight condition at level ``n``.

    Returns ``(tail_term, ratio_term, strong_ratio_term, rhs)`` with
    ``tail_term = 3 sum_{i>=n} alpha_i`` (closed-form bound),
    ``ratio_term = 2K / (1520*20) * sum alpha_{i+n}/alpha_i``,
    ``strong_ratio_term = 2K * 1520*20 * sum alpha_{i+n}/alpha_i`` and
    ``rhs = min(1, r_{n+1})``.
    """
    rs = w.ratio_sum(n)
    k2 = 2 * mpf(w.basis_constant)
    return (3 * w.tail_bound(n), k2 / RETRACTION_FACTOR * rs, k2 * RETRACTION_FACTOR * rs,
            min(mpf(1), r.r(n + 1)))


def _monotone_from(r: RSchedule, q_exp: int) -> int:
    """Level past which every ratio ``term(n) / r_{n+1}`` decreases in ``n``.

    ``q^{n^2} / b^{n+1}`` shrinks by ``q^{2n+1} / b`` per step; the ratio-sum term
    shrinks at least by ``q^{2n+3} / b``.  Both factors are <= 1 once
    ``(2n+1) log q <= log b``.
    """
    log_q = -q_exp * math.log(2)
    ratio = float(r.log_base) / log_q
    return max(1, math.ceil((ratio - 1) / 2))


def check_weights(w: FlatWeights, r: RSchedule, strong: bool = True, scan_to: int = 50) -> dict:
    """Certify the decay condition for every ``n >= 1``: scan up to the monotone
    level (and at least ``scan_to``); past it the ratios only decrease."""
    n0 = max(_monotone_from(r, w.q_exp), scan_to)
    worst_tail = worst_ratio = worst_strong = mpf(0)
    for n in range(1, n0 + 1):
        tail, ratio, sratio, rhs = decay_terms(w, r, n)
        worst_tail = max(worst_tail, tail / rhs)
        worst_ratio = max(worst_ratio, ratio / rhs)
        worst_strong = max(worst_strong, sratio / rhs)
    ok = worst_tail <= 1 and worst_ratio <= 1 and (not strong or worst_strong <= 1)
    return {
        "ok": bool(ok),
        "scanned_to": n0,
        "monotone_from": _monotone_from(r, w.q_exp),
        "worst_tail_ratio": float(worst_tail),
        "worst_ratio_ratio": float(worst_ratio),
        "worst_strong_ratio": float(worst_strong),
        "strong": strong,
        "schedule": r.label,
        "c": f"2^-{w.c_exp}",
        "q": f"2^-{w.q_exp}",
    }


def solve_alphas(r: RSchedule, basis_constant: float = 1.0, strong: bool = True,
                 max_q_exp: int = 64, max_c_exp: int = 4096) -> FlatWeights:
    """Find ``alpha_i = 2^{-j} 2^{-k i^2}`` meeting the decay condition for all ``n``.

    The grid is scanned in increasing ``(k, j)``; the first certified pair wins,
    which gives the largest admissible weights.  The ratio-sum term does not
    depend on ``c``, so for each ``k`` the smallest admissible ``j`` is read off
    from the tail term directly.

    With ``strong=True`` the ratio sum must also satisfy
    ``2K * 1520*20 * sum_i alpha_{i+n}/alpha_i <= r_{n+1}``, which is what the
    iterate estimate ``2K sum_i alpha_{i+n}/alpha_i <= r_n`` actually consumes.
    """
    for k in range(1, max_q_exp + 1):
        probe = FlatWeights(0, k, basis_constant)
        n0 = max(_monotone_from(r, k), 50)
        ratio_ok = True
        c_max = mpf("inf")
        for n in range(1, n0 + 1):
            tail, ratio, sratio, rhs = decay_terms(probe, r, n)
            if ratio > rhs or (strong and sratio > rhs):
                ratio_ok = False
                break
            c_max = min(c_max, rhs / tail)
        if not ratio_ok:
            continue
        j = max(0, int(mpmath.ceil(-mpmath.log(c_max, 2))))
        while j <= max_c_exp:
            w = FlatWeights(j, k, basis_constant)
            cert = check_weights(w, r, strong)
            if cert["ok"]:
                return FlatWeights(j, k, basis_constant, cert)
            j += 1
    raise SolverError(f"no weights on the search grid satisfy the decay condition for {r.label}")


def check_weight_family(alphas_fn, r: RSchedule, n_max: int, basis_constant: float = 1.0,
                        terms: int = 400) -> list:
    """Brute-force evaluation of the decay condition for an arbitrary weight family.

    Series are summed directly with ``terms`` terms; used to reject families
    whose ratio sums diverge (e.g. geometric weights).
    """
    rows = []
    for n in range(1, n_max + 1):
        tail = 3 * mpmath.fsum(alphas_fn(i) for i in range(n, n + terms))
        ratio = 2 * mpf(basis_constant) / RETRACTION_FACTOR * mpmath.fsum(
            alphas_fn(i + n) / alphas_fn(i) for i in range(1, terms + 1))
        rhs = min(mpf(1), r.r(n + 1))
        rows.append((n, tail, ratio, rhs, bool(tail <= rhs and ratio <= rhs)))
    return rows


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, mpmath.mpf):
        man, exp = v.man_exp
        return Fraction(int(man)) * Fraction(2) ** int(exp)
    return Fraction(v)


def _mpf(v: Fraction) -> mpmath.mpf:
    return mpf(v.numerator) / v.denominator


@dataclass(frozen=True)
class WPoint:
    """Point ``t_0 w_0 + sum t_n w_n`` of the flat set; ``t >= 0`` and ``sum t <= mu``."""

    t: tuple
    mu: Fraction = Fraction(1)

    def __post_init__(self):
        t = tuple(_frac(v) for v in self.t) or (Fraction(0),)
        mu = _frac(self.mu)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "mu", mu)
        if not (0 < mu <= 1):
            raise ValueError("budget mu must lie in (0, 1]")
        if min(t) < 0:
            raise ValueError("w-coordinates must be nonnegative")
        if sum(t) > mu:
            raise ValueError(f"w-coordinates sum to {float(sum(t))} > mu = {float(mu)}")

    @property
    def N(self) -> int:
        return len(self.t) - 1

    def padded(self, length: int) -> list:
        return list(self.t) + [Fraction(0)] * max(0, length - len(self.t))

    def floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.t])

    @classmethod
    def unit(cls, n: int, mu=Fraction(1)) -> "WPoint":
        """``mu * w_n``."""
        t = [Fraction(0)] * (n + 1)
        t[n] = _frac(mu)
        return cls(tuple(t), mu)

    def combine(self, other: "WPoint", lam) -> "WPoint":
        lam = _frac(lam)
        n = max(len(self.t), len(other.t))
        return WPoint(tuple(lam * a + (1 - lam) * b
                            for a, b in zip(self.padded(n), other.padded(n))), self.mu)


@dataclass(frozen=True)
class FlatSetK:
    weights: FlatWeights
    mu: Fraction = Fraction(1)
    space: SpaceSpec = L2

    def w_vector(self, n: int, support: int = 40) -> Coeffs:
        """``w_n`` in x-coordinates; ``w_0`` is cut at ``support``."""
        return Coeffs(self.weights.alphas(support if n == 0 else n))

    def subspace_dims(self, n: int) -> int:
        """``E_n = span{w_0, ..., w_{n+1}}``."""
        return n + 2

    def contains(self, x: Coeffs, n_mat: int | None = None) -> bool:
        try:
            x_to_w(x, self.weights, self.mu, n_mat)
        except ValueError:
            return False
        return True


def _level_sums(t: Sequence[Fraction], length: int) -> list:
    """``s_k = t_0 + sum_{i>=k} t_i`` for ``k = 1..length``."""
    tail = [Fraction(0)] * (length + 1)
    body = list(t[1:]) + [Fraction(0)] * max(0, length - len(t) + 1)
    acc = Fraction(0)
    for k in range(len(body), 0, -1):
        acc += body[k - 1]
        if k <= length:
            tail[k] = acc
    return [t[0] + tail[k] for k in range(1, length + 1)]


def w_to_x(p: WPoint, w: FlatWeights, extra: int = 2) -> Coeffs:
    """x-coordinates of ``p`` on ``1..N+extra``.

    Coefficient ``k`` is ``(t_0 + sum_{i>=k} t_i) alpha_k``; the dropped tail is
    ``t_0 sum_{k>N+extra} alpha_k <= mu * w.tail_bound(N+extra+1)``.
    """
    s = _level_sums(p.t, p.N + extra)
    return Coeffs([_mpf(sk) * w.alpha(k + 1) for k, sk in enumerate(s)])


def materialization_tail(p: WPoint, w: FlatWeights, extra: int = 2) -> mpmath.mpf:
    return _mpf(p.mu) * w.tail_bound(p.N + extra + 1)


def w_star(x: Coeffs, n: int, w: FlatWeights) -> mpmath.mpf:
    """``x_n^*(x) / alpha_n - x_{n+1}^*(x) / alpha_{n+1}``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    v = as_coeffs(x).values

    def c(k):
        return to_mpf(v[k - 1]) if k <= len(v) else mpf(0)

    return c(n) / w.alpha(n) - c(n + 1) / w.alpha(n + 1)


def x_to_w(x: Coeffs, w: FlatWeights, mu=Fraction(1), n_mat: int | None = None,
           tol: float = 1e-9) -> WPoint:
    """Inverse of ``w_to_x`` by Abel resummation, or ``ValueError`` when ``x`` is outside K.

    With ``n_mat`` the coordinates are read as materialized on ``1..n_mat`` and
    ``t_0 = s_{n_mat}``; without it ``x`` is read as exactly finitely supported
    (``t_0 = 0``).  ``tol`` absorbs the rounding of mpf x-coordinates relative to ``mu``.
    """
    mu = _frac(mu)
    v = as_coeffs(x).values
    n = len(v) if n_mat is None else n_mat
    if len(v) > n:
        raise ValueError("x has support beyond the materialization bound")
    s = [_frac(to_mpf(v[k]) / w.alpha(k + 1)) if k < len(v) else Fraction(0) for k in range(n)]
    slack = Fraction(tol) * mu
    if s and (min(s) < -slack or s[0] > mu + slack
              or any(s[k + 1] > s[k] + slack for k in range(n - 1))):
        raise ValueError("coefficients are not a monotone decomposition inside K")
    # snap rounding noise onto the cone before differencing
    for k in range(n - 1, -1, -1):
        s[k] = max(s[k], Fraction(0), s[k + 1] if k + 1 < n else Fraction(0))
    t0 = Fraction(0) if n_mat is None or not s else s[-1]
    tail = [sk - t0 for sk in s] + [Fraction(0)]
    t = [t0] + [tail[k] - tail[k + 1] for k in range(n)]
    while len(t) > 1 and t[-1] == 0:
        t.pop()
    total = sum(t)
    if total > mu:
        t = [tk * mu / total for tk in t]
    return WPoint(tuple(t), mu)


def truncate_to_level(p: WPoint, n: int) -> WPoint:
    """Keep ``t_0..t_n`` and lump the remaining mass onto ``w_{n+1}``."""
    if n < 0:
        raise ValueError("level must be >= 0")
    if len(p.t) <= n + 1:
        return p
    return WPoint(p.t[: n + 1] + (sum(p.t[n + 1:], Fraction(0)),), p.mu)


def height_closed_form(K: FlatSetK, n: int) -> mpmath.mpf:
    """``3 mu sum_{k>=n+2} alpha_k`` via the closed-form tail bound."""
    return 3 * _mpf(K.mu) * K.weights.tail_bound(n + 2)


def x_distance(p: WPoint, q: WPoint, K: FlatSetK) -> mpmath.mpf:
    """``||x(p) - x(q)||`` from the exact w-coordinate difference.

    The common ``w_0`` tail beyond the support cancels unless ``t_0`` differs;
    that remainder is summed to the closed-form tail length ``extra`` terms past
    which it falls below ``2^-53`` relative.
    """
    n = max(len(p.t), len(q.t))
    d = [a - b for a, b in zip(p.padded(n), q.padded(n))]
    length = n + (12 if d[0] != 0 else 0)
    s = _level_sums(d, length)
    vals = [_mpf(sk) * K.weights.alpha(k + 1) for k, sk in enumerate(s) if sk != 0]
    if not vals:
        return mpf(0)
    return lp_norm(np.array(vals, dtype=object), K.space.p)


def height_upper_bound(K: FlatSetK, n: int, samples: Sequence[WPoint]) -> mpmath.mpf:
    """Largest sampled ``||x - y||`` with ``y`` the level-``n`` truncation of ``x``."""
    if n < 1:
        raise ValueError("level must be >= 1")
    best = mpf(0)
    for p in samples:
        best = max(best, x_distance(p, truncate_to_level(p, n), K))
    return best


def flat_shift(p: WPoint) -> WPoint:
    """``F(sum t_i w_i) = (mu - sum_{i>=1} t_i) w_1 + sum_{i>=1} t_i w_{i+1}``."""
    rest = p.t[1:]
    return WPoint((Fraction(0), p.mu - sum(rest, Fraction(0))) + tuple(rest), p.mu)


def flat_shift_power(p: WPoint, m: int) -> WPoint:
    for _ in range(m):
        p = flat_shift(p)
    return p


@dataclass
class GapReport:
    rows: list  # (m, lhs, middle, rhs)
    ok: bool
    min_margin: float


def iterate_gap_check(p: WPoint, q: WPoint, n: int, K: FlatSetK, r: RSchedule) -> GapReport:
    """Check ``||F^m x - F^m y|| <= 2K sum_k alpha_{k+m}/alpha_k ||x-y|| + r_m <= r_m(||x-y|| + 1)``
    for ``m = 1..n``.  Margins are relative to the right-hand side."""
    d0 = x_distance(p, q, K)
    k2 = 2 * mpf(K.weights.basis_constant)
    rows, ok, margin = [], True, math.inf
    fp, fq = p, q
    for m in range(1, n + 1):
        fp, fq = flat_shift(fp), flat_shift(fq)
        lhs = x_distance(fp, fq, K)
        rm = r.r(m)
        mid = k2 * K.weights.ratio_sum(m) * d0 + rm
        rhs = rm * (d0 + 1)
        good = lhs <= mid and mid <= rhs * (1 + mpf(2) ** -50)
        ok &= bool(good)
        margin = min(margin, float((rhs - lhs) / rhs))
        rows.append((m, lhs, mid, rhs))
    return GapReport(rows, ok, margin)


def witness_orbit(K: FlatSetK, n: int) -> list:
    """Rows ``(m, ||F^{m+1}(mu w_1) - F^m(mu w_1)||, mu alpha_{m+2})`` for ``m = 0..n-1``."""
    p = WPoint.unit(1, K.mu)
    out = []
    for m in range(n):
        nxt = flat_shift(p)
        out.append((m, x_distance(nxt, p, K), _mpf(K.mu) * K.weights.alpha(m + 2)))
        p = nxt
    return out
