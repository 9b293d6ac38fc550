"""Cube retraction and the affine diagonal map on the cube of c_0.

``F(x)_n = t_n alpha_n + beta_n`` with ``beta_n = 1 - alpha_n``.  The offset has
infinite support, so every point is materialized on coordinates ``1..N``; the
ignored tail contributes ``sup_{n>N} beta_n`` to sup-norm quantities.

All coordinate arithmetic is dtype-generic: float arrays give float results,
``Fraction`` object arrays give exact results.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core_seq import Coeffs, as_coeffs
from .lin_map import NotInSetError

CUBE_TOL = 1e-12


@dataclass(frozen=True)
class AlphaSchedule:
    """Increasing weights ``alpha_n`` in (0, 1) tending to one.

    Either ``1 - ratio**n`` or an explicit finite list.
    """

    ratio: float | Fraction | None = Fraction(1, 2)
    explicit: tuple | None = None

    def __post_init__(self):
        if self.explicit is not None:
            a = list(self.explicit)
            if any(not (0 < v < 1) for v in a) or any(a[i] >= a[i + 1] for i in range(len(a) - 1)):
                raise ValueError("explicit alphas must increase strictly inside (0, 1)")
        elif not (0 < self.ratio < 1):
            raise ValueError("ratio must lie in (0, 1)")

    @classmethod
    def one_minus_geometric(cls, q=Fraction(1, 2)) -> "AlphaSchedule":
        return cls(ratio=q)

    @classmethod
    def from_list(cls, values: Sequence) -> "AlphaSchedule":
        return cls(ratio=None, explicit=tuple(values))

    def alpha(self, n: int):
        if self.explicit is not None:
            return self.explicit[n - 1]
        return 1 - self.ratio**n

    def alphas(self, N: int, exact: bool = False) -> np.ndarray:
        if self.explicit is not None and N > len(self.explicit):
            raise ValueError(f"only {len(self.explicit)} explicit alphas available")
        vals = [self.alpha(n) for n in range(1, N + 1)]
        if exact:
            out = np.empty(N, dtype=object)
            out[:] = [Fraction(v) for v in vals]
            return out
        return np.array([float(v) for v in vals])

    def tail_beta(self, N: int) -> float:
        """``sup_{n > N} beta_n``: the sup-norm size of the unmaterialized offset."""
        if self.explicit is not None:
            return 0.0
        return float(self.ratio) ** (N + 1)


def in_cube(x: Coeffs, tol: float = CUBE_TOL) -> bool:
    v = as_coeffs(x).values
    return bool(np.all(v >= -tol) and np.all(v <= 1 + tol))


def q_retract(x: Coeffs) -> Coeffs:
    """Coordinatewise ``min(1, |t_n|)``: a 1-Lipschitz sup-norm retraction onto the cube."""
    v = as_coeffs(x).values
    return Coeffs(np.minimum(1.0, np.abs(v)))


def _dense(x, N: int, exact: bool) -> np.ndarray:
    v = as_coeffs(x).values if not isinstance(x, np.ndarray) else x
    if len(v) > N:
        raise ValueError(f"point has support {len(v)} beyond materialized bound {N}")
    if exact:
        out = np.empty(N, dtype=object)
        out[:] = [Fraction(0)] * N
        out[: len(v)] = [Fraction(t) for t in v]
        return out
    out = np.zeros(N)
    out[: len(v)] = np.asarray(v, dtype=float)
    return out


def affine_step(t: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    return t * alphas + (1 - alphas)


def affine_power_array(t: np.ndarray, alphas: np.ndarray, m: int) -> np.ndarray:
    am = alphas**m
    return t * am + (1 - am)


def affine_f(x: Coeffs, a: AlphaSchedule, N: int, exact: bool = False) -> Coeffs:
    """One application of the affine map on coordinates ``1..N``."""
    if not in_cube(x):
        raise NotInSetError("affine map is defined on the cube only")
    t = _dense(x, N, exact)
    return Coeffs(affine_step(t, a.alphas(N, exact)))


def affine_f_power(x: Coeffs, a: AlphaSchedule, m: int, N: int, exact: bool = False) -> Coeffs:
    """Closed form ``F^m(x)_n = t_n alpha_n^m + (1 - alpha_n^m)``; ``m = 0`` is the identity."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if not in_cube(x):
        raise NotInSetError("affine map is defined on the cube only")
    if m == 0:
        return as_coeffs(x)
    t = _dense(x, N, exact)
    return Coeffs(affine_power_array(t, a.alphas(N, exact), m))


def uniform_ar_bound(a: AlphaSchedule, m: int, exact: bool = False):
    """``2 sup_n alpha_n^m (1 - alpha_n)``.

    ``s -> s^m (1 - s)`` increases up to ``m / (m + 1)`` and decreases after, so
    for an increasing schedule the scan can stop at the first ``n`` past that
    point: every later term is no larger.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    peak = Fraction(m, m + 1)
    best = 0
    n = 1
    while True:
        if a.explicit is not None and n > len(a.explicit):
            break
        al = a.alpha(n)
        al = Fraction(al) if exact else float(al)
        best = max(best, al**m * (1 - al))
        if al >= peak:
            break
        n += 1
    return 2 * best


def simplex_shift(x: Coeffs, tol: float = 1e-12) -> Coeffs:
    """Right shift on the l1 probability simplex: an isometry with no fixed point."""
    v = as_coeffs(x).values
    if np.any(v < -tol) or abs(float(np.sum(v)) - 1.0) > tol:
        raise NotInSetError("point is not in the l1 simplex")
    out = np.zeros(len(v) + 1, dtype=v.dtype)
    out[1:] = v
    return Coeffs(out)


def positive_part(x: Coeffs) -> Coeffs:
    v = as_coeffs(x).values
    return Coeffs(np.maximum(v, 0.0))
