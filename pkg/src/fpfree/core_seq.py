"""Finite-support sequence-space arithmetic.

Points of the sequence spaces are finitely supported coefficient vectors over
the canonical unit basis ``e_1, e_2, ...``.  Indices are 1-based in the public
API; ``Coeffs.values[k]`` stores the coefficient of ``e_{k+1}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np


@dataclass(frozen=True)
class SpaceSpec:
    """Norm selector plus the basis constants carried symbolically in bounds.

    ``p = math.inf`` selects the sup norm.  For the canonical unit bases used
    here both the basis constant and the domination constant equal 1.
    """

    p: float = 2.0
    basis_constant: float = 1.0
    domination: float = 1.0

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError(f"norm exponent must be >= 1, got {self.p}")
        if self.basis_constant < 1 or self.domination < 1:
            raise ValueError("basis and domination constants must be >= 1")

    @classmethod
    def lp(cls, p: float) -> "SpaceSpec":
        return cls(p=float(p))

    @classmethod
    def sup(cls) -> "SpaceSpec":
        return cls(p=math.inf)

    @property
    def is_sup(self) -> bool:
        return math.isinf(self.p)

    @property
    def name(self) -> str:
        if self.is_sup:
            return "sup"
        return f"l{self.p:g}"


L1 = SpaceSpec.lp(1)
L2 = SpaceSpec.lp(2)
SUP = SpaceSpec.sup()


def _is_exact(v) -> bool:
    return isinstance(v, (Fraction, mpmath.mpf))


class Coeffs:
    """Immutable finitely supported coefficient vector.

    The canonical form drops trailing zeros, so two vectors compare equal iff
    they have the same coefficients.  Storage is a read-only numpy array of
    ``float64``, or of ``object`` dtype when the entries are ``Fraction`` or
    ``mpmath.mpf`` (used where float64 would underflow).
    """

    __slots__ = ("_v",)

    def __init__(self, values: Iterable = ()):
        if isinstance(values, Coeffs):
            self._v = values._v
            return
        seq = list(values) if not isinstance(values, np.ndarray) else values
        if isinstance(seq, np.ndarray) and seq.dtype != object:
            arr = np.array(seq, dtype=float).ravel()
        elif any(_is_exact(v) for v in seq):
            arr = np.empty(len(seq), dtype=object)
            arr[:] = list(seq)
        else:
            arr = np.array(seq, dtype=float).ravel()
        nz = np.flatnonzero(arr != 0)
        arr = arr[: nz[-1] + 1] if nz.size else arr[:0]
        arr.flags.writeable = False
        self._v = arr

    # construction helpers
    @classmethod
    def from_entries(cls, entries: Iterable[tuple[int, float]]) -> "Coeffs":
        entries = list(entries)
        if not entries:
            return cls()
        idx = [i for i, _ in entries]
        if min(idx) < 1:
            raise ValueError("indices are 1-based")
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate index")
        exact = any(_is_exact(v) for _, v in entries)
        arr = np.zeros(max(idx), dtype=object if exact else float)
        for i, v in entries:
            arr[i - 1] = v
        return cls(arr)

    @classmethod
    def basis(cls, n: int) -> "Coeffs":
        if n < 1:
            raise ValueError("indices are 1-based")
        arr = np.zeros(n)
        arr[-1] = 1.0
        return cls(arr)

    @classmethod
    def ones(cls, n: int) -> "Coeffs":
        return cls(np.ones(n))

    # views
    @property
    def values(self) -> np.ndarray:
        return self._v

    @property
    def support_bound(self) -> int:
        """Largest index carrying a nonzero coefficient (0 for the null vector)."""
        return len(self._v)

    @property
    def is_exact(self) -> bool:
        return self._v.dtype == object

    def entries(self) -> list[tuple[int, float]]:
        return [(k + 1, self._v[k]) for k in np.flatnonzero(self._v != 0)]

    def dense(self, n: int | None = None) -> np.ndarray:
        """Coefficients 1..n as a writable array (zero padded)."""
        n = len(self._v) if n is None else n
        out = np.zeros(n, dtype=self._v.dtype)
        if self.is_exact:
            out[:] = 0
        m = min(n, len(self._v))
        out[:m] = self._v[:m]
        return out

    def to_float(self) -> "Coeffs":
        if not self.is_exact:
            return self
        return Coeffs(np.array([float(v) for v in self._v]))

    # arithmetic
    def _binary(self, other: "Coeffs", op) -> "Coeffs":
        other = other if isinstance(other, Coeffs) else Coeffs(other)
        n = max(len(self._v), len(other._v))
        return Coeffs(op(_pad(self._v, n), _pad(other._v, n)))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, scalar):
        return Coeffs(self._v * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Coeffs(self._v / scalar)

    def __neg__(self):
        return Coeffs(-self._v)

    def __eq__(self, other):
        if not isinstance(other, Coeffs):
            return NotImplemented
        return len(self._v) == len(other._v) and bool(np.all(self._v == other._v))

    def __hash__(self):
        return hash(tuple(self._v.tolist()))

    def __len__(self):
        return len(self._v)

    def __repr__(self):
        if len(self._v) > 8:
            head = ", ".join(f"{float(v):.6g}" for v in self._v[:6])
            return f"Coeffs([{head}, ...], N={len(self._v)})"
        return f"Coeffs({[float(v) if not self.is_exact else v for v in self._v]})"


def _pad(v: np.ndarray, n: int) -> np.ndarray:
    if len(v) == n:
        return v
    out = np.zeros(n, dtype=v.dtype)
    if v.dtype == object:
        out[:] = 0
    out[: len(v)] = v
    return out


def to_mpf(t) -> mpmath.mpf:
    if isinstance(t, Fraction):
        return mpmath.mpf(t.numerator) / t.denominator
    return mpmath.mpf(t)


def as_coeffs(x) -> Coeffs:
    return x if isinstance(x, Coeffs) else Coeffs(x)


def lp_norm(v: np.ndarray, p: float) -> float:
    """Norm of a dense coefficient array; exact dtypes are evaluated with mpmath."""
    if v.dtype == object:
        if len(v) == 0:
            return mpmath.mpf(0)
        vals = [abs(to_mpf(t)) for t in v]
        if math.isinf(p):
            return max(vals)
        if p == 1:
            return mpmath.fsum(vals)
        return mpmath.fsum(t**p for t in vals) ** (mpmath.mpf(1) / p)
    if len(v) == 0:
        return 0.0
    if math.isinf(p):
        return float(np.max(np.abs(v)))
    # fsum is correctly rounded, so zero padding (shifts) cannot move the result
    a = np.abs(v)
    m = float(a.max())
    if m == 0:
        return 0.0
    if p == 1:
        return math.fsum(a.tolist())
    return m * math.fsum(((a / m) ** p).tolist()) ** (1.0 / p)


def norm(x: Coeffs, s: SpaceSpec = L2) -> float:
    return lp_norm(as_coeffs(x).values, s.p)


def dist(x: Coeffs, y: Coeffs, s: SpaceSpec = L2) -> float:
    return norm(as_coeffs(x) - as_coeffs(y), s)


def coord(x: Coeffs, n: int) -> float:
    """The n-th coordinate functional (1-based); zero outside the support."""
    if n < 1:
        raise ValueError("indices are 1-based")
    v = as_coeffs(x).values
    return v[n - 1] if n <= len(v) else (0 if v.dtype == object else 0.0)


def shift_right(x: Coeffs) -> Coeffs:
    v = as_coeffs(x).values
    if len(v) == 0:
        return Coeffs()
    out = np.zeros(len(v) + 1, dtype=v.dtype)
    if v.dtype == object:
        out[0] = 0
    out[1:] = v
    return Coeffs(out)


def fundamental_function(n: int, s: SpaceSpec = L2) -> float:
    """Norm of e_1 + ... + e_n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if s.is_sup:
        return 1.0
    return float(n) ** (1.0 / s.p)


def flip_signs(x: Coeffs, signs: Sequence[int]) -> Coeffs:
    v = as_coeffs(x).values
    return Coeffs(v * np.asarray(signs[: len(v)]))
