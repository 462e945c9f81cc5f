"""Element-wise interval arrays on top of numpy.

IEEE basic operations and ``sqrt`` are correctly rounded in numpy, so a
single ``nextafter`` step outward is enough. numpy's ``log``/``exp`` family
may use SIMD code paths with a few ulp of error; those results are widened
by a relative ``2**-46`` instead.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .interval import Interval

_NEG = -np.inf
_POS = np.inf
_FN_REL = 2.0**-46
_TINY = 1e-300


def _dn(x):
    return np.nextafter(x, _NEG)


def _upw(x):
    return np.nextafter(x, _POS)


def _fn_widen(r):
    pad = np.abs(r) * _FN_REL + _TINY
    return r - pad, r + pad


class IArray:
    """Vector of intervals ``[lo[i], hi[i]]``."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        self.lo = np.asarray(lo, dtype=np.float64)
        self.hi = self.lo if hi is None else np.asarray(hi, dtype=np.float64)

    @classmethod
    def exact_ints(cls, values) -> "IArray":
        """Point intervals for integers below 2^53."""
        arr = np.asarray(values)
        if arr.size and int(np.max(np.abs(arr))) >= 2**53:
            raise DomainError("integers above 2^53 are not exact in binary64")
        f = arr.astype(np.float64)
        return cls(f, f)

    def __len__(self):
        return self.lo.shape[0]

    def __getitem__(self, idx):
        return IArray(self.lo[idx], self.hi[idx])

    def item(self, i: int) -> Interval:
        return Interval(float(self.lo[i]), float(self.hi[i]))

    @staticmethod
    def _parts(other):
        if isinstance(other, IArray):
            return other.lo, other.hi
        o = Interval.coerce(other)
        return o.lo, o.hi

    def __neg__(self):
        return IArray(-self.hi, -self.lo)

    def __add__(self, other):
        blo, bhi = self._parts(other)
        return IArray(_dn(self.lo + blo), _upw(self.hi + bhi))

    __radd__ = __add__

    def __sub__(self, other):
        blo, bhi = self._parts(other)
        return IArray(_dn(self.lo - bhi), _upw(self.hi - blo))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        blo, bhi = self._parts(other)
        p1, p2 = self.lo * blo, self.lo * bhi
        p3, p4 = self.hi * blo, self.hi * bhi
        lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
        hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
        return IArray(_dn(lo), _upw(hi))

    __rmul__ = __mul__

    def __truediv__(self, other):
        blo, bhi = self._parts(other)
        if np.any((np.asarray(blo) <= 0) & (np.asarray(bhi) >= 0)):
            raise DomainError("division by an interval containing zero")
        q1, q2 = self.lo / blo, self.lo / bhi
        q3, q4 = self.hi / blo, self.hi / bhi
        lo = np.minimum(np.minimum(q1, q2), np.minimum(q3, q4))
        hi = np.maximum(np.maximum(q1, q2), np.maximum(q3, q4))
        return IArray(_dn(lo), _upw(hi))

    def __rtruediv__(self, other):
        alo, ahi = self._parts(other)
        return IArray(np.broadcast_to(alo, self.lo.shape), np.broadcast_to(ahi, self.lo.shape)) / self

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise TypeError("IArray ** supports non-negative integers; use ipow for real powers")
        if n == 0:
            return IArray(np.ones_like(self.lo))
        base = self.abs() if n % 2 == 0 else self
        out = base
        for _ in range(n - 1):
            out = out * base
        return out

    def abs(self):
        lo = np.where(self.lo >= 0, self.lo, np.where(self.hi <= 0, -self.hi, 0.0))
        hi = np.maximum(np.abs(self.lo), np.abs(self.hi))
        return IArray(lo, hi)


def isqrt_arr(x: IArray) -> IArray:
    if np.any(x.lo < 0):
        raise DomainError("sqrt of a negative interval")
    return IArray(np.maximum(_dn(np.sqrt(x.lo)), 0.0), _upw(np.sqrt(x.hi)))


def ilog(x: IArray) -> IArray:
    if np.any(x.lo <= 0):
        raise DomainError("log of a non-positive interval")
    lo = _fn_widen(np.log(x.lo))[0]
    hi = _fn_widen(np.log(x.hi))[1]
    lo = np.where(x.lo == 1.0, 0.0, lo)
    hi = np.where(x.hi == 1.0, 0.0, hi)
    return IArray(lo, hi)


def ilog1p(x: IArray) -> IArray:
    if np.any(x.lo <= -1):
        raise DomainError("log1p of an interval reaching -1")
    lo = _fn_widen(np.log1p(x.lo))[0]
    hi = _fn_widen(np.log1p(x.hi))[1]
    lo = np.where(x.lo == 0.0, 0.0, lo)
    hi = np.where(x.hi == 0.0, 0.0, hi)
    return IArray(lo, hi)


def iexp(x: IArray) -> IArray:
    lo = np.maximum(_fn_widen(np.exp(x.lo))[0], 0.0)
    hi = _fn_widen(np.exp(x.hi))[1]
    return IArray(lo, hi)


def ipow(x: IArray, r) -> IArray:
    """``x**r`` for ``x > 0`` and a real exponent ``r`` (Interval or number)."""
    return iexp(ilog(x) * r)


def interval_sum(x: IArray) -> Interval:
    """Enclosure of the sum of all entries (fsum of each endpoint, then 1 ulp)."""
    if len(x) == 0:
        return Interval(0.0, 0.0)
    lo = math.fsum(x.lo.tolist())
    hi = math.fsum(x.hi.tolist())
    return Interval(math.nextafter(lo, -math.inf), math.nextafter(hi, math.inf))
