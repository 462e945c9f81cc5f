"""Scalar interval helpers for numba kernels.

Hardware rounding modes are not reachable from numba, so each rounded
result ``c`` is pushed outward by ``|c| * 2**-51 + 2**-1074``. That is at
least one ulp of ``c`` plus the underflow quantum, which covers a
round-to-nearest error. Transcendental results from libm are pushed by
``|c| * 2**-50`` instead, leaving room for a few ulp of library error.

Intervals are passed around as ``(lo, hi)`` float pairs.
"""

import math

from numba import njit

_REL = 2.0**-51
_REL_FN = 2.0**-50
_ETA = 5e-324


@njit(inline="always")
def up(x):
    return x + (abs(x) * _REL + _ETA)


@njit(inline="always")
def down(x):
    return x - (abs(x) * _REL + _ETA)


@njit(inline="always")
def fn_up(x):
    return x + (abs(x) * _REL_FN + _ETA)


@njit(inline="always")
def fn_down(x):
    return x - (abs(x) * _REL_FN + _ETA)


@njit(inline="always")
def _sum_err(a, b, s):
    # TwoSum: a + b == s + err exactly (barring overflow)
    bb = s - a
    return (a - (s - bb)) + (b - bb)


@njit(inline="always")
def _sum_down(a, b):
    s = a + b
    if not math.isfinite(s):
        return down(s)
    return s if _sum_err(a, b, s) >= 0.0 else down(s)


@njit(inline="always")
def _sum_up(a, b):
    s = a + b
    if not math.isfinite(s):
        return up(s)
    return s if _sum_err(a, b, s) <= 0.0 else up(s)


@njit(inline="always")
def add(alo, ahi, blo, bhi):
    return _sum_down(alo, blo), _sum_up(ahi, bhi)


@njit(inline="always")
def sub(alo, ahi, blo, bhi):
    return _sum_down(alo, -bhi), _sum_up(ahi, -blo)


@njit(inline="always")
def mul(alo, ahi, blo, bhi):
    if (alo == 0.0 and ahi == 0.0) or (blo == 0.0 and bhi == 0.0):
        return 0.0, 0.0
    if alo == ahi and abs(alo) == 1.0:
        return (blo, bhi) if alo > 0 else (-bhi, -blo)
    if blo == bhi and abs(blo) == 1.0:
        return (alo, ahi) if blo > 0 else (-ahi, -alo)
    p1 = alo * blo
    p2 = alo * bhi
    p3 = ahi * blo
    p4 = ahi * bhi
    lo = min(min(p1, p2), min(p3, p4))
    hi = max(max(p1, p2), max(p3, p4))
    return down(lo), up(hi)


@njit(inline="always")
def mul_pos(alo, ahi, blo, bhi):
    """Product of two intervals with non-negative endpoints."""
    return down(alo * blo), up(ahi * bhi)


@njit(inline="always")
def scale(alo, ahi, c):
    """Multiply by an exactly known float ``c``."""
    if c >= 0:
        return down(alo * c), up(ahi * c)
    return down(ahi * c), up(alo * c)


@njit(inline="always")
def div_pos(alo, ahi, blo, bhi):
    """Quotient for ``b > 0``."""
    if alo >= 0:
        return down(alo / bhi), up(ahi / blo)
    if ahi <= 0:
        return down(alo / blo), up(ahi / bhi)
    return down(alo / blo), up(ahi / blo)


@njit(inline="always")
def sqr(alo, ahi):
    if alo >= 0:
        return max(down(alo * alo), 0.0), up(ahi * ahi)
    if ahi <= 0:
        return max(down(ahi * ahi), 0.0), up(alo * alo)
    m = max(-alo, ahi)
    return 0.0, up(m * m)


@njit(inline="always")
def log_pt(x):
    """Enclosure of ``log(x)`` for a float ``x > 0``."""
    if x == 1.0:
        return 0.0, 0.0
    r = math.log(x)
    return fn_down(r), fn_up(r)


@njit(inline="always")
def log_iv(lo, hi):
    a = log_pt(lo)[0]
    b = log_pt(hi)[1]
    return a, b


@njit(inline="always")
def log1p_pt(x):
    if x == 0.0:
        return 0.0, 0.0
    r = math.log1p(x)
    return fn_down(r), fn_up(r)


@njit(inline="always")
def exp_pt(x):
    if x == 0.0:
        return 1.0, 1.0
    r = math.exp(x)
    return max(fn_down(r), 0.0), fn_up(r)


@njit(inline="always")
def sqrt_pt(x):
    r = math.sqrt(x)
    return max(down(r), 0.0), up(r)


@njit(inline="always")
def recip_pt(x):
    """Enclosure of ``1/x`` for a float ``x != 0``."""
    r = 1.0 / x
    return down(r), up(r)
