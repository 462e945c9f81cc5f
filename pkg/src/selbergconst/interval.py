"""Closed intervals with binary64 endpoints and outward rounding.

Every operation returns an interval that contains the exact real image of
its inputs. Two rounding policies are available:

``"exact"``
    The direction of the floating-point error is determined exactly
    (error-free transforms or rational comparison) and an endpoint is moved
    by one ulp only when the rounded result lies on the wrong side.
``"nudge"``
    Every computed endpoint is moved one ulp outward unconditionally.

Both are sound; ``"exact"`` gives the narrower result. Select with
:func:`rounding`.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Union

from .errors import DomainError, UnknownIdError

_INF = math.inf
_MODE = "exact"
_SPLITTER = 134217729.0  # 2**27 + 1
_TINY = 2.0**-900
_HUGE = 2.0**900


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


@contextlib.contextmanager
def rounding(mode: str) -> Iterator[None]:
    """Temporarily switch the rounding policy (``"exact"`` or ``"nudge"``)."""
    global _MODE
    if mode not in ("exact", "nudge"):
        raise ValueError(f"unknown rounding mode {mode!r}")
    old, _MODE = _MODE, mode
    try:
        yield
    finally:
        _MODE = old


def rounding_mode() -> str:
    return _MODE


def _two_sum_err(a: float, b: float, s: float) -> float:
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _split(a: float) -> tuple[float, float]:
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod_err(a: float, b: float, p: float) -> float:
    ah, al = _split(a)
    bh, bl = _split(b)
    return al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def _sign_vs_exact(r: float, exact: Fraction) -> int:
    fr = Fraction(r)
    return (fr > exact) - (fr < exact)


def _round_pair(r: float, cmp: int) -> tuple[float, float]:
    """Lower and upper bound from a rounded result ``r``.

    ``cmp`` is the sign of ``r - exact``.
    """
    if _MODE == "nudge":
        return _down(r), _up(r)
    if cmp > 0:
        return _down(r), r
    if cmp < 0:
        return r, _up(r)
    return r, r


def _add_bounds(a: float, b: float) -> tuple[float, float]:
    s = a + b
    if math.isinf(s):
        if math.isinf(a) or math.isinf(b):
            return s, s
        return (math.nextafter(s, 0.0), s) if s > 0 else (s, math.nextafter(s, 0.0))
    err = _two_sum_err(a, b, s)
    return _round_pair(s, (err < 0) - (err > 0))


def _add_down(a: float, b: float) -> float:
    return _add_bounds(a, b)[0]


def _add_up(a: float, b: float) -> float:
    return _add_bounds(a, b)[1]


def _mul_bounds(a: float, b: float) -> tuple[float, float]:
    if a == 0.0 or b == 0.0:
        return 0.0, 0.0
    if math.isinf(a) or math.isinf(b):
        p = a * b
        return p, p
    p = a * b
    ap = abs(p)
    if _TINY < ap < _HUGE and _TINY < abs(a) < _HUGE and _TINY < abs(b) < _HUGE:
        err = _two_prod_err(a, b, p)
        cmp = (err < 0) - (err > 0)
    elif math.isinf(p):
        return (math.nextafter(p, 0.0), p) if p > 0 else (p, math.nextafter(p, 0.0))
    else:
        cmp = _sign_vs_exact(p, Fraction(a) * Fraction(b))
    return _round_pair(p, cmp)


def _div_bounds(a: float, b: float) -> tuple[float, float]:
    if a == 0.0:
        return 0.0, 0.0
    if math.isinf(a):
        q = a / b
        return q, q
    if math.isinf(b):
        return (0.0, 0.0)
    q = a / b
    if math.isinf(q):
        return (math.nextafter(q, 0.0), q) if q > 0 else (q, math.nextafter(q, 0.0))
    return _round_pair(q, _sign_vs_exact(q, Fraction(a) / Fraction(b)))


def _float_bounds(value: Union[int, Fraction]) -> tuple[float, float]:
    """Tightest binary64 bracket of an exact rational."""
    f = float(value)
    fr = Fraction(f)
    v = Fraction(value)
    if fr == v:
        return f, f
    if fr > v:
        return _down(f), f
    return f, _up(f)


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval ``[lo, hi]`` guaranteed to contain an exact real."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise DomainError("interval endpoint is NaN")
        if lo > hi:
            raise DomainError(f"empty interval [{lo!r}, {hi!r}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    # construction -----------------------------------------------------
    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @classmethod
    def exact(cls, value: Union[int, float, Fraction, str]) -> "Interval":
        """Enclose an exact number given as int, float, Fraction or decimal string."""
        if isinstance(value, float):
            return cls(value, value)
        if isinstance(value, str):
            value = Fraction(value)
        lo, hi = _float_bounds(value)
        return cls(lo, hi)

    @classmethod
    def coerce(cls, value: "IntervalLike") -> "Interval":
        if isinstance(value, Interval):
            return value
        if isinstance(value, (int, float, Fraction, str)) and not isinstance(value, bool):
            return cls.exact(value)
        if isinstance(value, Rational):
            return cls.exact(Fraction(value))
        raise TypeError(f"cannot convert {type(value).__name__} to Interval")

    # basic properties -------------------------------------------------
    @property
    def mid(self) -> float:
        return 0.5 * self.lo + 0.5 * self.hi

    @property
    def width(self) -> float:
        return iv_width(self)

    @property
    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def contains(self, value: Union[float, "Interval"]) -> bool:
        if isinstance(value, Interval):
            return self.lo <= value.lo and value.hi <= self.hi
        return self.lo <= value <= self.hi

    def intersects(self, other: "IntervalLike") -> bool:
        other = Interval.coerce(other)
        return self.lo <= other.hi and other.lo <= self.hi

    def intersection(self, other: "IntervalLike") -> "Interval":
        other = Interval.coerce(other)
        if not self.intersects(other):
            raise DomainError("intervals are disjoint")
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def hull(self, other: "IntervalLike") -> "Interval":
        return iv_hull(self, Interval.coerce(other))

    def is_positive(self) -> bool:
        return self.lo > 0

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi}

    @classmethod
    def from_json(cls, obj: dict) -> "Interval":
        return cls(float(obj["lo"]), float(obj["hi"]))

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __iter__(self):
        yield self.lo
        yield self.hi

    # arithmetic -------------------------------------------------------
    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __pos__(self) -> "Interval":
        return self

    def __add__(self, other):
        return iv_add(self, Interval.coerce(other))

    def __radd__(self, other):
        return iv_add(Interval.coerce(other), self)

    def __sub__(self, other):
        return iv_sub(self, Interval.coerce(other))

    def __rsub__(self, other):
        return iv_sub(Interval.coerce(other), self)

    def __mul__(self, other):
        return iv_mul(self, Interval.coerce(other))

    def __rmul__(self, other):
        return iv_mul(Interval.coerce(other), self)

    def __truediv__(self, other):
        return iv_div(self, Interval.coerce(other))

    def __rtruediv__(self, other):
        return iv_div(Interval.coerce(other), self)

    def __pow__(self, n):
        if isinstance(n, int) and not isinstance(n, bool):
            return iv_powi(self, n)
        return pow_real(self, n)

    def __abs__(self) -> "Interval":
        return iv_abs(self)

    def sqrt(self) -> "Interval":
        return iv_sqrt(self)

    def log(self) -> "Interval":
        return iv_log(self)

    def exp(self) -> "Interval":
        return iv_exp(self)


IntervalLike = Union[Interval, int, float, Fraction, str]


def iv(lo: float, hi: float | None = None) -> Interval:
    """Shorthand constructor; ``iv(x)`` is the point interval at ``x``."""
    return Interval(lo, lo if hi is None else hi)


def iv_add(x: Interval, y: Interval) -> Interval:
    return Interval(_add_down(x.lo, y.lo), _add_up(x.hi, y.hi))


def iv_sub(x: Interval, y: Interval) -> Interval:
    return Interval(_add_down(x.lo, -y.hi), _add_up(x.hi, -y.lo))


def iv_mul(x: Interval, y: Interval) -> Interval:
    los, his = [], []
    for a in (x.lo, x.hi):
        for b in (y.lo, y.hi):
            if (a == 0.0 and math.isinf(b)) or (b == 0.0 and math.isinf(a)):
                los.append(0.0)
                his.append(0.0)
                continue
            lo, hi = _mul_bounds(a, b)
            los.append(lo)
            his.append(hi)
    return Interval(min(los), max(his))


def iv_div(x: Interval, y: Interval) -> Interval:
    if y.lo <= 0.0 <= y.hi:
        raise DomainError(f"division by an interval containing zero: {y!r}")
    los, his = [], []
    for a in (x.lo, x.hi):
        for b in (y.lo, y.hi):
            lo, hi = _div_bounds(a, b)
            los.append(lo)
            his.append(hi)
    return Interval(min(los), max(his))


def iv_neg(x: Interval) -> Interval:
    return -x


def iv_abs(x: Interval) -> Interval:
    if x.lo >= 0:
        return x
    if x.hi <= 0:
        return -x
    return Interval(0.0, max(-x.lo, x.hi))


def iv_sqr(x: Interval) -> Interval:
    a = iv_abs(x)
    lo = _mul_bounds(a.lo, a.lo)[0]
    hi = _mul_bounds(a.hi, a.hi)[1]
    return Interval(max(lo, 0.0), hi)


def iv_powi(x: Interval, n: int) -> Interval:
    if n < 0:
        return iv_div(Interval(1.0, 1.0), iv_powi(x, -n))
    if n == 0:
        return Interval(1.0, 1.0)
    if n % 2 == 0:
        return iv_powi(iv_sqr(x), n // 2)
    if x.lo != x.hi:
        # odd powers are increasing
        return Interval(iv_powi(Interval(x.lo, x.lo), n).lo, iv_powi(Interval(x.hi, x.hi), n).hi)
    return iv_mul(x, iv_powi(iv_sqr(x), (n - 1) // 2))


def iv_hull(x: Interval, y: Interval) -> Interval:
    return Interval(min(x.lo, y.lo), max(x.hi, y.hi))


def iv_hull_all(items: Iterable[Interval]) -> Interval:
    items = list(items)
    return Interval(min(i.lo for i in items), max(i.hi for i in items))


def iv_contains(x: Interval, v: float) -> bool:
    return x.lo <= v <= x.hi


def iv_width(x: Interval) -> float:
    if x.lo == x.hi:
        return 0.0
    return _add_up(x.hi, -x.lo)


def iv_max(x: IntervalLike, y: IntervalLike) -> Interval:
    x, y = Interval.coerce(x), Interval.coerce(y)
    return Interval(max(x.lo, y.lo), max(x.hi, y.hi))


def iv_min(x: IntervalLike, y: IntervalLike) -> Interval:
    x, y = Interval.coerce(x), Interval.coerce(y)
    return Interval(min(x.lo, y.lo), min(x.hi, y.hi))


# elementary functions ---------------------------------------------------

def _widen(r: float) -> tuple[float, float]:
    return _down(r), _up(r)


def _sqrt_bounds(a: float) -> tuple[float, float]:
    r = math.sqrt(a)
    if _MODE == "nudge":
        return max(_down(r), 0.0), _up(r)
    fr = Fraction(r)
    sq, fa = fr * fr, Fraction(a)
    if sq == fa:
        return r, r
    if sq > fa:
        return _down(r), r
    return r, _up(r)


def iv_sqrt(x: Interval) -> Interval:
    if x.lo < 0:
        raise DomainError(f"sqrt of an interval with negative part: {x!r}")
    return Interval(_sqrt_bounds(x.lo)[0], _sqrt_bounds(x.hi)[1])


def _log_point(a: float) -> tuple[float, float]:
    if a == 1.0:
        return 0.0, 0.0
    if math.isinf(a):
        return _INF, _INF
    return _widen(math.log(a))


def iv_log(x: Interval) -> Interval:
    if x.lo <= 0:
        raise DomainError(f"log of an interval not contained in (0, inf): {x!r}")
    return Interval(_log_point(x.lo)[0], _log_point(x.hi)[1])


def _log1p_point(a: float) -> tuple[float, float]:
    if a == 0.0:
        return 0.0, 0.0
    return _widen(math.log1p(a))


def iv_log1p(x: Interval) -> Interval:
    if x.lo <= -1:
        raise DomainError(f"log1p of an interval reaching -1: {x!r}")
    return Interval(_log1p_point(x.lo)[0], _log1p_point(x.hi)[1])


def _exp_point(a: float) -> tuple[float, float]:
    if a == 0.0:
        return 1.0, 1.0
    if a == -_INF:
        return 0.0, 0.0
    if a > 709.7:
        raise DomainError(f"exp overflow at {a!r}")
    r = math.exp(a)
    return max(_down(r), 0.0), _up(r)


def iv_exp(x: Interval) -> Interval:
    return Interval(_exp_point(x.lo)[0], _exp_point(x.hi)[1])


def pow_real(x: IntervalLike, r: IntervalLike) -> Interval:
    """``x**r`` for positive ``x`` and a real exponent ``r``.

    Rational exponents 1/2 and integers take exact paths; everything else is
    ``exp(r * log x)`` in interval arithmetic.
    """
    x = Interval.coerce(x)
    if isinstance(r, int) and not isinstance(r, bool):
        return iv_powi(x, r)
    if isinstance(r, Fraction):
        if r.denominator == 1:
            return iv_powi(x, int(r))
        if r == Fraction(1, 2):
            return iv_sqrt(x)
        if r == Fraction(-1, 2):
            return 1 / iv_sqrt(x)
    rr = Interval.coerce(r)
    if x.lo <= 0:
        if x.lo == 0 and rr.lo > 0:
            upper = pow_real(Interval(x.hi, x.hi), rr) if x.hi > 0 else Interval(0.0, 0.0)
            return Interval(0.0, upper.hi)
        raise DomainError(f"real power of a non-positive interval: {x!r}")
    return iv_exp(rr * iv_log(x))


_ELEMENTARY = {
    "log": iv_log,
    "exp": iv_exp,
    "sqrt": iv_sqrt,
    "log1p": iv_log1p,
}


def iv_elementary(x: IntervalLike, fn: str, r: IntervalLike | None = None) -> Interval:
    """Apply ``fn`` in ``{"log", "exp", "sqrt", "log1p", "pow_real"}``."""
    x = Interval.coerce(x)
    if fn == "pow_real":
        if r is None:
            raise DomainError("pow_real needs an exponent")
        return pow_real(x, r)
    try:
        return _ELEMENTARY[fn](x)
    except KeyError:
        raise UnknownIdError(f"unknown elementary function {fn!r}") from None


# constants --------------------------------------------------------------

_DECIMALS = {
    "pi": "3.1415926535897932384626433832795028841971693993751",
    "e": "2.7182818284590452353602874713526624977572470937",
    "gamma": "0.5772156649015328606065120900824024310421",
    "log2": "0.69314718055994530941723212145817656807550013436025",
    "log3": "1.0986122886681096913952452369225257046474905578227",
    "log10": "2.3025850929940456840179914546843642076011014886288",
    "zeta3": "1.2020569031595942853997381615114499907649862923405",
    # 1 - 1/log(10^12)
    "theta": "0.9638087931747290143624059234236162431421335828497",
    "pi2": "9.8696044010893586188344909998761511353136994072408",
    "zeta2": "1.6449340668482264364724151666460251892189499012068",
    "six_over_pi2": "0.60792710185402662866327677925836583342615264803348",
}
_CACHE: dict[str, Interval] = {}


def const_catalog(name: str) -> Interval:
    """Enclosure of a registered fundamental constant."""
    if name in _CACHE:
        return _CACHE[name]
    if name not in _DECIMALS:
        raise UnknownIdError(f"unknown constant {name!r}")
    value = Interval.exact(_DECIMALS[name])
    _CACHE[name] = value
    return value


def registered_constants() -> list[str]:
    return sorted(_DECIMALS)


def log(x: IntervalLike) -> Interval:
    return iv_log(Interval.coerce(x))


def exp(x: IntervalLike) -> Interval:
    return iv_exp(Interval.coerce(x))


def sqrt(x: IntervalLike) -> Interval:
    return iv_sqrt(Interval.coerce(x))


def log1p(x: IntervalLike) -> Interval:
    return iv_log1p(Interval.coerce(x))


def isum(items: Iterable[IntervalLike]) -> Interval:
    """Sum of intervals with correctly rounded endpoint sums.

    Endpoint sums use ``math.fsum`` (exact then rounded once), followed by one
    outward ulp.
    """
    los, his = [], []
    for it in items:
        it = Interval.coerce(it)
        los.append(it.lo)
        his.append(it.hi)
    if not los:
        return Interval(0.0, 0.0)
    lo, hi = math.fsum(los), math.fsum(his)
    return Interval(_down(lo), _up(hi))
