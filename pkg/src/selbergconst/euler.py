"""Validated Euler products and prime sums with explicit tail bounds.

A catalog entry describes either ``∏_p (1 + t(p))`` or ``Σ_p t(p)``. The
finite part over ``p <= P0`` is summed in interval arithmetic (products
through ``Σ log1p t``). The remainder is bounded with a registered majorant
``|t(p)| <= C p^-β`` (optionally times ``log p``) and explicit Chebyshev-type
bounds on π(x) and θ(x):

    Σ_{p>N} p^-β        <= -π(N) N^-β + 1.25506 β N^(1-β) / ((β-1) log N)
    Σ_{p>N} log p p^-β  <= -θ(N) N^-β + 1.01624 β N^(1-β) / (β-1)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from ._vecint import IArray, ilog, ilog1p, interval_sum, ipow, isqrt_arr
from .errors import DomainError, RegistrationError, UnknownIdError
from .interval import (Interval, const_catalog, iv_exp, iv_log, iv_log1p, iv_max, iv_sqrt,
                       pow_real)
from .primes import prime_counts, prime_factors, primes_up_to, sieve_segment

DEFAULT_CUTOFF = 10**7
MIN_CUTOFF = 10**4
SPOT_WINDOW = 10**4
PI_CONST = Fraction("1.25506")
THETA_CONST = Fraction("1.01624")

Number = Union[Interval, IArray]


class _ScalarOps:
    sqrt = staticmethod(iv_sqrt)
    log = staticmethod(iv_log)

    @staticmethod
    def pow(x, r):
        return pow_real(x, r)


class _ArrayOps:
    sqrt = staticmethod(isqrt_arr)
    log = staticmethod(ilog)

    @staticmethod
    def pow(x, r):
        return ipow(x, Interval.coerce(r))


SCALAR = _ScalarOps()
ARRAY = _ArrayOps()


def theta() -> Interval:
    return const_catalog("theta")


# local terms --------------------------------------------------------------

def a_factor(p: Number, K=SCALAR) -> Number:
    """A_p = 1 + (p-2)/(p^{3/2} - p - √p + 2)."""
    s = K.sqrt(p)
    return 1 + (p - 2) / (p * s - p - s + 2)


def _t_i_prod(p, K):
    return 1 / (p * (p - 1))


def _t_twin_inverse(p, K):
    return -1 / ((p - 1) * (p - 1))


def _t_parity(p, K):
    return 1 / (p * (p - 2))


def _t_inv_phi_sq(p, K):
    return 1 / ((p - 1) * (p - 1))


def _t_sum_half(p, K):
    return 2 / (p * (K.sqrt(p) - 1))


def _t_sumvar1log(p, K):
    return (a_factor(p, K) - 1) / p


def _t_ss2log(p, K):
    th = theta()
    pt = K.pow(p, th)
    return (2 * K.pow(p, 1 - th) - K.pow(p, 1 - 2 * th) - 1) / (K.pow(p, 2 - 2 * th) * (pt - 1) ** 2)


def _t_ss1log_2(p, K):
    th = theta()
    return 1 / (K.pow(p, 2 - 2 * th) * (K.pow(p, th) - 1) ** 2)


def _t_ss1log_3(p, K):
    th = theta()
    return 1 / (K.pow(p, Interval.exact(Fraction(3, 2)) - 2 * th) * (K.pow(p, th) - 1) ** 2)


def _t_err_sumvarp(p, K):
    return (2 * p - 1) / ((K.sqrt(p) - 1) * (p - 1) ** 2)


def _t_err_parity(p, K):
    return 2 / ((K.sqrt(p) - 1) * (p - 2))


def _t_err_ss2log(p, K):
    pt = K.pow(p, theta())
    return (2 * pt - 1) / ((K.sqrt(p) - 1) * (pt - 1) ** 2)


def _t_delta_sumvar1log(p, K):
    a = a_factor(p, K)
    c = K.pow(p, Fraction(1, 3))
    return (p * (a - 1) + a * c + 1) / ((p - 1) * c * c)


def _t_delta_sum_half(p, K):
    s = K.sqrt(p)
    c = K.pow(p, Fraction(1, 3))
    return (2 * s + c - 1) / (c * c * (s - 1) ** 2)


def _t_delta_sq_half(p, K):
    s = K.sqrt(p)
    return (K.pow(p, Fraction(1, 6)) + 1) / (K.pow(p, Fraction(5, 6)) * (s - 1))


def _t_delta_alpha_half(p, K):
    # (1 - p^{-3/2})(1 + 1/((√p-1)(p+1))) = 1 + 1/(p(p+1))
    return 1 / (p * (p + 1))


def _t_delta_alpha_theta(p, K):
    # (1 - p^{-1-θ})(1 + 1/((p^θ-1)(p+1))) - 1
    pt = K.pow(p, theta())
    return (p - pt) / (p * pt * (pt - 1) * (p + 1))


def _s_mertens(p, K):
    return K.log(p) / (p * (p - 1))


def _s_sum2(p, K):
    return 2 * K.log(p) / (p * p - 1)


def _s_sumvar1log(p, K):
    a = a_factor(p, K)
    return K.log(p) * (p - 1 - (p - 2) * a) / ((a + p - 1) * (p - 1))


def _s_sum_half(p, K):
    s = K.sqrt(p)
    return -((2 * s - 3) * K.log(p)) / ((p - 2 * s + 2) * (p - 1))


def _s_sq_half(p, K):
    s = K.sqrt(p)
    return -((s - 2) * K.log(p)) / ((p - s + 1) * (p - 1))


def _s_ss2log(p, K):
    th = theta()
    num = 2 * K.pow(p, 1 - th) - K.pow(p, 1 - 2 * th) - 2
    den = (K.pow(p, 1 - 2 * th) * (K.pow(p, th) - 1) ** 2 + 1) * (p - 1)
    return -(K.log(p) * num) / den


# catalog ----------------------------------------------------------------

@dataclass(frozen=True)
class ProductSpec:
    """A prime product ``∏(1 + t(p))`` or prime sum ``Σ t(p)``.

    For ``p > P0`` the registered majorant ``|t(p)| <= C p^-β`` holds, with an
    extra ``log p`` factor when ``log_weight`` is set. ``sign_mode`` is the
    sign of ``t(p)`` beyond the cutoff: ``"nonnegative"``, ``"nonpositive"``
    or ``"signed"``. A ``zeta_factor`` ``s0`` means the value is
    ``ζ(s0) * ∏(1 + t(p))``.
    """

    id: str
    kind: str
    term: Callable
    beta: Fraction
    C: Fraction
    sign_mode: str = "nonnegative"
    log_weight: bool = False
    min_prime: int = 2
    zeta_factor: Fraction | str | None = None
    description: str = ""
    sharper: tuple[int, Fraction] | None = None

    def constant(self, cutoff: int) -> Fraction:
        """Majorant constant valid for p > cutoff (``sharper`` applies from its threshold on)."""
        if self.sharper is not None and cutoff >= self.sharper[0]:
            return self.sharper[1]
        return self.C

    def local_term(self, p) -> Interval:
        return self.term(Interval.exact(int(p)), SCALAR)


@dataclass(frozen=True)
class TailBound:
    """Finite part, remainder enclosure and total.

    For products ``tail`` is the multiplicative factor contributed by
    ``p > cutoff`` (it includes 1); for sums it is the additive remainder.
    """

    id: str
    cutoff: int
    partial: Interval
    tail: Interval
    total: Interval
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"id": self.id, "lo": self.total.lo, "hi": self.total.hi, "cutoff": self.cutoff,
                "tail_width": self.tail.width}


_F = Fraction
CATALOG: dict[str, ProductSpec] = {}


def register(spec: ProductSpec) -> ProductSpec:
    if spec.beta <= 1:
        raise RegistrationError(f"{spec.id}: tail exponent must exceed 1")
    CATALOG[spec.id] = spec
    return spec


for _spec in [
    ProductSpec("I_prod", "product", _t_i_prod, _F(2), _F("1.001"),
                description="prod (1 + 1/(p(p-1)))"),
    ProductSpec("twin_inverse", "product", _t_twin_inverse, _F(2), _F("1.001"), "nonpositive",
                min_prime=3, description="prod_{p>2} (1 - 1/(p-1)^2)"),
    ProductSpec("H_parity", "product", _t_parity, _F(2), _F("1.001"), min_prime=3,
                description="prod_{p>2} (1 + 1/(p(p-2)))"),
    ProductSpec("T_inv_phi_sq", "product", _t_inv_phi_sq, _F(2), _F("1.001"),
                description="prod (1 + 1/(p-1)^2) = sum mu^2(l)/phi(l)^2"),
    ProductSpec("D_sum_half", "product", _t_sum_half, _F(3, 2), _F("2.021"), sharper=(10**7, _F("2.001")),
                description="prod (1 + 2/(p(sqrt p - 1)))"),
    ProductSpec("G_sumvar1log", "product", _t_sumvar1log, _F(3, 2), _F("1.011"), sharper=(10**7, _F("1.001")),
                description="prod (1 + (A_p - 1)/p)"),
    ProductSpec("J_ss2log", "product", _t_ss2log, _F("1.96"), _F(2),
                description="prod (1 + (2p^(1-t) - p^(1-2t) - 1)/(p^(2-2t)(p^t-1)^2)), t = theta"),
    ProductSpec("ss1log_prod2", "product", _t_ss1log_2, _F("1.96"), _F("1.01"),
                description="prod (1 + 1/(p^(2-2t)(p^t-1)^2))"),
    ProductSpec("ss1log_prod3", "product", _t_ss1log_3, _F(3, 2), _F("1.001"),
                description="prod (1 + 1/(p^(3/2-2t)(p^t-1)^2))"),
    ProductSpec("err_sumvarp", "product", _t_err_sumvarp, _F(3, 2), _F("2.021"), sharper=(10**7, _F("2.001")),
                description="prod (1 + (2p-1)/((sqrt p - 1)(p-1)^2))"),
    ProductSpec("err_parity", "product", _t_err_parity, _F(3, 2), _F("2.021"), sharper=(10**7, _F("2.001")), min_prime=3,
                description="prod_{p>2} (1 + 2/((sqrt p - 1)(p-2)))"),
    ProductSpec("err_ss2log", "product", _t_err_ss2log, _F("1.46"), _F(2),
                description="prod (1 + (2p^t - 1)/((sqrt p - 1)(p^t - 1)^2))"),
    ProductSpec("delta_sumvar1log", "product", _t_delta_sumvar1log, _F(7, 6), _F("1.24"), sharper=(10**7, _F("1.1")),
                description="prod (1 + (p(A_p-1) + A_p p^(1/3) + 1)/((p-1)p^(2/3)))"),
    ProductSpec("delta_sum_half", "product", _t_delta_sum_half, _F(7, 6), _F("2.26"), sharper=(10**7, _F("2.2")),
                description="prod (1 + (2 sqrt p + p^(1/3) - 1)/(p^(2/3)(sqrt p - 1)^2))"),
    ProductSpec("delta_sq_half", "product", _t_delta_sq_half, _F(7, 6), _F("1.24"), sharper=(10**7, _F("1.1")),
                description="prod (1 + (p^(1/6) + 1)/(p^(5/6)(sqrt p - 1)))"),
    ProductSpec("Delta_alpha_half", "product", _t_delta_alpha_half, _F(2), _F("1.001"),
                zeta_factor=_F(3, 2), description="prod (1 + 1/((sqrt p - 1)(p+1)))"),
    ProductSpec("Delta_alpha_theta", "product", _t_delta_alpha_theta, _F("2.9"), _F("1.01"),
                zeta_factor="1+theta", description="prod (1 + 1/((p^t - 1)(p+1)))"),
    ProductSpec("mertens_log_sum", "sum", _s_mertens, _F(2), _F("1.001"), log_weight=True,
                description="sum log p/(p(p-1))"),
    ProductSpec("sum2", "sum", _s_sum2, _F(2), _F("2.001"), log_weight=True,
                description="sum 2 log p/(p^2-1)"),
    ProductSpec("sumvar1log_sum", "sum", _s_sumvar1log, _F(3, 2), _F("1.01"), "nonpositive",
                log_weight=True,
                description="sum log p (p-1-(p-2)A_p)/((A_p+p-1)(p-1))"),
    ProductSpec("sum_half_sum", "sum", _s_sum_half, _F(3, 2), _F("2.011"), "nonpositive", sharper=(10**7, _F("2.01")),
                log_weight=True, description="-sum (2 sqrt p - 3) log p/((p - 2 sqrt p + 2)(p-1))"),
    ProductSpec("sq_half_sum", "sum", _s_sq_half, _F(3, 2), _F("1.01"), "nonpositive",
                log_weight=True, description="-sum (sqrt p - 2) log p/((p - sqrt p + 1)(p-1))"),
    ProductSpec("ss2log_sum", "sum", _s_ss2log, _F("1.96"), _F(2), "nonpositive", log_weight=True,
                description="-sum log p (2p^(1-t) - p^(1-2t) - 2)/((p^(1-2t)(p^t-1)^2 + 1)(p-1))"),
]:
    register(_spec)


# zeta -------------------------------------------------------------------

_ZETA_N = 64
_ZETA_MIN = math.nextafter(1.01, 0.0)  # admits the enclosure of 101/100


def _zeta_at(s: Interval, N: int) -> Interval:
    """Euler-Maclaurin with two Bernoulli corrections at a point interval s."""
    acc = Interval(0.0, 0.0)
    for n in range(1, N):
        acc = acc + (pow_real(n, -s) if n > 1 else Interval(1.0, 1.0))
    Ns = pow_real(N, -s)
    n_ = Interval.exact(N)
    acc = acc + n_ * Ns / (s - 1) + Ns / 2 + s * Ns / (12 * n_)
    s3 = s * (s + 1) * (s + 2)
    acc = acc - s3 * Ns / (720 * n_ ** 3)
    # remainder is bounded by the first omitted correction term
    r = s3 * (s + 3) * (s + 4) * Ns / (30240 * n_ ** 5)
    return acc + Interval(-r.hi, r.hi)


def zeta_point(s, N: int = _ZETA_N) -> Interval:
    """Enclosure of ζ(s) for real ``s >= 1.01`` (an interval or a number)."""
    s = Interval.coerce(s)
    if s.lo < _ZETA_MIN:
        # the partial-sum tail ~ N^(1-s)/(s-1) reaches 10^-10 only for log10 N ~ 10/(s-1)
        digits = 10.0 / max(s.lo - 1.0, 1e-300)
        raise DomainError(f"zeta_point needs s >= 1.01; s = {s.lo!r} would need N ~ 10^{digits:.3g}")
    if s.lo == s.hi:
        return _zeta_at(s, N)
    # ζ is decreasing on (1, inf)
    return Interval(_zeta_at(Interval(s.hi, s.hi), N).lo, _zeta_at(Interval(s.lo, s.lo), N).hi)


# evaluation -------------------------------------------------------------

@lru_cache(maxsize=4)
def _prime_data(cutoff: int):
    primes = primes_up_to(cutoff)
    pi_n, theta_n = prime_counts(cutoff, primes)
    return primes, pi_n, theta_n


def prime_tail(beta, N: int, log_weight: bool = False) -> Interval:
    """Upper bound (as ``[0, hi]``) on Σ_{p>N} p^-β, or Σ log p p^-β."""
    b = Interval.coerce(beta)
    if b.lo <= 1:
        raise DomainError("tail exponent must exceed 1")
    _, pi_n, theta_n = _prime_data(N) if N <= 4 * 10**8 else (None, None, None)
    n = Interval.exact(N)
    nb = pow_real(n, -b)
    if log_weight:
        main = Interval.exact(THETA_CONST) * b * n * nb / (b - 1)
        sub = theta_n * nb
    else:
        main = Interval.exact(PI_CONST) * b * n * nb / ((b - 1) * iv_log(n))
        sub = Interval.exact(pi_n) * nb
    return Interval(0.0, max((main - sub).hi, 0.0))


def _majorant(spec: ProductSpec, p: IArray, cutoff: int) -> IArray:
    m = spec.constant(cutoff) * ipow(p, -Interval.coerce(spec.beta))
    if spec.log_weight:
        m = m * ilog(p)
    return m


def spot_check(spec: ProductSpec, cutoff: int, window: int = SPOT_WINDOW) -> int:
    """Check the majorant and sign mode on primes in (cutoff, cutoff + window].

    Returns the number of primes checked.
    """
    table = sieve_segment(cutoff + 1, cutoff + window + 1, max(window, 1 << 22))
    ps = table.n[table.prime]
    if len(ps) == 0:
        return 0
    p = IArray.exact_ints(ps)
    t = spec.term(p, ARRAY)
    m = _majorant(spec, p, cutoff)
    bad = np.nonzero(t.abs().hi > m.lo)[0]
    if len(bad):
        raise RegistrationError(f"{spec.id}: majorant fails at p = {int(ps[bad[0]])}")
    if spec.sign_mode == "nonnegative":
        bad = np.nonzero(t.lo < 0)[0]
    elif spec.sign_mode == "nonpositive":
        bad = np.nonzero(t.hi > 0)[0]
    else:
        bad = np.array([], dtype=np.int64)
    if len(bad):
        raise RegistrationError(f"{spec.id}: sign mode {spec.sign_mode} fails at p = {int(ps[bad[0]])}")
    return len(ps)


def _zeta_value(spec: ProductSpec) -> Interval:
    if spec.zeta_factor == "1+theta":
        return zeta_point(1 + theta())
    return zeta_point(Interval.exact(spec.zeta_factor))


def eval_catalog(id: str, cutoff: int | None = None, check: bool = True) -> TailBound:
    """Validated enclosure of a catalog entry with primes up to ``cutoff``."""
    try:
        spec = CATALOG[id]
    except KeyError:
        raise UnknownIdError(f"unknown catalog id {id!r}") from None
    cutoff = DEFAULT_CUTOFF if cutoff is None else int(cutoff)
    if cutoff < MIN_CUTOFF:
        raise DomainError(f"cutoff must be at least {MIN_CUTOFF}")
    if check:
        spot_check(spec, cutoff)
    primes, _, _ = _prime_data(cutoff)
    primes = primes[primes >= spec.min_prime]
    t = spec.term(IArray.exact_ints(primes), ARRAY)
    C = Interval.exact(spec.constant(cutoff))
    bound = C * prime_tail(spec.beta, cutoff, spec.log_weight)
    r = bound.hi
    if spec.kind == "sum":
        partial = interval_sum(t)
        if spec.sign_mode == "nonnegative":
            tail = Interval(0.0, r)
        elif spec.sign_mode == "nonpositive":
            tail = Interval(-r, 0.0)
        else:
            tail = Interval(-r, r)
        total = partial + tail
    else:
        if np.any(t.lo <= -1):
            raise DomainError(f"{id}: local factor not positive")
        log_partial = interval_sum(ilog1p(t))
        # |t(p)| <= u0 for p > cutoff; log(1 - u) >= -u/(1 - u0)
        u0 = (C * pow_real(Interval.exact(cutoff), -Interval.coerce(spec.beta))).hi
        neg = -(Interval(r, r) / (1 - Interval(u0, u0))).hi
        if spec.sign_mode == "nonnegative":
            log_tail = Interval(0.0, r)
        elif spec.sign_mode == "nonpositive":
            log_tail = Interval(neg, 0.0)
        else:
            log_tail = Interval(neg, r)
        partial = iv_exp(log_partial)
        tail = iv_exp(log_tail)
        total = iv_exp(log_partial + log_tail)
        if spec.zeta_factor is not None:
            z = _zeta_value(spec)
            partial = partial * z
            total = total * z
    return TailBound(id, cutoff, partial, tail, total, {"primes": int(len(primes))})


def zeta_ratio_three_halves() -> Interval:
    """ζ(3/2)/ζ(3)."""
    return zeta_point(Fraction(3, 2)) / zeta_point(3)


# finite q-local factors -------------------------------------------------

def _p_alpha(alpha):
    def f(p, K):
        x = K.pow(p, 1 - Interval.coerce(alpha)) if not isinstance(alpha, Fraction) else K.pow(p, 1 - alpha)
        return 1 + x / (p + 1 - x)
    return f


LOCAL_FACTORS: dict[str, Callable] = {
    "p_alpha_half": _p_alpha(Fraction(1, 2)),
    "p_alpha_theta": lambda p, K: _p_alpha(theta())(p, K),
    "A_q": a_factor,
}


def local_factor_product(id: str, q: int) -> Interval:
    """∏_{p | q} of a local factor; catalog products use ``1 + t(p)``."""
    if q < 1:
        raise DomainError("q must be positive")
    if id in LOCAL_FACTORS:
        fn = LOCAL_FACTORS[id]
    elif id in CATALOG and CATALOG[id].kind == "product":
        term = CATALOG[id].term
        fn = lambda p, K: 1 + term(p, K)  # noqa: E731
    else:
        raise UnknownIdError(f"unknown local factor {id!r}")
    out = Interval(1.0, 1.0)
    for p in (prime_factors(q) if q > 1 else []):
        out = out * fn(Interval.exact(p), SCALAR)
    return out


# helper constants used by the assembly ------------------------------------

def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def delta_input(a, d) -> Interval:
    """Δ-type input constant used by the error terms of the product lemmas.

    ``a = 1, 0 < d <= 1`` gives ``max(γ, 1/(d e^{γd+1}))``. The other
    supported cases need ``ζ(a)`` with ``a > 1``.
    """
    a, d = _frac(a), _frac(d)
    gamma = const_catalog("gamma")
    one = Interval(1.0, 1.0)
    if a == 1:
        if 0 < d <= 1:
            D = Interval.exact(d)
            return iv_max(gamma, 1 / (D * iv_exp(gamma * D + 1)))
        raise DomainError(f"delta_input(1, {d}) needs 0 < d <= 1")
    if a > 1:
        A = Interval.exact(a)
        if d + 1 == a:
            z = zeta_point(A)
            return iv_max(iv_max(one, 1 / abs(A - 1)), z - 1 / (A - 1))
        if 0 < d < a < d + 1:
            z = zeta_point(A)
            D = Interval.exact(d)
            l1 = (D - A + 1) / abs(z) / abs(A - 1)
            inner = pow_real(l1, D - A + 1) / pow_real(D, D)
            return iv_max(iv_max(one, pow_real(inner, 1 / (A - 1))), z - 1 / (A - 1))
        if d == a:
            return one
    raise DomainError(f"delta_input has no case for (a, d) = ({a}, {d})")


def error_E(a, v: int) -> Interval:
    """Error constant for ``Σ μ²(ℓ)/φ(ℓ)``-type remainders with exponent a, v in {1, 2}."""
    if v not in (1, 2):
        raise DomainError("error_E is defined for v in {1, 2}")
    a = _frac(a)
    A = Interval.exact(a)
    pi2 = const_catalog("pi2")
    za, z2a = zeta_point(A), zeta_point(2 * A)
    half = A - Fraction(1, 2)
    ratio = abs(A - 1) / half
    if v == 1:
        e1 = Interval.exact(Fraction("0.43")) * (1 + ratio)
        e2 = abs(za / z2a - 6 / ((A - 1) ** 2 * pi2))
        e3 = ratio * pow_real(3 * z2a / (half * pi2 * abs(za * (A - 1))), 2 / (A - 1))
    else:
        two_a = pow_real(2, A)
        c = (iv_sqrt(Interval.exact(2)) - 1) / iv_sqrt(Interval.exact(2))
        e1 = Interval.exact(Fraction("0.12")) * (1 + ratio)
        e2 = c * abs(two_a / (two_a + 1) * za / z2a - Fraction(2, 3) * 6 / ((A - 1) ** 2 * pi2))
        e3 = c * ratio * pow_real(3 * (two_a + 1) * z2a
                                  / (half * pow_real(2, A - 1) * 3 * pi2 * abs(za * (A - 1))),
                                  2 / (A - 1))
    return iv_max(iv_max(e1, e2), e3)
