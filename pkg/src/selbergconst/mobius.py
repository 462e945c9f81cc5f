"""Möbius averages and squarefree-weighted sums.

The m-family (all sums over ``n <= X`` with ``(n, q) = 1``):

    m_q(X)    = Σ μ(n)/n
    m̌_q(X)   = Σ μ(n)/n    log(X/n)
    m̌̌_q(X)  = Σ μ(n)/n    log²(X/n)
    m̃_q(X)   = Σ μ(n)/κ(n) log(X/n)
    m̃̃_q(X)  = Σ μ(n)/κ(n) log²(X/n)

Weighted sums run over squarefree ``ℓ`` with a positive multiplicative
weight, built segment by segment with a multiplicative sieve. The scanner
bounds ``sup normalizer(X) * sum(X)`` over a range, using the fact that the
underlying sums only jump at integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from numba import njit

from . import _fastiv as fi
from .errors import DomainError, ResourceError, UnknownIdError
from .euler import eval_catalog
from .interval import Interval, const_catalog, iv_hull
from .primes import DEFAULT_SEGMENT, base_primes, prime_factors, sieve_segment

DEFAULT_CAP = 10**8
SCAN_CAP = 10**6
BLOCK = 1 << 16

M_KINDS = {
    "m": (0, 0),
    "m_check": (0, 1),
    "m_checkcheck": (0, 2),
    "m_tilde": (1, 1),
    "m_tildetilde": (1, 2),
}


# m-family -----------------------------------------------------------------

@njit(cache=True)
def _log_ratio(xlo, xhi, n):
    """Enclosure of log(x/n) for x in [xlo, xhi]."""
    a = 1.0 if xlo == n else fi.down(xlo / n)
    b = 1.0 if xhi == n else fi.up(xhi / n)
    if a <= 0.0:
        a = 5e-324
    return fi.log_pt(a)[0], fi.log_pt(b)[1]


@njit(cache=True)
def _mobius_kernel(mu, kappa, lo, nmax, xlo, xhi, qprimes, use_kappa, k):
    tlo = 0.0
    thi = 0.0
    blo = 0.0
    bhi = 0.0
    cnt = 0
    for i in range(mu.shape[0]):
        n = lo + i
        if n > nmax:
            break
        m = mu[i]
        if m == 0:
            continue
        ok = True
        for p in qprimes:
            if n % p == 0:
                ok = False
                break
        if not ok:
            continue
        den = float(kappa[i]) if use_kappa else float(n)
        wlo, whi = fi.recip_pt(den)
        if k >= 1:
            llo, lhi = _log_ratio(xlo, xhi, float(n))
            if k == 2:
                llo, lhi = fi.sqr(llo, lhi)
            wlo, whi = fi.mul(wlo, whi, llo, lhi)
        if m < 0:
            wlo, whi = -whi, -wlo
        blo, bhi = fi.add(blo, bhi, wlo, whi)
        cnt += 1
        if cnt == 65536:
            tlo, thi = fi.add(tlo, thi, blo, bhi)
            blo = 0.0
            bhi = 0.0
            cnt = 0
    return fi.add(tlo, thi, blo, bhi)


def _as_interval(X) -> Interval:
    X = Interval.coerce(X)
    if X.lo <= 0:
        raise DomainError("X must be positive")
    return X


def _q_primes(q: int) -> np.ndarray:
    if q < 1:
        raise DomainError("q must be a positive integer")
    return np.array(prime_factors(q) if q > 1 else [], dtype=np.int64)


def _mobius_sum(X: Interval, nmax: int, q: int, use_kappa: bool, k: int,
                segment_size: int) -> Interval:
    qp = _q_primes(q)
    total = Interval(0.0, 0.0)
    a = 1
    while a <= nmax:
        b = min(nmax + 1, a + segment_size)
        t = sieve_segment(a, b, segment_size)
        lo, hi = _mobius_kernel(t.mu, t.kappa, a, nmax, X.lo, X.hi, qp, use_kappa, k)
        total = total + Interval(lo, hi)
        a = b
    return total


def m_family(kind: str, X, q: int = 1, cap: int = DEFAULT_CAP,
             segment_size: int = DEFAULT_SEGMENT) -> Interval:
    """Enclosure of one of m, m_check, m_checkcheck, m_tilde, m_tildetilde at X."""
    try:
        use_kappa, k = M_KINDS[kind]
    except KeyError:
        raise UnknownIdError(f"unknown m-family member {kind!r}") from None
    X = _as_interval(X)
    if X.hi > cap:
        raise ResourceError(f"X = {X.hi:g} exceeds the cutoff {cap:g}")
    n_lo, n_hi = math.floor(X.lo), math.floor(X.hi)
    if n_hi < 1:
        return Interval(0.0, 0.0)
    out = _mobius_sum(X, n_hi, q, bool(use_kappa), k, segment_size)
    if n_lo != n_hi:
        # X straddles an integer: either membership is possible
        out = iv_hull(out, _mobius_sum(X, max(n_lo, 0), q, bool(use_kappa), k, segment_size)
                      if n_lo >= 1 else Interval(0.0, 0.0))
    return out


# multiplicative weights -------------------------------------------------

WEIGHTS = {
    "inv": 0,                 # 1/ℓ
    "inv_phi": 1,             # 1/φ(ℓ)
    "A_over_phi": 2,          # A_ℓ/φ(ℓ)
    "A_over_l": 3,            # A_ℓ/ℓ
    "sq_half": 4,             # 1/(√ℓ φ_{1/2}(ℓ))
    "inv_phi_sq": 5,          # 1/φ(ℓ)²
    "l2_over_phi2": 6,        # ℓ²/φ(ℓ)²
    "nu_over_l": 7,           # ν(ℓ)/ℓ with ν(2) = 1, ν(p) = p/(p-2)
    "inv_phi_half_sq": 8,     # 1/φ_{1/2}(ℓ)²
    "l_over_phi_half_sq": 9,  # ℓ/φ_{1/2}(ℓ)²
    "theta_weight": 10,       # ℓ^{2θ-2}/φ_θ(ℓ)²
    "inv_kappa": 11,          # 1/κ(ℓ)
    "inv_l_kappa": 12,        # 1/(ℓ κ(ℓ))
    "phi_over_l2": 13,        # φ(ℓ)/ℓ²
}


@njit(cache=True)
def _a_factor(p):
    s = fi.sqrt_pt(p)
    # p^{3/2} - p - √p + 2 = (p - 1)(√p - 1) + 1
    plo, phi_ = fi.sub(p, p, 1.0, 1.0)
    slo, shi = fi.sub(s[0], s[1], 1.0, 1.0)
    dlo, dhi = fi.mul_pos(plo, phi_, slo, shi)
    dlo, dhi = fi.add(dlo, dhi, 1.0, 1.0)
    nlo, nhi = fi.sub(p, p, 2.0, 2.0)
    qlo, qhi = fi.div_pos(nlo, nhi, dlo, dhi)
    return fi.add(qlo, qhi, 1.0, 1.0)


@njit(cache=True)
def _local_weight(code, p, th_lo, th_hi):
    """Interval value of the weight's local factor at a prime p (given as float)."""
    if code == 0:
        return fi.recip_pt(p)
    if code == 1:
        return fi.recip_pt(p - 1.0)
    if code == 2 or code == 3:
        alo, ahi = _a_factor(p)
        d = p - 1.0 if code == 2 else p
        return fi.div_pos(alo, ahi, d, d)
    if code == 4 or code == 8 or code == 9:
        slo, shi = fi.sqrt_pt(p)
        mlo, mhi = fi.sub(slo, shi, 1.0, 1.0)
        if code == 4:
            dlo, dhi = fi.mul_pos(slo, shi, mlo, mhi)
            return fi.div_pos(1.0, 1.0, dlo, dhi)
        dlo, dhi = fi.sqr(mlo, mhi)
        if code == 8:
            return fi.div_pos(1.0, 1.0, dlo, dhi)
        return fi.div_pos(p, p, dlo, dhi)
    if code == 5:
        d = (p - 1.0) * (p - 1.0)
        return fi.div_pos(1.0, 1.0, d, d)
    if code == 6:
        d = (p - 1.0) * (p - 1.0)
        n = p * p
        return fi.div_pos(n, n, d, d)
    if code == 7:
        if p == 2.0:
            return 0.5, 0.5
        return fi.recip_pt(p - 2.0)
    if code == 10:
        lp = fi.log_pt(p)
        # p^θ and p^{2θ-2}
        elo, ehi = fi.mul_pos(lp[0], lp[1], th_lo, th_hi)
        ptlo = fi.exp_pt(elo)[0]
        pthi = fi.exp_pt(ehi)[1]
        e2lo, e2hi = fi.sub(2.0 * th_lo, 2.0 * th_hi, 2.0, 2.0)
        e2lo, e2hi = fi.mul(e2lo, e2hi, lp[0], lp[1])
        nlo = fi.exp_pt(e2lo)[0]
        nhi = fi.exp_pt(e2hi)[1]
        mlo, mhi = fi.sub(ptlo, pthi, 1.0, 1.0)
        dlo, dhi = fi.sqr(mlo, mhi)
        return fi.div_pos(nlo, nhi, dlo, dhi)
    if code == 11:
        return fi.recip_pt(p + 1.0)
    if code == 12:
        return fi.recip_pt(p * (p + 1.0))
    if code == 13:
        return fi.div_pos(p - 1.0, p - 1.0, p * p, p * p)
    return 0.0, 0.0


@njit(cache=True)
def _weights_segment(lo, hi, base, code, th_lo, th_hi, qprimes):
    size = hi - lo
    wlo = np.ones(size)
    whi = np.ones(size)
    rem = np.empty(size, dtype=np.int64)
    for i in range(size):
        rem[i] = lo + i
    for q in qprimes:
        start = ((lo + q - 1) // q) * q
        for m in range(start, hi, q):
            wlo[m - lo] = 0.0
            whi[m - lo] = 0.0
    for p in base:
        if p * p >= hi:
            break
        flo, fhi = _local_weight(code, float(p), th_lo, th_hi)
        start = ((lo + p - 1) // p) * p
        pp = p * p
        for m in range(start, hi, p):
            i = m - lo
            if whi[i] == 0.0:
                continue
            if m % pp == 0:
                wlo[i] = 0.0
                whi[i] = 0.0
                continue
            wlo[i], whi[i] = fi.mul_pos(wlo[i], whi[i], flo, fhi)
            rem[i] //= p
    for i in range(size):
        r = rem[i]
        if r > 1 and whi[i] != 0.0:
            flo, fhi = _local_weight(code, float(r), th_lo, th_hi)
            wlo[i], whi[i] = fi.mul_pos(wlo[i], whi[i], flo, fhi)
    return wlo, whi


def weight_segment(lo: int, hi: int, weight: str, q: int = 1):
    """Interval weights on ``lo <= ℓ < hi`` (zero off squarefree or non-coprime ℓ)."""
    th = const_catalog("theta")
    return _weights_segment(lo, hi, base_primes(hi), WEIGHTS[weight], th.lo, th.hi, _q_primes(q))


@njit(cache=True)
def _weighted_kernel(wlo, whi, lo, nmax, xlo, xhi, k):
    tlo = 0.0
    thi = 0.0
    blo = 0.0
    bhi = 0.0
    cnt = 0
    for i in range(wlo.shape[0]):
        n = lo + i
        if n > nmax:
            break
        if whi[i] == 0.0:
            continue
        a, b = wlo[i], whi[i]
        if k >= 1:
            llo, lhi = _log_ratio(xlo, xhi, float(n))
            if k == 2:
                llo, lhi = fi.sqr(llo, lhi)
            a, b = fi.mul(a, b, llo, lhi)
        blo, bhi = fi.add(blo, bhi, a, b)
        cnt += 1
        if cnt == 65536:
            tlo, thi = fi.add(tlo, thi, blo, bhi)
            blo = 0.0
            bhi = 0.0
            cnt = 0
    return fi.add(tlo, thi, blo, bhi)


@dataclass(frozen=True)
class WeightedSumSpec:
    """A normalized sum ``normalizer(X) * Σ_{ℓ<=X} μ²(ℓ) w(ℓ) log^k(X/ℓ)``.

    ``normalizer`` is one of ``"one"``, ``"inv_log"``, ``"inv_log2"``,
    ``"inv_X"``, ``"X"``, ``"inv_sqrt"`` or ``"tail_times_X"``; the last
    means ``X * (Σ_all - Σ_{ℓ<=X})``.
    """

    id: str
    weight: str
    log_power: int = 0
    normalizer: str = "one"
    description: str = ""


SPECS: dict[str, WeightedSumSpec] = {s.id: s for s in [
    WeightedSumSpec("sq_half", "sq_half", 1, "inv_log2",
                    "log^-2 X sum 1/(sqrt(l) phi_1/2(l)) log(X/l)"),
    WeightedSumSpec("sumvar1log", "A_over_phi", 1, "inv_log2",
                    "log^-2 X sum A_l/phi(l) log(X/l)"),
    WeightedSumSpec("sumvar1log_l", "A_over_l", 1, "inv_log2",
                    "log^-2 X sum A_l/l log(X/l)"),
    WeightedSumSpec("sumvarp", "inv_phi_sq", 0, "tail_times_X",
                    "X sum_{l>X} 1/phi(l)^2"),
    WeightedSumSpec("Ss1", "l2_over_phi2", 0, "inv_X", "X^-1 sum l^2/phi(l)^2"),
    WeightedSumSpec("sum_half_threshold", "inv_phi_half_sq", 0, "inv_log",
                    "log^-1 X sum 1/phi_1/2(l)^2"),
    WeightedSumSpec("sum2_half_threshold", "l_over_phi_half_sq", 0, "inv_X",
                    "X^-1 sum l/phi_1/2(l)^2"),
    WeightedSumSpec("inv", "inv"),
    WeightedSumSpec("inv_phi", "inv_phi"),
    WeightedSumSpec("nu_over_l", "nu_over_l"),
    WeightedSumSpec("theta_weight", "theta_weight"),
]}


def get_spec(spec) -> WeightedSumSpec:
    if isinstance(spec, WeightedSumSpec):
        return spec
    if spec in SPECS:
        return SPECS[spec]
    if spec in WEIGHTS:
        return WeightedSumSpec(spec, spec)
    raise UnknownIdError(f"unknown weighted-sum spec {spec!r}")


def _raw_weighted(weight: str, X: Interval, nmax: int, q: int, k: int,
                  segment_size: int) -> Interval:
    total = Interval(0.0, 0.0)
    a = 1
    while a <= nmax:
        b = min(nmax + 1, a + segment_size)
        wlo, whi = weight_segment(a, b, weight, q)
        lo, hi = _weighted_kernel(wlo, whi, a, nmax, X.lo, X.hi, k)
        total = total + Interval(lo, hi)
        a = b
    return total


def weighted_sum(spec, X, q: int = 1, k: int | None = None, inner_log_arg=None,
                 cap: int = DEFAULT_CAP, segment_size: int = DEFAULT_SEGMENT) -> Interval:
    """Σ_{ℓ<=X, (ℓ,q)=1} μ²(ℓ) w(ℓ) log^k(arg/ℓ), without normalization.

    ``arg`` defaults to X; ``k`` defaults to the spec's log power.
    """
    spec = get_spec(spec)
    k = spec.log_power if k is None else k
    X = _as_interval(X)
    if X.hi > cap:
        raise ResourceError(f"X = {X.hi:g} exceeds the cutoff {cap:g}")
    arg = X if inner_log_arg is None else _as_interval(inner_log_arg)
    n_lo, n_hi = math.floor(X.lo), math.floor(X.hi)
    if n_hi < 1:
        return Interval(0.0, 0.0)
    out = _raw_weighted(spec.weight, arg, n_hi, q, k, segment_size)
    if n_lo != n_hi:
        other = (_raw_weighted(spec.weight, arg, n_lo, q, k, segment_size)
                 if n_lo >= 1 else Interval(0.0, 0.0))
        out = iv_hull(out, other)
    return out


def full_sum(spec, q: int = 1) -> Interval:
    """Σ over all squarefree ℓ coprime to q, for the specs that converge."""
    spec = get_spec(spec)
    if spec.weight != "inv_phi_sq":
        raise UnknownIdError(f"no closed form registered for the full sum of {spec.id!r}")
    T = eval_catalog("T_inv_phi_sq").total
    for p in (prime_factors(q) if q > 1 else []):
        T = T / (1 + Interval(1.0, 1.0) / ((p - 1) ** 2))
    return T


def normalized_value(spec, X, q: int = 1) -> Interval:
    """normalizer(X) * sum(X) at a single X."""
    spec = get_spec(spec)
    X = _as_interval(X)
    s = weighted_sum(spec, X, q)
    return _normalize(spec, s, X, q)


def _normalize(spec: WeightedSumSpec, s: Interval, X: Interval, q: int) -> Interval:
    from .interval import iv_log, iv_sqrt
    kind = spec.normalizer
    if kind == "one":
        return s
    if kind == "inv_log":
        return s / iv_log(X)
    if kind == "inv_log2":
        return s / iv_log(X) ** 2
    if kind == "inv_X":
        return s / X
    if kind == "X":
        return s * X
    if kind == "inv_sqrt":
        return s / iv_sqrt(X)
    if kind == "tail_times_X":
        return X * (full_sum(spec, q) - s)
    raise UnknownIdError(kind)


# scanner ------------------------------------------------------------------

@njit(cache=True)
def _scan_kernel(wlo, whi, lo, x_lo, x_hi, mode, state, T_hi):
    """Advance running sums over one segment and return the best upper bound.

    ``state`` = [A_base_lo, A_base_hi, A_run_lo, A_run_hi, B_base_lo, B_base_hi,
    B_run_lo, B_run_hi, count]. A = Σ w, B = Σ w log ℓ.
    mode 0: (A u - B)/u², u = log X; 1: A/log X; 2: A/X; 3: X (T - A).
    """
    best = -np.inf
    for i in range(wlo.shape[0]):
        n = lo + i
        if whi[i] != 0.0:
            state[2], state[3] = fi.add(state[2], state[3], wlo[i], whi[i])
            if mode == 0:
                llo, lhi = fi.log_pt(float(n))
                tlo, thi = fi.mul_pos(wlo[i], whi[i], llo, lhi)
                state[6], state[7] = fi.add(state[6], state[7], tlo, thi)
            state[8] += 1.0
            if state[8] >= 65536.0:
                state[0], state[1] = fi.add(state[0], state[1], state[2], state[3])
                state[4], state[5] = fi.add(state[4], state[5], state[6], state[7])
                state[2] = 0.0
                state[3] = 0.0
                state[6] = 0.0
                state[7] = 0.0
                state[8] = 0.0
        # constancy interval [a, b] with sums fixed
        a = max(float(n), x_lo)
        b = min(float(n + 1), x_hi)
        if a > b or b < x_lo or a > x_hi:
            continue
        Alo, Ahi = fi.add(state[0], state[1], state[2], state[3])
        if mode == 0:
            Blo, Bhi = fi.add(state[4], state[5], state[6], state[7])
            ua = fi.log_pt(a)
            ub = fi.log_pt(b)
            # g(u) = A/u - B/u², evaluated as upper bounds
            v = fi.up(fi.up(Ahi / ua[0]) - fi.down(Blo / fi.up(ua[1] * ua[1])))
            best = max(best, v)
            v = fi.up(fi.up(Ahi / ub[0]) - fi.down(Blo / fi.up(ub[1] * ub[1])))
            best = max(best, v)
            if Blo > 0.0:
                # stationary point u* = 2B/A may fall inside [ua, ub]
                us_lo = fi.down(2.0 * Blo / Ahi)
                us_hi = fi.up(2.0 * Bhi / Alo) if Alo > 0.0 else np.inf
                if us_hi >= ua[0] and us_lo <= ub[1]:
                    v = fi.up(fi.up(Ahi * Ahi) / fi.down(4.0 * Blo))
                    best = max(best, v)
        elif mode == 1:
            ua = fi.log_pt(a)
            if ua[0] > 0.0:
                best = max(best, fi.up(Ahi / ua[0]))
        elif mode == 2:
            best = max(best, fi.up(Ahi / a))
        else:
            best = max(best, fi.up(b * fi.up(T_hi - Alo)))
    return best


_MODES = {"inv_log2": 0, "inv_log": 1, "inv_X": 2, "tail_times_X": 3}
# below this X the scan runs in 30-digit interval arithmetic: small-X maxima
# can sit within a few ulp of the reference constants
REFINE_LIMIT = 2000
_MP_DPS = 30


def _mp_local_weight(code: int, p: int):
    iv = mpmath.iv
    P = iv.mpf(p)
    if code == 0:
        return 1 / P
    if code == 1:
        return 1 / (P - 1)
    if code in (2, 3):
        s = iv.sqrt(P)
        a = 1 + (P - 2) / ((P - 1) * (s - 1) + 1)
        return a / (P - 1 if code == 2 else P)
    if code in (4, 8, 9):
        s = iv.sqrt(P)
        if code == 4:
            return 1 / (s * (s - 1))
        return (1 if code == 8 else P) / (s - 1) ** 2
    if code == 5:
        return 1 / (P - 1) ** 2
    if code == 6:
        return P**2 / (P - 1) ** 2
    if code == 7:
        return iv.mpf(0.5) if p == 2 else 1 / (P - 2)
    if code == 10:
        th = const_catalog("theta")
        t = iv.mpf([th.lo, th.hi])
        pt = iv.exp(t * iv.log(P))
        return iv.exp((2 * t - 2) * iv.log(P)) / (pt - 1) ** 2
    if code == 11:
        return 1 / (P + 1)
    if code == 12:
        return 1 / (P * (P + 1))
    if code == 13:
        return (P - 1) / P**2
    raise UnknownIdError(code)


def _mp_prefix_scan(code, q, end, x_lo, x_hi, mode, T_hi):
    """Scan n <= end at high precision; returns the bound and float enclosures of A, B."""
    iv = mpmath.iv
    saved = iv.dps
    iv.dps = _MP_DPS
    try:
        best, A, B = _mp_prefix_loop(code, q, end, x_lo, x_hi, mode, T_hi)
    finally:
        iv.dps = saved
    return best, _to_float_pair(A), _to_float_pair(B)


def _to_float_pair(x):
    return (math.nextafter(float(mpmath.mpf(x.a)), -math.inf),
            math.nextafter(float(mpmath.mpf(x.b)), math.inf))


def _mp_prefix_loop(code, q, end, x_lo, x_hi, mode, T_hi):
    iv = mpmath.iv
    qp = set(prime_factors(q)) if q > 1 else set()
    local: dict[int, object] = {}
    A = iv.mpf(0)
    B = iv.mpf(0)
    best = -math.inf
    for n in range(1, end + 1):
        ps = prime_factors(n) if n > 1 else []
        sqfree = math.prod(ps) == n
        if sqfree and not qp.intersection(ps):
            w = iv.mpf(1)
            for p in ps:
                if p not in local:
                    local[p] = _mp_local_weight(code, p)
                w *= local[p]
            A += w
            if mode == 0:
                B += w * iv.log(n)
        a = max(float(n), x_lo)
        b = min(float(n + 1), x_hi)
        if a > b:
            continue
        if mode == 0:
            cands = [iv.log(iv.mpf(a)), iv.log(iv.mpf(b))]
            vals = [A / u - B / u**2 for u in cands if u.a > 0]
            if B.a > 0:
                us = 2 * B / A
                if us.b >= cands[0].a and us.a <= cands[1].b:
                    vals.append(A**2 / (4 * B))
        elif mode == 1:
            u = iv.log(iv.mpf(a))
            vals = [A / u] if u.a > 0 else []
        elif mode == 2:
            vals = [A / iv.mpf(a)]
        else:
            vals = [iv.mpf(b) * (iv.mpf(T_hi) - A)]
        for v in vals:
            best = max(best, math.nextafter(float(mpmath.mpf(v.b)), math.inf))
    return best, A, B


def threshold_scan(spec, q: int, X_lo: float, X_hi: float, cap: float = SCAN_CAP,
                   segment_size: int = DEFAULT_SEGMENT) -> Interval:
    """Validated upper bound on sup_{X in [X_lo, X_hi]} normalizer(X) * sum(X).

    The result is ``[v, v]`` style: its upper endpoint is the certified bound
    and its lower endpoint is the value at ``X_lo`` (a lower bound for the
    sup).
    """
    spec = get_spec(spec)
    if spec.normalizer not in _MODES:
        raise UnknownIdError(f"spec {spec.id!r} has no scannable normalizer")
    if X_hi > cap:
        raise ResourceError(f"scan range reaches {X_hi:g}, above the cap {cap:g}")
    if not 1 <= X_lo <= X_hi:
        raise DomainError("scan range must satisfy 1 <= X_lo <= X_hi")
    if spec.normalizer in ("inv_log2", "inv_log") and X_lo <= 1:
        raise DomainError("log normalizers need X_lo > 1")
    mode = _MODES[spec.normalizer]
    T_hi = full_sum(spec, q).hi if mode == 3 else 0.0
    state = np.zeros(9)
    end = math.floor(X_hi)
    code = WEIGHTS[spec.weight]
    head = min(end, REFINE_LIMIT)
    best, A, B = _mp_prefix_scan(code, q, head, float(X_lo), float(X_hi), mode, T_hi)
    state[2:4] = A
    state[6:8] = B
    a = head + 1
    while a <= end:
        b = min(end + 1, a + segment_size)
        wlo, whi = weight_segment(a, b, spec.weight, q)
        best = max(best, _scan_kernel(wlo, whi, a, float(X_lo), float(X_hi), mode, state, T_hi))
        a = b
    first = normalized_value(spec, X_lo, q)
    return Interval(min(first.lo, best), max(best, first.hi))
