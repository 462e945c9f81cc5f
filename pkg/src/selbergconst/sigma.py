"""The logarithmic Selberg quadratic form

    Σ_v(U) = Σ_{d,e<=U, (de,v)=1} μ(d)μ(e)/[d,e] log(U/d) log(U/e)

by brute force over pairs, or through the gcd expansion
1/[d,e] = (1/de) Σ_{k | (d,e)} φ(k), which collapses it to

    Σ_v(U) = Σ_{k<=U, (k,v)=1} μ²(k) φ(k)/k² · m̌_{kv}(U/k)².
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from . import _fastiv as fi
from .errors import DomainError, ResourceError
from .inputs import literal
from .interval import Interval, iv_log, iv_powi, pow_real
from .kernel import _coprime, _split, sv_constant
from .primes import euler_phi, squarefree_table

PAIRWISE_CAP = 2000
DECOMPOSITION_CAP = 10**6
METHODS = ("pairwise", "decomposition")


@njit(inline="always")
def _log_over(U, x):
    r = U / x
    return fi.log_pt(fi.down(r))[0], fi.log_pt(fi.up(r))[1]


@njit(cache=True)
def _pairwise(n, mu, U, symmetric):
    m = 0
    while m < n.shape[0] and float(n[m]) <= U:
        m += 1
    tlo = 0.0
    thi = 0.0
    for i in range(m):
        d = np.int64(n[i])
        ldlo, ldhi = _log_over(U, float(d))
        rlo = 0.0
        rhi = 0.0
        start = i if symmetric else 0
        for j in range(start, m):
            e = np.int64(n[j])
            a, b = d, e
            while b:
                a, b = b, a % b
            lcm = float(d // a * e)
            lelo, lehi = _log_over(U, float(e))
            plo, phi_ = fi.mul_pos(ldlo, ldhi, lelo, lehi)
            plo, phi_ = fi.div_pos(plo, phi_, lcm, lcm)
            if symmetric and j != i:
                plo, phi_ = fi.scale(plo, phi_, 2.0)
            if mu[i] * mu[j] < 0:
                plo, phi_ = -phi_, -plo
            rlo, rhi = fi.add(rlo, rhi, plo, phi_)
        tlo, thi = fi.add(tlo, thi, rlo, rhi)
    return tlo, thi


@njit(cache=True)
def _decomposition(n, mu, lpf, U):
    ps = np.empty(16, dtype=np.int64)
    tlo = 0.0
    thi = 0.0
    blo = 0.0
    bhi = 0.0
    cnt = 0
    for i in range(n.shape[0]):
        k = np.int64(n[i])
        fk = float(k)
        if fk > U:
            break
        nk = _split(n, mu, lpf, k, i, ps)
        phi = k
        for t in range(nk):
            phi = phi // ps[t] * (ps[t] - 1)
        # m̌_{kv}(U/k) = Σ_{n<=U/k, (n,kv)=1} μ(n)/n log(U/(kn))
        mlo = 0.0
        mhi = 0.0
        for j in range(n.shape[0]):
            x = np.int64(n[j])
            if float(x * k) > U:
                break
            if nk > 0 and not _coprime(x, ps, nk):
                continue
            llo, lhi = _log_over(U, float(x * k))
            llo, lhi = fi.div_pos(llo, lhi, float(x), float(x))
            if mu[j] < 0:
                llo, lhi = -lhi, -llo
            mlo, mhi = fi.add(mlo, mhi, llo, lhi)
        slo, shi = fi.sqr(mlo, mhi)
        w = float(phi) / (fk * fk)
        wlo, whi = fi.down(w), fi.up(w)
        slo, shi = fi.mul_pos(slo, shi, wlo, whi)
        blo, bhi = fi.add(blo, bhi, slo, shi)
        cnt += 1
        if cnt >= 4096:
            tlo, thi = fi.add(tlo, thi, blo, bhi)
            blo = 0.0
            bhi = 0.0
            cnt = 0
    return fi.add(tlo, thi, blo, bhi)


@lru_cache(maxsize=4)
def default_sv(v: int) -> Interval:
    """𝔰_v from a 10^6 sweep plus its tail bound (quick, about 10^-4 wide)."""
    return sv_constant(v, 10**6)


@dataclass(frozen=True)
class SigmaResult:
    U: float
    v: int
    value: Interval
    method: str
    residual: Interval

    def to_json(self) -> dict:
        return {"U": self.U, "v": self.v, "method": self.method, "lo": self.value.lo,
                "hi": self.value.hi, "residual_lo": self.residual.lo, "residual_hi": self.residual.hi}


def _main_term(U: float, v: int) -> Interval:
    return iv_log(Interval(U, U)) * Interval.exact(v) / euler_phi(v)


def sigma_value(U, v: int = 1, method: str = "decomposition", symmetric: bool = True) -> Interval:
    U = float(U)
    if U <= 1:
        raise DomainError("U must exceed 1")
    if v not in (1, 2):
        raise DomainError("v must be 1 or 2")
    if method == "pairwise":
        if U > PAIRWISE_CAP:
            raise ResourceError(f"pairwise evaluation is capped at U = {PAIRWISE_CAP}")
        tab = squarefree_table(math.floor(U), v)
        lo, hi = _pairwise(tab.n, tab.mu, U, symmetric)
    elif method == "decomposition":
        if U > DECOMPOSITION_CAP:
            raise ResourceError(f"decomposition is capped at U = {DECOMPOSITION_CAP:g}")
        tab = squarefree_table(math.floor(U), v)
        lo, hi = _decomposition(tab.n, tab.mu, tab.lpf, U)
    else:
        raise DomainError(f"unknown method {method!r}; choose from {METHODS}")
    return Interval(lo, hi)


def sigma_direct(U, v: int = 1, method: str = "decomposition", sv: Interval | None = None) -> SigmaResult:
    """Σ_v(U) with the residual Σ_v(U) - v/φ(v) log U + 𝔰_v."""
    value = sigma_value(U, v, method)
    sv = default_sv(v) if sv is None else sv
    residual = value - _main_term(float(U), v) + sv
    return SigmaResult(float(U), v, value, method, residual)


def residual_constant(v: int) -> Interval:
    return literal("residual_constants", str(v))


def residual_check(U, v: int = 1, sv: Interval | None = None) -> dict:
    """Compare |residual| with C_v U^{-1/3}; passes when the upper ends compare."""
    U = float(U)
    if not 1 < U <= DECOMPOSITION_CAP:
        raise DomainError("residual checks run for 1 < U <= 10^6")
    res = sigma_direct(U, v, sv=sv).residual
    bound = residual_constant(v) / pow_real(Interval(U, U), Interval.exact("1") / 3)
    mag = max(abs(res.lo), abs(res.hi))
    return {"U": U, "v": v, "residual": res, "bound": bound, "pass": mag <= bound.lo}
