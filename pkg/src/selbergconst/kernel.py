"""The quadratic kernel h_q and its logarithmic integral.

    h_q(s) = Σ_{(d,q)=1} μ(d)/κ(d)² (m̃_{dq}(s/d) - c_d)²,   c_d = (π²/6) κ(dq)/(dq).

For d > s the tilde-sum is empty and the term is C_q μ(d)/d² with
C_q = (π²/6)² (κ(q)/q)². For fixed d the function t ↦ m̃_{dq}(t) is piecewise
linear in log t, with slope Σ_{n<=t} μ(n)/κ(n) changing only at integers n
coprime to dq, so ∫ (m̃ - c_d)² dt/t has a closed form on each piece.
The integral is assembled divisor by divisor:

    ∫_a^b h_q(s) ds/s = Σ_{d<=b} w_d ∫_{max(1,a/d)}^{b/d} f_d(t)² dt/t
                        + C_q (G_q log(b/a) - Σ_{d<b} μ(d)/d² log(b/max(a,d)))

where G_q = Σ_{(d,q)=1} μ(d)/d² = (6/π²)/∏_{p|q}(1 - p^-2).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit

from . import _fastiv as fi
from .errors import DomainError, ResourceError
from .inputs import literal
from .interval import Interval, const_catalog, iv_log
from .primes import SquarefreeTable, kappa, prime_factors, squarefree_table

INTEGRAL_CAP = 10**8
EVAL_CAP = 10**6
CHECKPOINT_VERSION = 1
_CHECKPOINT_FORMAT = "selbergconst-hq-checkpoint"
_LARGE_S = 10**12

_TABLE_CACHE: dict[tuple[int, int], SquarefreeTable] = {}


def _table(X: int, q: int) -> SquarefreeTable:
    key = (X, q)
    if key not in _TABLE_CACHE:
        # keep only the newest table: the 10^8 ones are about 1 GB
        _TABLE_CACHE.clear()
        _TABLE_CACHE[key] = squarefree_table(X, q)
    return _TABLE_CACHE[key]


def _moduli(q: int):
    """(π²/6) κ(q)/q, C_q and G_q as intervals."""
    zeta2 = const_catalog("zeta2")
    kq = Interval.exact(kappa(q)) / q
    base = zeta2 * kq
    G = const_catalog("six_over_pi2")
    for p in prime_factors(q) if q > 1 else []:
        G = G / (1 - Interval(1.0, 1.0) / (p * p))
    return base, base * base, G


@njit(inline="always")
def _split(n, mu, lpf, d, idx, out):
    """Distinct primes of d (table entry idx) into out; returns their count."""
    k = 0
    m = d
    while m > 1:
        j = np.searchsorted(n, m)
        p = lpf[j]
        out[k] = p
        k += 1
        m //= p
    return k


@njit(inline="always")
def _coprime(x, ps, k):
    for i in range(k):
        if x % ps[i] == 0:
            return False
    return True


@njit(inline="always")
def _piece(flo, fhi, alo, ahi, dlo, dhi):
    """∫_0^Δ (f + A u)² du and the end value f + AΔ.

    With fb = f + AΔ the integral is Δ/3 (f² + f fb + fb²)
    = Δ (¼(f + fb)² + (AΔ)²/12), a sum of squares.
    """
    slo, shi = fi.mul(alo, ahi, dlo, dhi)
    sumlo, sumhi = fi.add(flo, fhi, flo, fhi)
    sumlo, sumhi = fi.add(sumlo, sumhi, slo, shi)
    q1lo, q1hi = fi.sqr(sumlo, sumhi)
    q2lo, q2hi = fi.sqr(slo, shi)
    q1lo, q1hi = fi.scale(q1lo, q1hi, 0.25)
    q2lo, q2hi = fi.div_pos(q2lo, q2hi, 12.0, 12.0)
    tlo, thi = fi.add(q1lo, q1hi, q2lo, q2hi)
    tlo, thi = fi.mul_pos(max(tlo, 0.0), thi, max(dlo, 0.0), dhi)
    flo2, fhi2 = fi.add(flo, fhi, slo, shi)
    return tlo, thi, flo2, fhi2


@njit(inline="always")
def _log_ratio_pt(x, y):
    """Enclosure of log(x/y) for positive floats."""
    r = x / y
    return fi.log_pt(fi.down(r))[0], fi.log_pt(fi.up(r))[1]


@njit(cache=True)
def _integral_kernel(n, mu, kap, lpf, i0, i1, a, b, base_lo, base_hi, max_events):
    """Partial sums over table entries d = n[i0:i1] (only d <= b are used).

    Returns (main_lo, main_hi, const_lo, const_hi, events, next_index).
    """
    ps = np.empty(16, dtype=np.int64)
    mlo = 0.0
    mhi = 0.0
    Mblo = 0.0
    Mbhi = 0.0
    clo = 0.0
    chi = 0.0
    Cblo = 0.0
    Cbhi = 0.0
    events = 0
    nd = 0
    i = i0
    while i < i1:
        d = np.int64(n[i])
        if d > b:
            i = i1
            break
        k = _split(n, mu, lpf, d, i, ps)
        fd = float(d)
        # weight μ(d)/κ(d)² and centre c_d = base κ(d)/d
        rlo, rhi = fi.recip_pt(kap[i])
        wlo, whi = fi.sqr(rlo, rhi)
        if mu[i] < 0:
            wlo, whi = -whi, -wlo
        cklo, ckhi = fi.div_pos(kap[i], kap[i], fd, fd)
        cdlo, cdhi = fi.mul_pos(base_lo, base_hi, cklo, ckhi)
        flo, fhi = -cdhi, -cdlo
        Alo, Ahi = 1.0, 1.0
        nprev = 1.0
        Ilo = 0.0
        Ihi = 0.0
        Iblo = 0.0
        Ibhi = 0.0
        cnt = 0
        j = 1
        while j < n.shape[0]:
            m = np.int64(n[j])
            if float(m * d) > b:
                break
            j += 1
            if k > 0 and not _coprime(m, ps, k):
                continue
            fm = float(m)
            events += 1
            dlo, dhi = fi.log1p_pt(fi.down((fm - nprev) / nprev))[0], fi.log1p_pt(fi.up((fm - nprev) / nprev))[1]
            if fm * fd <= a:
                # piece entirely below the integration window
                slo, shi = fi.mul(Alo, Ahi, dlo, dhi)
                flo, fhi = fi.add(flo, fhi, slo, shi)
            elif nprev * fd >= a:
                tlo, thi, flo, fhi = _piece(flo, fhi, Alo, Ahi, dlo, dhi)
                Iblo, Ibhi = fi.add(Iblo, Ibhi, tlo, thi)
                cnt += 1
            else:
                # straddles a/d: move f to a/d, integrate the rest
                e1lo, e1hi = _log_ratio_pt(a, nprev * fd)
                slo, shi = fi.mul(Alo, Ahi, e1lo, e1hi)
                galo, gahi = fi.add(flo, fhi, slo, shi)
                e2lo, e2hi = _log_ratio_pt(fm * fd, a)
                tlo, thi, _, _ = _piece(galo, gahi, Alo, Ahi, e2lo, e2hi)
                Iblo, Ibhi = fi.add(Iblo, Ibhi, tlo, thi)
                slo, shi = fi.mul(Alo, Ahi, dlo, dhi)
                flo, fhi = fi.add(flo, fhi, slo, shi)
            if cnt >= 4096:
                Ilo, Ihi = fi.add(Ilo, Ihi, Iblo, Ibhi)
                Iblo = 0.0
                Ibhi = 0.0
                cnt = 0
            qlo, qhi = fi.recip_pt(kap[j - 1])
            if mu[j - 1] < 0:
                qlo, qhi = -qhi, -qlo
            Alo, Ahi = fi.add(Alo, Ahi, qlo, qhi)
            nprev = fm
        # last piece up to b/d
        if nprev * fd >= a:
            dlo, dhi = _log_ratio_pt(b, nprev * fd)
            tlo, thi, _, _ = _piece(flo, fhi, Alo, Ahi, dlo, dhi)
        else:
            e1lo, e1hi = _log_ratio_pt(a, nprev * fd)
            slo, shi = fi.mul(Alo, Ahi, e1lo, e1hi)
            galo, gahi = fi.add(flo, fhi, slo, shi)
            dlo, dhi = _log_ratio_pt(b, a)
            tlo, thi, _, _ = _piece(galo, gahi, Alo, Ahi, dlo, dhi)
        Iblo, Ibhi = fi.add(Iblo, Ibhi, tlo, thi)
        Ilo, Ihi = fi.add(Ilo, Ihi, Iblo, Ibhi)
        tlo, thi = fi.mul(wlo, whi, Ilo, Ihi)
        Mblo, Mbhi = fi.add(Mblo, Mbhi, tlo, thi)
        # constant part: μ(d)/d² log(b/max(a, d)) for d < b
        lo_end = max(a, fd)
        if lo_end < b:
            llo, lhi = _log_ratio_pt(b, lo_end)
            rlo, rhi = fi.recip_pt(fd)
            rlo, rhi = fi.sqr(rlo, rhi)
            if mu[i] < 0:
                rlo, rhi = -rhi, -rlo
            tlo, thi = fi.mul(rlo, rhi, llo, lhi)
            Cblo, Cbhi = fi.add(Cblo, Cbhi, tlo, thi)
        nd += 1
        if nd >= 4096:
            mlo, mhi = fi.add(mlo, mhi, Mblo, Mbhi)
            clo, chi = fi.add(clo, chi, Cblo, Cbhi)
            Mblo = 0.0
            Mbhi = 0.0
            Cblo = 0.0
            Cbhi = 0.0
            nd = 0
        i += 1
        if events >= max_events:
            break
    mlo, mhi = fi.add(mlo, mhi, Mblo, Mbhi)
    clo, chi = fi.add(clo, chi, Cblo, Cbhi)
    return mlo, mhi, clo, chi, events, i


@dataclass(frozen=True)
class SweepResult:
    X: float
    v: int
    a: float
    value: Interval
    events: int
    seconds: float

    def to_json(self) -> dict:
        return {"X": self.X, "v": self.v, "a": self.a, "lo": self.value.lo,
                "hi": self.value.hi, "events": self.events, "seconds": round(self.seconds, 3)}


def _write_checkpoint(path: Path, state: dict) -> None:
    payload = {"format": _CHECKPOINT_FORMAT, "version": CHECKPOINT_VERSION, **state}
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(payload, sort_keys=True))
    tmp.replace(path)


def _read_checkpoint(path: Path, X: float, v: int, a: float) -> dict | None:
    if not path.exists():
        return None
    data = json.loads(path.read_text())
    if data.get("format") != _CHECKPOINT_FORMAT or data.get("version") != CHECKPOINT_VERSION:
        raise DomainError(f"{path} is not a version {CHECKPOINT_VERSION} sweep checkpoint")
    if (data["X"], data["v"], data["a"]) != (X, v, a):
        raise DomainError(f"checkpoint {path} belongs to a different run")
    return data


def hq_integral(X, v: int = 1, a: float = 1.0, *, checkpoint: str | Path | None = None,
                chunk: int = 1 << 20, max_events: int | None = None) -> Interval:
    """Enclosure of ∫_a^X h_v(s) ds/s."""
    return hq_integral_run(X, v, a, checkpoint=checkpoint, chunk=chunk,
                           max_events=max_events).value


def hq_integral_run(X, v: int = 1, a: float = 1.0, *, checkpoint: str | Path | None = None,
                    chunk: int = 1 << 20, max_events: int | None = None) -> SweepResult:
    """Same as :func:`hq_integral` with event count, timing and checkpointing.

    With ``checkpoint`` set, progress is saved after every chunk of divisors
    and an existing file for the same ``(X, v, a)`` is resumed. Exceeding
    ``max_events`` raises :class:`ResourceError` after saving.
    """
    X = float(X)
    a = float(a)
    if v < 1:
        raise DomainError("v must be a positive integer")
    if not 1 <= a <= X:
        raise DomainError("need 1 <= a <= X")
    if X > INTEGRAL_CAP:
        raise ResourceError(f"X = {X:g} exceeds the sweep cap {INTEGRAL_CAP:g}")
    t0 = time.perf_counter()
    if a == X:
        return SweepResult(X, v, a, Interval(0.0, 0.0), 0, 0.0)
    tab = _table(math.floor(X), v)
    base, C, G = _moduli(v)
    path = Path(checkpoint) if checkpoint is not None else None
    state = {"X": X, "v": v, "a": a, "next_index": 0, "main_lo": 0.0, "main_hi": 0.0,
             "const_lo": 0.0, "const_hi": 0.0, "events": 0}
    if path is not None:
        state = _read_checkpoint(path, X, v, a) or state
    main = Interval(state["main_lo"], state["main_hi"])
    const = Interval(state["const_lo"], state["const_hi"])
    events = state["events"]
    i = state["next_index"]
    total = len(tab.n)
    budget = math.inf if max_events is None else max_events
    while i < total and tab.n[i] <= X:
        left = budget - events
        if left <= 0:
            if path is not None:
                _write_checkpoint(path, state)
            raise ResourceError(f"event budget {max_events} exhausted at divisor index {i}"
                                + (f"; progress saved to {path}" if path else ""))
        mlo, mhi, clo, chi, ev, nxt = _integral_kernel(
            tab.n, tab.mu, tab.kappa, tab.lpf, i, min(total, i + chunk), a, X,
            base.lo, base.hi, int(min(left, 2**62)))
        main = main + Interval(mlo, mhi)
        const = const + Interval(clo, chi)
        events += ev
        i = nxt
        state.update(next_index=i, main_lo=main.lo, main_hi=main.hi,
                     const_lo=const.lo, const_hi=const.hi, events=events)
        if path is not None:
            _write_checkpoint(path, state)
    value = main + C * (G * iv_log(Interval(X, X) / a) - const)
    return SweepResult(X, v, a, value, events, time.perf_counter() - t0)


# pointwise evaluation -----------------------------------------------------

@njit(cache=True)
def _h_point(n, mu, kap, lpf, s, base_lo, base_hi, direct):
    """Σ_{d<=s} w_d (m̃_{dq}(s/d) - c_d)² and Σ_{d<=s} μ(d)/d²."""
    ps = np.empty(16, dtype=np.int64)
    hlo = 0.0
    hhi = 0.0
    slo = 0.0
    shi = 0.0
    for i in range(n.shape[0]):
        d = np.int64(n[i])
        fd = float(d)
        if fd > s:
            break
        k = _split(n, mu, lpf, d, i, ps)
        rlo, rhi = fi.recip_pt(kap[i])
        wlo, whi = fi.sqr(rlo, rhi)
        if mu[i] < 0:
            wlo, whi = -whi, -wlo
        cklo, ckhi = fi.div_pos(kap[i], kap[i], fd, fd)
        cdlo, cdhi = fi.mul_pos(base_lo, base_hi, cklo, ckhi)
        if direct:
            # literal sum Σ μ(n)/κ(n) log(s/(dn))
            tlo = 0.0
            thi = 0.0
            for j in range(n.shape[0]):
                m = np.int64(n[j])
                if float(m * d) > s:
                    break
                if k > 0 and not _coprime(m, ps, k):
                    continue
                llo, lhi = _log_ratio_pt(s, float(m * d))
                qlo, qhi = fi.recip_pt(kap[j])
                if mu[j] < 0:
                    qlo, qhi = -qhi, -qlo
                ulo, uhi = fi.mul(qlo, qhi, llo, lhi)
                tlo, thi = fi.add(tlo, thi, ulo, uhi)
            flo, fhi = fi.sub(tlo, thi, cdlo, cdhi)
        else:
            # slope recurrence along the breakpoints
            flo, fhi = -cdhi, -cdlo
            Alo, Ahi = 1.0, 1.0
            nprev = 1.0
            for j in range(1, n.shape[0]):
                m = np.int64(n[j])
                if float(m * d) > s:
                    break
                if k > 0 and not _coprime(m, ps, k):
                    continue
                fm = float(m)
                r = (fm - nprev) / nprev
                dlo = fi.log1p_pt(fi.down(r))[0]
                dhi = fi.log1p_pt(fi.up(r))[1]
                ulo, uhi = fi.mul(Alo, Ahi, dlo, dhi)
                flo, fhi = fi.add(flo, fhi, ulo, uhi)
                qlo, qhi = fi.recip_pt(kap[j])
                if mu[j] < 0:
                    qlo, qhi = -qhi, -qlo
                Alo, Ahi = fi.add(Alo, Ahi, qlo, qhi)
                nprev = fm
            llo, lhi = _log_ratio_pt(s, nprev * fd)
            ulo, uhi = fi.mul(Alo, Ahi, llo, lhi)
            flo, fhi = fi.add(flo, fhi, ulo, uhi)
        glo, ghi = fi.sqr(flo, fhi)
        glo, ghi = fi.mul(wlo, whi, glo, ghi)
        hlo, hhi = fi.add(hlo, hhi, glo, ghi)
        rlo, rhi = fi.recip_pt(fd)
        rlo, rhi = fi.sqr(rlo, rhi)
        if mu[i] < 0:
            rlo, rhi = -rhi, -rlo
        slo, shi = fi.add(slo, shi, rlo, rhi)
    return hlo, hhi, slo, shi


def hq_eval(s, q: int = 1, method: str = "sweep") -> Interval:
    """Enclosure of h_q(s) for 1 <= s <= 10^6.

    ``method="direct"`` sums the tilde-averages literally (O(s log s) logs per
    divisor); ``"sweep"`` follows the piecewise-linear recurrence.
    """
    s = float(s)
    if s < 1:
        raise DomainError("h_q is defined for s >= 1")
    if q < 1:
        raise DomainError("q must be a positive integer")
    if s > EVAL_CAP:
        raise ResourceError(f"s = {s:g} exceeds the pointwise cap {EVAL_CAP:g}")
    if method not in ("sweep", "direct"):
        raise DomainError(f"unknown method {method!r}")
    tab = squarefree_table(math.floor(s), q)
    base, C, G = _moduli(q)
    hlo, hhi, slo, shi = _h_point(tab.n, tab.mu, tab.kappa, tab.lpf, s, base.lo, base.hi,
                                  method == "direct")
    # the d > s terms: C_q Σ_{d>s} μ(d)/d² = C_q (G_q - Σ_{d<=s} μ(d)/d²)
    return Interval(hlo, hhi) + C * (G - Interval(slo, shi))


# bounds and the constant 𝔰_v -------------------------------------------

@dataclass(frozen=True)
class KernelBounds:
    """Pointwise bounds |h_v(s)| <= (T2 log s + T3)/s for s <= 10^12, T4/log² s beyond."""

    v: int
    T2: Interval
    T3: Interval
    T4: Interval

    @property
    def Psi(self) -> Interval:
        return self.T2 + self.T3 / iv_log(literal("kernel_bounds", "psi_lower"))

    def pointwise(self, s) -> Interval:
        s = Interval.coerce(s)
        L = iv_log(s)
        if s.hi <= _LARGE_S:
            return (self.T2 * L + self.T3) / s
        if s.lo >= _LARGE_S:
            return self.T4 / (L * L)
        raise DomainError("s straddles the 10^12 branch point")


def kernel_bounds(v: int) -> KernelBounds:
    if v not in (1, 2):
        raise DomainError("kernel bounds are tabulated for v in {1, 2}")
    key = str(v)
    return KernelBounds(v, literal("kernel_bounds", key, "T2"), literal("kernel_bounds", key, "T3"),
                        literal("kernel_bounds", key, "T4"))


def hq_tail_bound(X, v: int) -> Interval:
    """Upper bound on |∫_X^∞ h_v(s) ds/s| (returned as [0, bound])."""
    X = Interval.coerce(X)
    if X.lo < 20:
        raise DomainError("the tail bound needs X >= 20")
    kb = kernel_bounds(v)
    P = Interval.exact(_LARGE_S)
    LP = iv_log(P)
    if X.lo >= _LARGE_S:
        bound = kb.T4 / iv_log(X)
    else:
        LX = iv_log(X)
        psi = kb.T2 + kb.T3 / LX
        omega = LX / X - LP / P + 1 / X - 1 / P
        bound = psi * omega + 2 * kb.T4 / LP
    return Interval(0.0, bound.hi)


def sv_constant(v: int, X_cap=10**8, integral: Interval | None = None) -> Interval:
    """Enclosure of 𝔰_v = v/φ(v)(γ + Σ_{p|v} log p/(p-1)) - (6/π²)(v/κ(v)) ∫_1^∞ h_v/s.

    ``integral`` may carry a precomputed ∫_1^{X_cap} h_v/s (for instance the
    result of a long sweep); otherwise it is computed here.
    """
    if v not in (1, 2):
        raise DomainError("the constant is calibrated for v in {1, 2}")
    if not 10**6 <= X_cap <= INTEGRAL_CAP:
        raise DomainError("X_cap must lie in [10^6, 10^8]")
    I = hq_integral(X_cap, v) if integral is None else integral
    tail = hq_tail_bound(X_cap, v).hi
    I = Interval(I.lo - tail, I.hi + tail)
    I = Interval(math.nextafter(I.lo, -math.inf), math.nextafter(I.hi, math.inf))
    gamma = const_catalog("gamma")
    lead = gamma
    phi_v = 1
    for p in prime_factors(v) if v > 1 else []:
        lead = lead + iv_log(Interval.exact(p)) / (p - 1)
        phi_v *= p - 1
    return lead * v / phi_v - const_catalog("six_over_pi2") * Interval.exact(v) / kappa(v) * I
