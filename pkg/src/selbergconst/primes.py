"""Segmented sieving of primes, the Möbius function and related tables.

Everything here is exact integer arithmetic. Intervals only appear in
:func:`mult_value` for real exponents ``s``.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator

import numpy as np
from numba import njit

from .errors import DomainError, ResourceError
from .interval import Interval, pow_real

SIEVE_LIMIT = 10**9 + 1
DEFAULT_SEGMENT = 2**22
_CACHE_MAGIC = b"SQFS"
_CACHE_VERSION = 1


@njit(cache=True)
def _simple_primes(n):
    """All primes ``<= n`` (plain Eratosthenes)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=np.uint8)
    flags[0] = 0
    flags[1] = 0
    i = 2
    while i * i <= n:
        if flags[i]:
            for j in range(i * i, n + 1, i):
                flags[j] = 0
        i += 1
    count = 0
    for i in range(n + 1):
        count += flags[i]
    out = np.empty(count, dtype=np.int64)
    k = 0
    for i in range(n + 1):
        if flags[i]:
            out[k] = i
            k += 1
    return out


@njit(cache=True)
def _sieve_kernel(lo, hi, base):
    size = hi - lo
    mu = np.ones(size, dtype=np.int8)
    lpf = np.zeros(size, dtype=np.int64)
    rem = np.empty(size, dtype=np.int64)
    phi = np.empty(size, dtype=np.int64)
    kappa = np.empty(size, dtype=np.int64)
    for i in range(size):
        rem[i] = lo + i
        phi[i] = lo + i
        kappa[i] = lo + i
    for p in base:
        if p * p >= hi:
            break
        start = ((lo + p - 1) // p) * p
        for m in range(start, hi, p):
            i = m - lo
            mu[i] = -mu[i]
            if lpf[i] == 0:
                lpf[i] = p
            phi[i] = phi[i] // p * (p - 1)
            kappa[i] = kappa[i] // p * (p + 1)
            r = rem[i] // p
            if r % p == 0:
                mu[i] = 0
                while r % p == 0:
                    r //= p
            rem[i] = r
    for i in range(size):
        r = rem[i]
        if r > 1:
            mu[i] = -mu[i]
            if lpf[i] == 0:
                lpf[i] = r
            phi[i] = phi[i] // r * (r - 1)
            kappa[i] = kappa[i] // r * (r + 1)
    prime = np.zeros(size, dtype=np.bool_)
    for i in range(size):
        n = lo + i
        if n >= 2 and lpf[i] == n:
            prime[i] = True
    return mu, lpf, prime, phi, kappa


@dataclass(frozen=True)
class ArithTable:
    """Exact arithmetic data for the integers ``lo <= n < hi``."""

    lo: int
    hi: int
    mu: np.ndarray
    lpf: np.ndarray
    prime: np.ndarray
    phi: np.ndarray
    kappa: np.ndarray

    @property
    def squarefree(self) -> np.ndarray:
        return self.mu != 0

    @property
    def n(self) -> np.ndarray:
        return np.arange(self.lo, self.hi, dtype=np.int64)

    def __len__(self) -> int:
        return self.hi - self.lo

    def at(self, field: str, n: int):
        if not self.lo <= n < self.hi:
            raise DomainError(f"{n} outside table range [{self.lo}, {self.hi})")
        return getattr(self, field)[n - self.lo]

    def factor(self, n: int) -> list[int]:
        """Distinct prime factors of ``n`` using the lpf column and trial division."""
        return prime_factors(n)

    def save(self, path: str | Path) -> None:
        """Write a platform-independent binary cache of the table."""
        header = struct.pack("<4sIqq", _CACHE_MAGIC, _CACHE_VERSION, self.lo, self.hi)
        with open(path, "wb") as fh:
            fh.write(header)
            for arr, dt in ((self.mu, "<i1"), (self.lpf, "<i8"), (self.prime, "<u1"),
                            (self.phi, "<i8"), (self.kappa, "<i8")):
                fh.write(np.ascontiguousarray(arr).astype(dt).tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "ArithTable":
        raw = Path(path).read_bytes()
        magic, version, lo, hi = struct.unpack_from("<4sIqq", raw)
        if magic != _CACHE_MAGIC or version != _CACHE_VERSION:
            raise DomainError(f"{path} is not a sieve cache (version {_CACHE_VERSION})")
        size = hi - lo
        off = struct.calcsize("<4sIqq")
        cols = []
        for dt, width in (("<i1", 1), ("<i8", 8), ("<u1", 1), ("<i8", 8), ("<i8", 8)):
            cols.append(np.frombuffer(raw, dtype=dt, count=size, offset=off).copy())
            off += width * size
        mu, lpf, prime, phi, kappa = cols
        return cls(lo, hi, mu.astype(np.int8), lpf.astype(np.int64), prime.astype(bool),
                   phi.astype(np.int64), kappa.astype(np.int64))


_BASE_CACHE: dict[int, np.ndarray] = {}


def base_primes(limit: int) -> np.ndarray:
    """Primes up to ``isqrt(limit) + 1``, cached."""
    r = math.isqrt(limit) + 1
    for k, arr in _BASE_CACHE.items():
        if k >= r:
            return arr
    arr = _simple_primes(r)
    _BASE_CACHE[r] = arr
    return arr


def sieve_segment(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT) -> ArithTable:
    """Sieve ``[lo, hi)`` and return μ, lpf, primality, φ and κ for each n."""
    if not (1 <= lo < hi <= SIEVE_LIMIT):
        raise DomainError(f"sieve range [{lo}, {hi}) must satisfy 1 <= lo < hi <= 10^9 + 1")
    if hi - lo > segment_size:
        raise ResourceError(f"segment of {hi - lo} integers exceeds the budget {segment_size}")
    mu, lpf, prime, phi, kappa = _sieve_kernel(lo, hi, base_primes(hi))
    return ArithTable(lo, hi, mu, lpf, prime, phi, kappa)


def iter_segments(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT) -> Iterator[ArithTable]:
    """Consecutive tables covering ``[lo, hi)``."""
    a = lo
    while a < hi:
        b = min(hi, a + segment_size)
        yield sieve_segment(a, b, segment_size)
        a = b


def primes_up_to(n: int) -> np.ndarray:
    """Sorted int64 array of the primes ``<= n``."""
    if n > 4 * 10**8:
        raise ResourceError(f"prime list up to {n} exceeds the in-memory limit 4*10^8")
    return _simple_primes(int(n))


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` by trial division."""
    if n < 1:
        raise DomainError("n must be positive")
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        out.append(m)
    return out


def mobius(n: int) -> int:
    m, k = n, 0
    for p in prime_factors(n):
        m //= p
        if m % p == 0:
            return 0
        k += 1
    return -1 if k % 2 else 1


def coprime_filter(n: int, q: int) -> bool:
    """True iff gcd(n, q) = 1."""
    if n < 1 or q < 1:
        raise DomainError("coprime_filter expects positive integers")
    return math.gcd(n, q) == 1


def euler_phi(n: int) -> int:
    r = n
    for p in prime_factors(n):
        r = r // p * (p - 1)
    return r


def kappa(n: int) -> int:
    r = n
    for p in prime_factors(n):
        r = r // p * (p + 1)
    return r


@dataclass(frozen=True)
class MultiplicativeValue:
    """φ and κ at ``n`` together with their real-exponent versions at ``s``."""

    n: int
    phi: int
    kappa: int
    phi_s: Interval
    kappa_s: Interval


def mult_value(n: int, s: Interval | Fraction | float | int = 1) -> MultiplicativeValue:
    """φ_s(n) = n^s ∏(1 - p^-s) and κ_s(n) = n^s ∏(1 + p^-s) over p | n."""
    if n < 1:
        raise DomainError("n must be positive")
    ps = prime_factors(n)
    phi, kap = euler_phi(n), kappa(n)
    if not isinstance(s, Interval) and Fraction(s) == 1:
        return MultiplicativeValue(n, phi, kap, Interval.exact(phi), Interval.exact(kap))
    if isinstance(s, float):
        s = Fraction(s)
    phi_s = pow_real(n, s) if n > 1 else Interval(1.0, 1.0)
    kap_s = phi_s
    for p in ps:
        ps_ = pow_real(p, s)
        # n^s (1 - p^-s) written as n^s (p^s - 1)/p^s keeps the factor exact at p
        phi_s = phi_s * (ps_ - 1) / ps_
        kap_s = kap_s * (ps_ + 1) / ps_
    return MultiplicativeValue(n, phi, kap, phi_s, kap_s)


def prime_counts(n: int, primes: np.ndarray | None = None) -> tuple[int, Interval]:
    """π(n) exactly and an enclosure of θ(n) = Σ_{p<=n} log p."""
    if primes is None:
        primes = primes_up_to(n)
    sel = primes[primes <= n]
    logs = np.log(sel.astype(np.float64))
    s = math.fsum(logs.tolist())
    # numpy's log is within a few ulp; 2^-46 relative per term is ample
    err = math.fsum(np.abs(logs).tolist()) * 2.0**-46 + abs(s) * 2.0**-52
    return len(sel), Interval(math.nextafter(s - err, -math.inf), math.nextafter(s + err, math.inf))


@njit(cache=True)
def _collect_squarefree(mu, lpf, kappa, lo, v_primes, n_out, mu_out, k_out, lpf_out, pos):
    for i in range(mu.shape[0]):
        if mu[i] == 0:
            continue
        n = lo + i
        ok = True
        for p in v_primes:
            if n % p == 0:
                ok = False
                break
        if not ok:
            continue
        n_out[pos] = n
        mu_out[pos] = mu[i]
        k_out[pos] = kappa[i]
        lpf_out[pos] = lpf[i]
        pos += 1
    return pos


@dataclass(frozen=True)
class SquarefreeTable:
    """Squarefree n <= X coprime to v, with μ(n), κ(n) and least prime factor.

    κ is stored as float64, exact for n <= 10^9.
    """

    X: int
    v: int
    n: np.ndarray
    mu: np.ndarray
    kappa: np.ndarray
    lpf: np.ndarray


def squarefree_table(X: int, v: int = 1, segment_size: int = DEFAULT_SEGMENT) -> SquarefreeTable:
    X = int(X)
    if X < 1:
        raise DomainError("X must be at least 1")
    if X > 2 * 10**8:
        raise ResourceError(f"squarefree table up to {X} exceeds the in-memory limit 2*10^8")
    vp = np.array(prime_factors(v) if v > 1 else [], dtype=np.int64)
    cap = int(0.6080 * X) + 64
    n_out = np.empty(cap, dtype=np.uint32)
    mu_out = np.empty(cap, dtype=np.int8)
    k_out = np.empty(cap, dtype=np.float64)
    lpf_out = np.empty(cap, dtype=np.uint32)
    pos = 0
    for t in iter_segments(1, X + 1, segment_size):
        pos = _collect_squarefree(t.mu, t.lpf, t.kappa, t.lo, vp, n_out, mu_out, k_out, lpf_out, pos)
    return SquarefreeTable(X, v, n_out[:pos].copy(), mu_out[:pos].copy(), k_out[:pos].copy(),
                           lpf_out[:pos].copy())
