import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from selbergconst.errors import DomainError, ResourceError
from selbergconst.primes import (ArithTable, coprime_filter, iter_segments, mobius, mult_value, prime_factors,
                                 sieve_segment, squarefree_table)


def brute_factor(n):
    out, p = [], 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def brute_mu(n):
    f = brute_factor(n)
    return 0 if any(e > 1 for _, e in f) else (-1) ** len(f)


def brute_kappa(n):
    return math.prod(p ** (e - 1) * (p + 1) for p, e in brute_factor(n))


def test_small_mobius():
    assert sieve_segment(1, 11).mu.tolist() == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert sieve_segment(1, 31).at("mu", 30) == -1


def test_squarefree_count_and_density():
    N = 10**6
    # Σ_{d<=√N} μ(d) ⌊N/d²⌋ with brute-force μ
    expect = sum(brute_mu(d) * (N // (d * d)) for d in range(1, math.isqrt(N) + 1))
    assert expect == 607926
    count = sum(int(t.squarefree.sum()) for t in iter_segments(1, N + 1))
    assert count == expect
    assert abs(count / N - 6 / math.pi**2) < 0.001


def test_mertens_sanity():
    t = sieve_segment(1, 10**6 + 1)
    M = np.cumsum(t.mu.astype(np.int64))
    n = np.arange(1, 10**6 + 1)
    assert np.all(np.abs(M) <= np.sqrt(n))


def test_segments_concatenate():
    whole = sieve_segment(1, 50_001)
    parts = list(iter_segments(1, 50_001, segment_size=7_777))
    for field in ("mu", "lpf", "prime", "phi", "kappa"):
        assert np.array_equal(np.concatenate([getattr(p, field) for p in parts]), getattr(whole, field))


def test_table_against_brute_force():
    t = sieve_segment(9_000, 10_000)
    for n in range(9_000, 10_000):
        assert t.at("mu", n) == brute_mu(n)
        assert t.at("kappa", n) == brute_kappa(n)
        assert t.at("lpf", n) == brute_factor(n)[0][0]


@settings(max_examples=200, deadline=None)
@given(a=st.integers(1, 10**4), b=st.integers(1, 10**4))
def test_multiplicativity(a, b):
    if math.gcd(a, b) != 1:
        return
    assert mobius(a * b) == mobius(a) * mobius(b)
    assert mult_value(a * b).kappa == mult_value(a).kappa * mult_value(b).kappa


def test_mult_value_examples():
    v = mult_value(6, 1)
    assert (v.phi, v.kappa) == (2, 12)
    half = mult_value(2, 0.5).phi_s
    assert half.lo <= math.sqrt(2) - 1 <= half.hi
    one = mult_value(1, 0.37)
    assert one.phi_s == one.kappa_s and one.phi_s.lo <= 1 <= one.phi_s.hi


def test_coprime_filter():
    assert coprime_filter(9, 2)
    assert not coprime_filter(6, 2)
    assert all(coprime_filter(1, q) for q in range(1, 50))


def test_prime_factors():
    assert prime_factors(360) == [2, 3, 5]
    assert prime_factors(1) == []


def test_squarefree_table_coprime():
    tab = squarefree_table(100, 2)
    expect = [n for n in range(1, 101) if n % 2 and brute_mu(n)]
    assert tab.n.tolist() == expect
    assert tab.mu.tolist() == [brute_mu(n) for n in expect]


def test_sieve_errors():
    with pytest.raises(DomainError):
        sieve_segment(0, 10)
    with pytest.raises(ResourceError):
        sieve_segment(1, 10**6, segment_size=1000)


def test_cache_round_trip(tmp_path):
    t = sieve_segment(1000, 3000)
    path = tmp_path / "seg.bin"
    t.save(path)
    back = ArithTable.load(path)
    for field in ("mu", "lpf", "prime", "phi", "kappa"):
        assert np.array_equal(getattr(back, field), getattr(t, field))
