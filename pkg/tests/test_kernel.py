import json
import math
from functools import lru_cache

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selbergconst.errors import DomainError, ResourceError
from selbergconst.interval import Interval
from selbergconst.kernel import (hq_eval, hq_integral, hq_integral_run, hq_tail_bound, kernel_bounds,
                                 sv_constant)

mpmath.mp.dps = 30


def _factor(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return None
            out.append(p)
        p += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def _sqfree(N, q):
    """(n, μ(n), κ(n)) for squarefree n <= N coprime to q."""
    rows = []
    for n in range(1, N + 1):
        f = _factor(n)
        if f is None or math.gcd(n, q) != 1:
            continue
        rows.append((n, (-1) ** len(f), math.prod(p + 1 for p in f)))
    return rows


def _kap(n):
    return math.prod(p + 1 for p in _factor(n))


def h_oracle(s, q):
    """h_q(s) straight from the definition, all d, in mpmath."""
    s = mpmath.mpf(s)
    z2 = mpmath.zeta(2)
    N = int(s)
    total = mpmath.mpf(0)
    partial = mpmath.mpf(0)
    for d, md, kd in _sqfree(N, q):
        mt = sum(mn * mpmath.log(s / (d * n)) / kn for n, mn, kn in _sqfree(N // d, d * q))
        base = z2 * _kap(d * q) / (d * q)
        total += mpmath.mpf(md) / kd ** 2 * (mt - base) ** 2
        partial += mpmath.mpf(md) / d ** 2
    G = 1 / z2
    for p in _factor(q) or []:
        G /= 1 - mpmath.mpf(1) / p ** 2
    C = (z2 * _kap(q) / q) ** 2
    return total + C * (G - partial)


def encloses(x, ref, slack=0):
    return mpmath.mpf(x.lo) - slack <= ref <= mpmath.mpf(x.hi) + slack


def test_h_at_one_is_zeta2():
    h = hq_eval(1, 1)
    assert encloses(h, mpmath.zeta(2))
    assert h.width < 1e-13


@pytest.mark.parametrize("s,q", [(1, 2), (2, 1), (7.5, 1), (30, 2), (64.25, 1), (120, 3), (199.9, 2)])
def test_h_vs_definition(s, q):
    assert encloses(hq_eval(s, q), h_oracle(s, q), slack=1e-25)


@settings(max_examples=50, deadline=None)
@given(st.floats(1.0, 1e4), st.sampled_from([1, 2]))
def test_sweep_matches_direct(s, v):
    a = hq_eval(s, v, "sweep")
    b = hq_eval(s, v, "direct")
    assert a.intersects(b)
    assert a.width < 1e-9 and b.width < 1e-9


@pytest.mark.parametrize("v,s", [(2, 50), (2, 500), (1, 10**4), (2, 10**4), (1, 50), (1, 3.5), (2, 10**6)])
def test_pointwise_bound(v, s):
    h = hq_eval(s, v)
    tt = kernel_bounds(v).pointwise(s)
    assert abs(h).hi <= tt.hi


def test_bound_table_values():
    kb = kernel_bounds(2)
    assert kb.T2.contains(4.99703) and kb.T3.contains(9.57182)
    assert kernel_bounds(1).T4.contains(0.000033536)


def test_empty_integral():
    for v in (1, 2):
        got = hq_integral(1, v)
        assert got.lo == got.hi == 0


@pytest.mark.parametrize("X,v", [(12, 1), (30, 2), (40.5, 1)])
def test_integral_vs_quadrature(X, v):
    mpmath.mp.dps = 20
    try:
        pts = [1] + list(range(2, math.floor(X) + 1)) + ([X] if X != math.floor(X) else [])
        ref = mpmath.quad(lambda s: h_oracle(s, v) / s, pts)
    finally:
        mpmath.mp.dps = 30
    assert encloses(hq_integral(X, v), ref, slack=1e-15)


@pytest.mark.parametrize("v", [1, 2])
def test_integral_additivity(v):
    a, b = 10**3, 10**4
    whole = hq_integral(b, v)
    parts = hq_integral(a, v) + hq_integral(b, v, a=float(a))
    assert whole.intersects(parts)
    assert whole.width < 1e-9


def test_checkpoint_resume(tmp_path):
    path = tmp_path / "sweep.json"
    with pytest.raises(ResourceError):
        hq_integral_run(2e4, 2, checkpoint=path, chunk=512, max_events=3000)
    saved = json.loads(path.read_text())
    assert saved["version"] == 1 and saved["next_index"] > 0
    resumed = hq_integral_run(2e4, 2, checkpoint=path, chunk=512)
    fresh = hq_integral(2e4, 2)
    assert resumed.value.intersects(fresh)
    assert resumed.value.width < 1e-9
    with pytest.raises(DomainError):
        hq_integral_run(3e4, 2, checkpoint=path)


def test_integral_errors():
    with pytest.raises(ResourceError):
        hq_integral(2e8, 1)
    with pytest.raises(DomainError):
        hq_integral(10, 1, a=20.0)
    with pytest.raises(ResourceError):
        hq_eval(2e6, 1)
    with pytest.raises(DomainError):
        hq_eval(0.5, 1)


def test_tail_bound_examples():
    kb1 = kernel_bounds(1)
    t12 = hq_tail_bound(10**12, 1)
    assert t12.lo == 0
    assert t12.hi <= 0.000033536 / 27.631 * (1 + 1e-3)
    assert t12.hi >= 0.000033536 / math.log(1e12) * (1 - 1e-12)
    assert math.isfinite(hq_tail_bound(20, 2).hi)
    assert hq_tail_bound(20, 2).hi >= hq_tail_bound(100, 2).hi
    mpmath.mp.dps = 30
    X, P = mpmath.mpf(10) ** 8, mpmath.mpf(10) ** 12
    omega = mpmath.log(X) / X - mpmath.log(P) / P + 1 / X - 1 / P
    T2, T3, T4 = (mpmath.mpf(x.mid) for x in (kb1.T2, kb1.T3, kb1.T4))
    ref = (T2 + T3 / mpmath.log(X)) * omega + 2 * T4 / mpmath.log(P)
    got = hq_tail_bound(10**8, 1).hi
    assert ref <= got <= ref * (1 + 1e-12)
    with pytest.raises(DomainError):
        hq_tail_bound(10, 1)


def test_sv_constant_1e6_digits():
    s1 = sv_constant(1, 10**6)
    s2 = sv_constant(2, 10**6)
    assert s1.lo < 0.60732 and s1.hi > 0.60731
    assert 1.472 < s2.lo and s2.hi < 1.474
    with pytest.raises(DomainError):
        sv_constant(3, 10**6)
    with pytest.raises(DomainError):
        sv_constant(1, 10**5)


def test_sv_nested(integrals_1e8):
    for v in (1, 2):
        wide = sv_constant(v, 10**6)
        tight = sv_constant(v, 10**8, integral=integrals_1e8[v])
        assert wide.lo <= tight.lo and tight.hi <= wide.hi
