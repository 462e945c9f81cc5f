import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selbergconst.errors import DomainError, ResourceError
from selbergconst.sigma import (default_sv, residual_check, residual_constant, sigma_direct,
                                sigma_value)

mpmath.mp.dps = 30


def _mu(n):
    k, p = 0, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            k += 1
        p += 1
    return (-1) ** (k + (n > 1))


def sigma_oracle(U, v):
    U = mpmath.mpf(U)
    ds = [(d, _mu(d), mpmath.log(U / d)) for d in range(1, int(U) + 1) if _mu(d) and math.gcd(d, v) == 1]
    tot = mpmath.mpf(0)
    for d, md, ld in ds:
        for e, me, le in ds:
            tot += md * me * ld * le * math.gcd(d, e) / (d * e)
    return tot


def encloses(x, ref):
    return mpmath.mpf(x.lo) <= ref <= mpmath.mpf(x.hi)


def test_small_u_closed_forms():
    L = mpmath.log
    assert encloses(sigma_value(2, 1), L(2) ** 2)
    ref3 = L(3) ** 2 - L(3) * L(1.5) + L(1.5) ** 2 / 2
    assert encloses(sigma_value(3, 1), ref3)
    assert abs(ref3 - mpmath.mpf("0.84370")) < 1e-5


@settings(max_examples=25, deadline=None)
@given(st.floats(1.01, 80.0), st.sampled_from([1, 2]),
       st.sampled_from(["pairwise", "decomposition"]))
def test_sigma_vs_oracle(U, v, method):
    got = sigma_value(U, v, method)
    assert encloses(got, sigma_oracle(U, v))
    assert got.width < 1e-10


@pytest.mark.parametrize("U", [2, 10, 50, 100, 500, 1000])
@pytest.mark.parametrize("v", [1, 2])
def test_methods_agree(U, v):
    a = sigma_value(U, v, "pairwise")
    b = sigma_value(U, v, "decomposition")
    assert a.intersects(b)


@pytest.mark.parametrize("U", [7, 33.3, 100])
def test_pairwise_symmetry(U):
    for v in (1, 2):
        half = sigma_value(U, v, "pairwise", symmetric=True)
        full = sigma_value(U, v, "pairwise", symmetric=False)
        assert half.intersects(full)


def test_residual_examples():
    r1 = residual_check(10**4, 1)
    ref1 = mpmath.mpf("0.607398570962174") * mpmath.mpf(10) ** (-mpmath.mpf(4) / 3)
    assert encloses(r1["bound"], ref1)
    assert abs(ref1 - mpmath.mpf("0.02819")) < 1e-5
    assert r1["pass"]
    r2 = residual_check(10**4, 2)
    assert encloses(r2["bound"], mpmath.mpf("1.4731118309395") * mpmath.mpf(10) ** (-mpmath.mpf(4) / 3))
    assert r2["pass"]
    assert residual_constant(2).contains(1.4731118309395)


def test_residual_near_one():
    sv = default_sv(2)
    r = sigma_direct(1.5, 2).residual
    L = mpmath.log(1.5)
    assert mpmath.mpf(r.lo) <= L * L - 2 * L + mpmath.mpf(sv.hi)
    assert mpmath.mpf(r.hi) >= L * L - 2 * L + mpmath.mpf(sv.lo)
    close = sigma_direct(1.0001, 2).residual
    assert abs(close.mid - sv.mid) < 3e-4


def test_result_json():
    res = sigma_direct(100, 1, "pairwise")
    js = res.to_json()
    assert js["method"] == "pairwise" and js["lo"] <= js["hi"]


def test_caps_and_domain():
    with pytest.raises(ResourceError):
        sigma_value(2001, 1, "pairwise")
    with pytest.raises(ResourceError):
        sigma_value(2e6, 1)
    with pytest.raises(DomainError):
        sigma_value(1, 1)
    with pytest.raises(DomainError):
        sigma_value(10, 3)
    with pytest.raises(DomainError):
        sigma_value(10, 1, "magic")
    with pytest.raises(DomainError):
        residual_check(2e6, 1)
