import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selbergconst.errors import DomainError, ResourceError, UnknownIdError
from selbergconst.interval import Interval
from selbergconst.mobius import (get_spec, m_family, normalized_value, threshold_scan,
                                 weighted_sum)

mpmath.mp.dps = 40


def factor(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            n //= p
            if n % p == 0:
                return None  # not squarefree
        p += 1
    if n > 1:
        out.append(n)
    return out


def mu(n):
    f = factor(n)
    return 0 if f is None else (-1) ** len(f)


def kappa(n):
    return math.prod(p + 1 for p in factor(n) or [])


def brute_m(kind, X, q=1):
    X = mpmath.mpf(X)
    tot = mpmath.mpf(0)
    for n in range(1, int(X) + 1):
        if math.gcd(n, q) != 1 or mu(n) == 0:
            continue
        den = kappa(n) if "tilde" in kind else n
        k = {"m": 0, "m_check": 1, "m_checkcheck": 2, "m_tilde": 1, "m_tildetilde": 2}[kind]
        tot += mu(n) * mpmath.log(X / n) ** k / den
    return tot


def encloses(x, ref):
    return mpmath.mpf(x.lo) <= ref <= mpmath.mpf(x.hi)


def test_m_family_examples():
    assert m_family("m_check", 1, 1).lo == m_family("m_check", 1, 1).hi == 0
    assert encloses(m_family("m", 3, 1), mpmath.mpf(1) / 6)
    l = mpmath.log
    assert encloses(m_family("m_checkcheck", 3, 1), l(3) ** 2 - l(1.5) ** 2 / 2)
    assert encloses(m_family("m_tilde", 4, 1), l(4) - l(2) / 3 - l(mpmath.mpf(4) / 3) / 4)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["m", "m_check", "m_checkcheck", "m_tilde", "m_tildetilde"]),
       st.floats(1.0, 400.0), st.sampled_from([1, 2, 3, 6, 10]))
def test_m_family_vs_brute_force(kind, X, q):
    got = m_family(kind, X, q)
    assert encloses(got, brute_m(kind, X, q))
    assert got.width < 1e-11


def test_boundary_x_hulls_both_memberships():
    X = Interval(math.nextafter(7.0, 0), math.nextafter(7.0, 10))
    got = m_family("m", X, 1)
    assert encloses(got, brute_m("m", 6)) and encloses(got, brute_m("m", 7))


def test_m_family_errors():
    with pytest.raises(ResourceError):
        m_family("m", 1e9)
    with pytest.raises(UnknownIdError):
        m_family("m_hat", 10)
    with pytest.raises(DomainError):
        m_family("m", -1)


@pytest.mark.parametrize("X", [10, 100, 1000])
@pytest.mark.parametrize("q", [1, 2, 3])
def test_integral_identity_check(X, q):
    # ∫_1^X m̌_q(s) ds/s against ½ m̌̌_q(X); m̌_q is log-linear between integers
    total = mpmath.mpf(0)
    for n in range(1, X):
        S0 = sum(mpmath.mpf(mu(k)) / k for k in range(1, n + 1) if math.gcd(k, q) == 1)
        S1 = sum(mu(k) * mpmath.log(k) / k for k in range(1, n + 1) if math.gcd(k, q) == 1)
        a, b = mpmath.log(n), mpmath.log(n + 1)
        total += S0 * (b * b - a * a) / 2 - S1 * (b - a)
    assert encloses(m_family("m_checkcheck", X, q) / 2, total)


@pytest.mark.parametrize("X", [10, 100, 1000])
@pytest.mark.parametrize("q", [1, 2, 3])
def test_integral_identity_tilde(X, q):
    f = lambda s: brute_m("m_tilde", s, q) / s  # noqa: E731
    total = mpmath.quad(f, list(range(1, X + 1))) if X <= 100 else None
    half = m_family("m_tildetilde", X, q) / 2
    if total is None:
        # quad over a thousand pieces is slow; use the closed form per piece
        total = mpmath.mpf(0)
        for n in range(1, X):
            ks = [k for k in range(1, n + 1) if math.gcd(k, q) == 1 and mu(k)]
            S0 = sum(mpmath.mpf(mu(k)) / kappa(k) for k in ks)
            S1 = sum(mu(k) * mpmath.log(k) / kappa(k) for k in ks)
            a, b = mpmath.log(n), mpmath.log(n + 1)
            total += S0 * (b * b - a * a) / 2 - S1 * (b - a)
    assert mpmath.mpf(half.lo) - 1e-20 <= total <= mpmath.mpf(half.hi) + 1e-20


def _smooth_part(q, X):
    ps = factor(q)
    out, frontier = [], [1]
    while frontier:
        d = frontier.pop()
        out.append(d)
        frontier.extend(d * p for p in ps if d * p <= X and d * p not in out and d * p not in frontier)
    return sorted(set(out))


@pytest.mark.parametrize("q", [2, 6])
@pytest.mark.parametrize("X", [50, 999.5, 10**4])
@pytest.mark.parametrize("kind", ["m", "m_check", "m_checkcheck"])
def test_coprime_reduction_identity(q, X, kind):
    lhs = m_family(kind, X, q)
    rhs = Interval(0.0, 0.0)
    for d in _smooth_part(q, X):
        rhs = rhs + m_family(kind, Interval.exact(X) / d, 1) / d
    assert lhs.intersects(rhs)


@pytest.mark.parametrize("X", [2, 3, 10, 77, 1000, 12345.5, 10**5, 654321, 10**6])
def test_check_m_near_one(X):
    got = m_family("m_check", X, 1)
    bound = 1 / math.sqrt(X)
    assert abs(got - 1).hi <= bound


def test_weighted_sum_examples():
    got = weighted_sum("inv", 10, 1, k=0)
    ref = sum(mpmath.mpf(1) / n for n in (1, 2, 3, 5, 6, 7, 10))
    assert encloses(got, ref)
    one = weighted_sum("nu_over_l", 1, 1)
    assert one.lo == one.hi == 1.0
    assert encloses(weighted_sum("inv_phi", 5, 2), mpmath.mpf(7) / 4)


def _mp_weight(weight, p):
    p = mpmath.mpf(p)
    s = mpmath.sqrt(p)
    return {
        "inv": 1 / p,
        "inv_phi": 1 / (p - 1),
        "sq_half": 1 / (s * (s - 1)),
        "l2_over_phi2": p * p / (p - 1) ** 2,
        "l_over_phi_half_sq": p / (s - 1) ** 2,
        "inv_phi_half_sq": 1 / (s - 1) ** 2,
        "A_over_phi": (1 + (p - 2) / (p ** 1.5 - p - s + 2)) / (p - 1),
        "nu_over_l": (mpmath.mpf(1) / 2 if p == 2 else 1 / (p - 2)),
    }[weight]


def brute_weighted(weight, X, q, k):
    X = mpmath.mpf(X)
    tot = mpmath.mpf(0)
    for n in range(1, int(X) + 1):
        f = factor(n)
        if f is None or math.gcd(n, q) != 1:
            continue
        tot += mpmath.fprod(_mp_weight(weight, p) for p in f) * mpmath.log(X / n) ** k
    return tot


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["inv", "inv_phi", "sq_half", "l2_over_phi2", "A_over_phi", "nu_over_l",
                        "inv_phi_half_sq"]),
       st.floats(1.0, 300.0), st.sampled_from([1, 2, 3]), st.integers(0, 2))
def test_weighted_sum_vs_brute_force(weight, X, q, k):
    got = weighted_sum(weight, X, q, k=k)
    ref = brute_weighted(weight, X, q, k)
    assert encloses(got, ref)
    assert got.width <= 1e-11 * max(1, abs(got.hi))


def test_inner_log_argument():
    got = weighted_sum("inv", 10, 1, k=1, inner_log_arg=20)
    ref = sum(mpmath.log(mpmath.mpf(20) / n) / n for n in (1, 2, 3, 5, 6, 7, 10))
    assert encloses(got, ref)


@pytest.mark.parametrize("name,X0", [("sq_half", 37.0), ("Ss1", 100.0), ("sum2_half_threshold", 12.5)])
def test_scan_degenerate_range(name, X0):
    got = threshold_scan(name, 1, X0, X0)
    point = normalized_value(name, X0, 1)
    assert got.hi >= point.hi
    assert got.hi - point.hi <= 1e-12 * max(1, abs(point.hi))


def _normalized(spec, X, moments):
    S0, S1, S2 = moments[int(X)]
    X = mpmath.mpf(X)
    L = mpmath.log(X)
    s = [S0, S0 * L - S1, S0 * L * L - 2 * S1 * L + S2][spec.log_power]
    if spec.normalizer == "inv_X":
        return s / X
    return s / L ** (2 if spec.normalizer == "inv_log2" else 1)


@pytest.mark.parametrize("name,q,lo,hi", [
    ("sq_half", 1, 10, 400), ("sq_half", 2, 10, 400), ("Ss1", 1, 1, 400), ("Ss1", 2, 3, 300),
    ("sum2_half_threshold", 1, 1, 300), ("sumvar1log", 2, 10, 300), ("sum_half_threshold", 1, 2, 300),
])
def test_scan_bounds_sampled_sup(name, q, lo, hi):
    spec = get_spec(name)
    got = threshold_scan(name, q, lo, hi)
    # prefix moments Σ w(ℓ) log^j ℓ over ℓ <= n
    moments, acc = {}, [mpmath.mpf(0)] * 3
    for n in range(1, hi + 1):
        f = factor(n)
        if f is not None and math.gcd(n, q) == 1:
            w = mpmath.fprod(_mp_weight(spec.weight, p) for p in f)
            ln = mpmath.log(n)
            acc = [acc[0] + w, acc[1] + w * ln, acc[2] + w * ln * ln]
        moments[n] = tuple(acc)
    samples = [lo, hi]
    for n in range(math.ceil(lo), hi):
        samples += [x for x in (n, n + 0.25, n + 0.5, n + 0.75, n + 1 - 1e-9) if lo <= x <= hi]
    best = max(_normalized(spec, x, moments) for x in samples)
    assert best <= mpmath.mpf(got.hi)
    assert mpmath.mpf(got.hi) - best <= 1e-6 * abs(best)


def test_scan_errors():
    with pytest.raises(ResourceError):
        threshold_scan("sq_half", 1, 10, 2e6)
    with pytest.raises(DomainError):
        threshold_scan("sq_half", 1, 1, 100)
    with pytest.raises(DomainError):
        threshold_scan("Ss1", 1, 50, 10)
    with pytest.raises(UnknownIdError):
        threshold_scan("inv", 1, 1, 10)
    with pytest.raises(UnknownIdError):
        weighted_sum("no_such_weight", 10)
