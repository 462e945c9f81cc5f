import json
import math
from fractions import Fraction

import mpmath
import pytest

from selbergconst.errors import ConfigError, DomainError
from selbergconst.inputs import literal
from selbergconst.interval import Interval
from selbergconst.pipeline import (admissible_window, assemble, brun_titchmarsh, iota, log_integral_bound,
                                   merged_bound, monotonicity_windows, xi_bound)

mpmath.mp.dps = 30


@pytest.fixture(scope="module")
def numeric():
    return {v: assemble(v, "1e12.5", c) for v, c in ((1, 70), (2, 16))}


@pytest.fixture(scope="module")
def analytic():
    return {v: assemble(v, "1e7", 10) for v in (1, 2)}


def test_upsilon1_v2(analytic):
    up1 = analytic[2]["Upsilon1"]
    eta2 = mpmath.mpf("0.694356698566237")
    ref = 2 * mpmath.mpf("4.4") * mpmath.mpf("0.493") * eta2
    assert up1.lo <= ref <= up1.hi
    assert abs(up1.mid - 3.013) < 1e-3


@pytest.mark.parametrize("v", [1, 2])
def test_omega_and_psi(numeric, v):
    rep = numeric[v]
    omega = rep["omega"]
    if v == 1:
        assert omega.intersects(1 / (rep["chi1"] * rep["chi2"]))
    T2, T3 = literal("kernel_bounds", str(v), "T2"), literal("kernel_bounds", str(v), "T3")
    ref = T2 + T3 / math.log(20)
    assert rep["Psi"].intersects(ref)


@pytest.mark.parametrize("v", [1, 2])
def test_max_dominance(numeric, v):
    rep = numeric[v]
    scans = {"eta": ("sumvar1log",), "psi": ("sq_half",), "phi1": ("sumvarp",), "phi2": ("Ss1",),
             "chi1": ("sum_half_threshold",), "chi2": ("sum2_half_threshold",)}
    for name, (scan,) in scans.items():
        branch = literal("threshold_scans", scan, str(v))
        assert rep[name].hi >= branch.hi, name
        assert rep[name].hi >= rep[f"{name}_analytic"].hi, name


@pytest.mark.parametrize("v", [1, 2])
def test_entries_positive_and_finite(numeric, analytic, v):
    for rep in (numeric[v], analytic[v]):
        for name, x in rep.entries.items():
            if name in ("Brun", "BT_coefficient"):
                continue
            assert math.isfinite(x.hi) and x.lo > 0, name


def test_xi_monotone_in_u(numeric):
    for v, c in ((1, 70), (2, 16)):
        a = xi_bound(Interval.exact(10**13), v, c, report=numeric[v])
        b = numeric[v]["Xi_bound"]
        assert a.hi <= b.hi


def test_k_definition(numeric):
    for v in (1, 2):
        rep = numeric[v]
        K = rep["K"]
        ref = mpmath.mpf(rep["Xi_bound"].hi) * mpmath.log(mpmath.mpf(10) ** 12.5)
        assert K.lo <= ref * (1 + 1e-12) and ref <= K.hi * (1 + 1e-12)
        assert K.lo > 0 and math.isfinite(K.hi)


def test_merged_bound_dominates(analytic):
    for v in (1, 2):
        rep = analytic[v]
        for e in (7, 8, 9.5, 11, 12, 12.5, 13, 15):
            U = Interval.exact(Fraction(10) ** int(e)) if e == int(e) else Interval(10**e, 10**e)
            assert merged_bound(rep, U).hi >= xi_bound(U, v, 10, report=rep).hi
        log_coeff = rep["Merge_log"]
        assert log_coeff.lo > rep["Upsilon5"].lo
        pi2 = math.pi ** 2
        T4 = rep["T4"].hi
        vk = v / (3 if v == 2 else 1)
        assert log_coeff.lo >= 12 * T4 * vk / (pi2 / 3) * (1 - 1e-9)


def test_xi_domain():
    with pytest.raises(DomainError):
        xi_bound(10**6, 1, 10)


def test_monotonicity_windows():
    for c in (10, 16, 70):
        assert all(monotonicity_windows(c, Fraction(25, 2)).values())


def test_admissibility():
    lo, hi = admissible_window("1e12.5")
    assert lo.hi < 10 < 70 < hi.lo
    with pytest.raises(ConfigError):
        assemble(1, "1e12.5", 100)
    with pytest.raises(ConfigError):
        assemble(2, "1e7", 70)
    with pytest.raises(ConfigError):
        assemble(1, "1e9", 10)
    with pytest.raises(DomainError):
        assemble(3, "1e7", 10)


def test_iota():
    i = iota()
    ref = 2 * (1 - 4 / mpmath.pi ** 2)
    assert i.lo <= ref <= i.hi
    assert abs(float(ref) - 1.18943) < 1e-5


def test_brun_titchmarsh(numeric):
    bt = brun_titchmarsh(10**25, 1, report=numeric[2])
    assert bt.coefficient.lo > 0
    factor = 1 - bt.coefficient / math.log(1e25)
    assert 0 < factor.lo and factor.hi < 1
    assert bt.bound.hi <= 2e25 / math.log(1e25)
    js = bt.to_json()
    assert json.loads(json.dumps(js))["q"] == 1
    with pytest.raises(DomainError):
        brun_titchmarsh(10**24, 1, report=numeric[2])
    with pytest.raises(DomainError):
        brun_titchmarsh(10**25, 3, report=numeric[2])
    assert brun_titchmarsh(3 * 10**25, 3, report=numeric[2]).bound.hi > 0


def test_report_json(numeric):
    js = numeric[2].to_json()
    again = json.loads(json.dumps(js))
    assert again["v"] == 2 and "Xi_bound" in again["entries"]
    assert "inputs_sha256" in again


@pytest.mark.parametrize("Z,X", [(10, 100), (3, 1000), (50, 60)])
def test_log_integral_m1(Z, X):
    for n in (1, 2, 3.5):
        got = log_integral_bound(Z, X, 1, n)
        ref = mpmath.quad(lambda u: 1 / (u * mpmath.log(mpmath.mpf(X) / u) ** n), [1, Z])
        assert got.lo <= ref <= got.hi
    LX, LXZ = mpmath.log(X), mpmath.log(mpmath.mpf(X) / Z)
    two = log_integral_bound(Z, X, 1, 2)
    assert two.lo <= 1 / LXZ - 1 / LX <= two.hi
    one = log_integral_bound(Z, X, 1, 1)
    assert one.lo <= mpmath.log(LX / LXZ) <= one.hi


@pytest.mark.parametrize("Z,X,m,n", [(10, 100, 1.5, 1), (100, 10**4, 2, 2), (30, 40, 1.25, 0.5)])
def test_log_integral_upper_bound(Z, X, m, n):
    got = log_integral_bound(Z, X, m, n)
    ref = mpmath.quad(lambda u: 1 / (u ** m * mpmath.log(mpmath.mpf(X) / u) ** n), [1, Z])
    assert got.lo <= ref <= got.hi


def test_log_integral_degenerate_and_errors():
    z = log_integral_bound(1, 100, 1, 1)
    assert z.lo <= 0 <= z.hi
    with pytest.raises(DomainError):
        log_integral_bound(100, 10, 1, 1)
    with pytest.raises(DomainError):
        log_integral_bound(10, 100, 0.5, 1)
