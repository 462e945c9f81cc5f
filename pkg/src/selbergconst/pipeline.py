"""Assembly of the explicit error constants for the logarithmic sum.

Every product and prime sum comes from :mod:`selbergconst.euler`; the
imported literals (Möbius bounds, kernel bounds, full-range scan constants)
come from :mod:`selbergconst.inputs`. Threshold constants take the maximum
of an analytic branch and the scanned value, exactly as in the lemmas they
feed.

Parameters: ``Z = c U^{2/3}``, so ``U/Z = U^{1/3}/c`` and ``c^3`` appears
wherever ``U/Z`` is written as a power of ``U``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import ConfigError, DomainError
from .euler import delta_input, error_E, eval_catalog, theta, zeta_ratio_three_halves
from .inputs import inputs_hash, literal
from .interval import (Interval, const_catalog, iv_exp, iv_log, iv_max, iv_sqrt, pow_real)
from .kernel import kernel_bounds, sv_constant
from .primes import euler_phi, kappa

CHOICE = Fraction(2, 3)
REGIMES = {"1e7": Fraction(7), "1e12.5": Fraction(25, 2)}
PW = 10**12


def _iv(x) -> Interval:
    return Interval.coerce(x) if not isinstance(x, (str, Fraction)) else Interval.exact(x)


def _ten_pow(e) -> Interval:
    """10^e for a rational exponent."""
    e = Fraction(e)
    if e.denominator == 1 and e >= 0:
        return Interval.exact(10 ** int(e))
    return pow_real(Interval.exact(10), e)


ONE = Interval(1.0, 1.0)
SQRT2 = iv_sqrt(Interval.exact(2))


def _pi2() -> Interval:
    return const_catalog("pi2")


def _gamma() -> Interval:
    return const_catalog("gamma")


def _hull_max(*xs: Interval) -> Interval:
    out = xs[0]
    for x in xs[1:]:
        out = iv_max(out, x)
    return out


@lru_cache(maxsize=64)
def _catalog(id: str, cutoff: int | None) -> Interval:
    return eval_catalog(id, cutoff).total


def _scan_constant(name: str, v: int) -> Interval:
    return literal("threshold_scans", name, str(v))


@dataclass
class ConstantsReport:
    v: int
    regime: str
    c: int
    entries: dict[str, Interval] = field(default_factory=dict)
    provenance: dict[str, list[str]] = field(default_factory=dict)

    def put(self, name: str, value: Interval, sources: list[str]) -> Interval:
        self.entries[name] = value
        self.provenance[name] = sources
        return value

    def __getitem__(self, name: str) -> Interval:
        return self.entries[name]

    def to_json(self) -> dict:
        return {
            "v": self.v,
            "regime": self.regime,
            "c": self.c,
            "inputs_sha256": inputs_hash(),
            "entries": {k: {**v.to_json(), "sources": self.provenance.get(k, [])}
                        for k, v in self.entries.items()},
        }


def admissible_window(regime: str) -> tuple[Interval, Interval]:
    """Half-open window [lower, upper) for c in a regime.

    Lower end from Z >= 4*10^5; upper end from U/Z >= 20 in the analytic
    regime and from the monotonicity requirement (e^5) in the numeric one.
    Both are capped by c < 10^4.
    """
    if regime not in REGIMES:
        raise ConfigError(f"unknown regime {regime!r}; choose from {sorted(REGIMES)}")
    E = REGIMES[regime]
    lower = Interval.exact(400000) / _ten_pow(CHOICE * E)
    top = _ten_pow((1 - CHOICE) * E)
    if regime == "1e7":
        upper = top / 20
    else:
        upper = top / iv_exp(Interval.exact(5))
    cap = Interval.exact(10**4)
    if upper.lo > cap.hi:
        upper = cap
    return lower, upper


def check_admissible(regime: str, c) -> None:
    lower, upper = admissible_window(regime)
    if not (Interval.exact(c).lo >= lower.hi and Interval.exact(c).hi < upper.lo):
        raise ConfigError(
            f"c = {c} is outside the admissible window [{lower.hi:.4g}, {upper.lo:.4g}) for "
            f"U >= 10^{float(REGIMES[regime]):g} (needs Z >= 4e5, U/Z >= 20, c < 10^4)")


# building blocks ----------------------------------------------------------

class Inputs:
    """Catalog values and imported literals, shared by both moduli."""

    def __init__(self, cutoff: int | None = None):
        self.cutoff = cutoff

    def cat(self, id: str) -> Interval:
        return _catalog(id, self.cutoff)

    @staticmethod
    def lit(*path: str) -> Interval:
        return literal(*path)


def _eta(I: Inputs, v: int, rep: ConstantsReport) -> Interval:
    d = Fraction(1, 3)
    L = iv_log(Interval.exact(10**7))
    prod = I.cat("G_sumvar1log")
    s = I.cat("sumvar1log_sum")
    err = delta_input(1, d) * I.cat("delta_sumvar1log")
    g = _gamma()
    if v == 1:
        analytic = prod * (Interval.exact("0.5") + (s + g) / L) + err / Interval.exact(d) / (L * L)
    else:
        # local factors at p = 2 with A_2 = 1
        f2 = ONE - ONE / 2
        sg2 = iv_log(Interval.exact(2)) / 2
        two_d = pow_real(2, d)
        g2 = ONE + (2 - (2 + two_d)) / (pow_real(2, 1 - d) + (2 + two_d) - 1)
        analytic = (prod * f2 * (Interval.exact("0.5") + (s + g + sg2) / L)
                    + err * g2 / Interval.exact(d) / (L * L))
    rep.put(f"eta_analytic", analytic, ["G_sumvar1log", "sumvar1log_sum", "delta_sumvar1log"])
    return rep.put("eta", _hull_max(analytic, _scan_constant("sumvar1log", v)),
                   ["eta_analytic", "threshold_scans/sumvar1log"])


def _phi_constants(I: Inputs, v: int, rep: ConstantsReport) -> tuple[Interval, Interval]:
    prod = I.cat("I_prod")
    err = I.cat("err_sumvarp")
    E21, E22 = error_E(2, 1), error_E(2, 2)
    s = SQRT2 - 1
    w1 = s / (s + 3) * (E21 + E22 * 3 / s)
    w2 = E22
    uu2 = ONE - Interval.exact(2) / 3
    vv2 = ONE + Interval.exact(-2) / (s + 3)
    r6 = iv_sqrt(Interval.exact(10**6))
    r8 = iv_sqrt(Interval.exact(10**8))
    if v == 1:
        a1 = prod + w1 * err / r6
        a2 = prod + 5 * w1 * err / r8
    else:
        a1 = uu2 * prod + vv2 * w2 * err / r6
        a2 = uu2 * prod + 5 * vv2 * w2 * err / r8
    src = ["I_prod", "err_sumvarp"]
    phi1 = rep.put("phi1", _hull_max(a1, _scan_constant("sumvarp", v)), src + ["threshold_scans/sumvarp"])
    phi2 = rep.put("phi2", _hull_max(a2, _scan_constant("Ss1", v)), src + ["threshold_scans/Ss1"])
    rep.put("phi1_analytic", a1, src)
    rep.put("phi2_analytic", a2, src)
    return phi1, phi2


def _parity_h2(I: Inputs) -> Interval:
    return I.lit("mobius_bounds", "Cc2") * I.cat("err_parity")


def _chi(I: Inputs, v: int, rep: ConstantsReport) -> tuple[Interval, Interval]:
    d = Fraction(1, 3)
    prod = I.cat("D_sum_half")
    err = delta_input(1, d) * I.cat("delta_sum_half")
    err2 = err * (1 + 1 / (1 - Interval.exact(d)))
    P = Interval.exact(5 * 10**8)
    Pd = pow_real(P, d)
    LP = iv_log(P)
    if v == 1:
        a1 = prod + err / Pd / LP
        a2 = prod + err2 / Pd
    else:
        F2 = ONE - 1 / (4 - 2 * SQRT2)
        two_d = pow_real(2, d)
        H2 = ONE + (4 - 4 * SQRT2 - two_d) / ((SQRT2 - 1) ** 2 * pow_real(2, 1 - d)
                                              + 2 * SQRT2 + two_d - 1)
        a1 = F2 * prod + H2 * err / Pd / LP
        a2 = F2 * prod + H2 * err2 / Pd
    src = ["D_sum_half", "delta_sum_half"]
    rep.put("chi1_analytic", a1, src)
    rep.put("chi2_analytic", a2, src)
    chi1 = rep.put("chi1", _hull_max(a1, _scan_constant("sum_half_threshold", v)),
                   src + ["threshold_scans/sum_half_threshold"])
    chi2 = rep.put("chi2", _hull_max(a2, _scan_constant("sum2_half_threshold", v)),
                   src + ["threshold_scans/sum2_half_threshold"])
    return chi1, chi2


def _two_theta_parts():
    th = theta()
    two_t = pow_real(2, th)
    return th, two_t


def _tau(I: Inputs, v: int, rep: ConstantsReport) -> Interval:
    th, two_t = _two_theta_parts()
    p2, p3 = I.cat("ss1log_prod2"), I.cat("ss1log_prod3")
    e = const_catalog("e")
    LPW = iv_log(Interval.exact(PW))
    k = 4 / e / LPW + 16 / (e * e) / (LPW * LPW)
    if v == 1:
        val = p2 + k * p3
    else:
        f22 = ONE - 1 / (pow_real(2, 2 - 2 * th) * (two_t - 1) ** 2 + 1)
        f23 = ONE - 1 / (pow_real(2, Fraction(3, 2) - 2 * th) * (two_t - 1) ** 2 + 1)
        val = f22 * p2 + k * f23 * p3
    return rep.put("tau", val, ["ss1log_prod2", "ss1log_prod3"])


def _xi(I: Inputs, v: int, c: int, rep: ConstantsReport | None = None) -> Interval:
    th, two_t = _two_theta_parts()
    s = SQRT2 - 1
    Cc1, Cc2 = I.lit("mobius_bounds", "Cc1"), I.lit("mobius_bounds", "Cc2")
    err = I.cat("err_ss2log")
    f2 = 1 / (pow_real(2, 1 - 2 * th) * (two_t - 1) ** 2)
    w1 = s / (s + abs(2 * f2 - 1)) * (Cc1 + Cc2 * abs(2 * f2 - 1) / s)
    j = (w1 if v == 1 else Cc2) * err
    kk = Fraction(1, 2)
    C = Interval.exact(c)
    P = Interval.exact(PW)
    LPW = iv_log(P)
    lll = iv_log(pow_real(P, 1 - CHOICE) / C)
    sq = iv_log(pow_real(P, 1 / kk - CHOICE) / C)
    W = (1 / iv_sqrt(C) / iv_sqrt(pow_real(P, CHOICE)) + 4 / (Interval.exact(kk) * sq)
         + 4 / (pow_real(C, kk / 2) * pow_real(P, kk / 2 * CHOICE) * lll))
    Y = j * W / lll / (Interval.exact(1 - CHOICE) - iv_log(C) / LPW)
    t = iv_log(C) / LPW + Interval.exact(CHOICE)
    prod = I.cat("J_ss2log")
    ssum = I.cat("ss2log_sum") + _gamma()
    if v == 1:
        X = prod * (1 / t + ssum / LPW)
    else:
        xx2 = ONE - 1 / (pow_real(2, 2 - 2 * th) * (two_t - 1) ** 2 + 2 * pow_real(2, 1 - th)
                         - pow_real(2, 1 - 2 * th) - 1)
        ss2 = iv_log(Interval.exact(2)) / (pow_real(2, 1 - 2 * th) * (two_t - 1) ** 2 + 1)
        yy2 = ONE + (pow_real(2, 2 * th) - 4 * two_t + 2) / (s * (two_t - 1) ** 2 + 2 * two_t - 1)
        Y = yy2 * Y
        X = xx2 * prod * (1 / t + (ssum + ss2) / LPW)
    val = X + Y
    if rep is not None:
        rep.put("xi", val, ["J_ss2log", "ss2log_sum", "err_ss2log"])
    return val


def _psi(I: Inputs, v: int, rep: ConstantsReport) -> Interval:
    d = Fraction(1, 3)
    L = iv_log(Interval.exact(10**7))
    ratio = zeta_ratio_three_halves()
    ssum = I.cat("sq_half_sum") + _gamma()
    err = delta_input(1, d) * I.cat("delta_sq_half")
    if v == 1:
        analytic = ratio * (Interval.exact("0.5") + ssum / L) + err / (L * L)
    else:
        kk2 = ONE - 3 / (4 - pow_real(2, Fraction(3, 2)) + SQRT2 + 1)
        ff2 = iv_log(Interval.exact(2)) / (3 - SQRT2)
        a = pow_real(2, 1 - d)
        b = pow_real(2, Fraction(1, 2) - d)
        ll2 = ONE + (a - 2 * b - 1) / (pow_real(2, 2 - 2 * d) - pow_real(2, Fraction(3, 2) - 2 * d) + b)
        analytic = kk2 * ratio * (Interval.exact("0.5") + (ssum + ff2) / L) + ll2 * err / (L * L)
    rep.put("psi_analytic", analytic, ["sq_half_sum", "delta_sq_half", "zeta"])
    return rep.put("psi", _hull_max(analytic, _scan_constant("sq_half", v)),
                   ["psi_analytic", "threshold_scans/sq_half"])


class _Both:
    """Per-modulus values needed across moduli (T1 and Υ1 mix v = 1 and v = 2)."""

    def __init__(self, I: Inputs):
        self.I = I
        self._cache: dict[tuple[str, int], Interval] = {}

    def get(self, name: str, v: int) -> Interval:
        key = (name, v)
        if key not in self._cache:
            scratch = ConstantsReport(v, "-", 0)
            fn = {"eta": _eta, "psi": _psi}[name]
            self._cache[key] = fn(self.I, v, scratch)
        return self._cache[key]


# assembly -----------------------------------------------------------------

def assemble(v: int, regime: str = "1e12.5", c: int = 16, cutoff: int | None = None,
             integral: Interval | None = None, integral_cap: int = 10**6) -> ConstantsReport:
    """All lemma constants for modulus v, regime ``U >= 10^E`` and ``Z = c U^{2/3}``.

    ``cutoff`` is the prime cutoff for the catalog products. ``integral`` may
    supply ∫_1^{integral_cap} h_v/s from a long sweep; otherwise a sweep up to
    ``integral_cap`` is run.
    """
    if v not in (1, 2):
        raise DomainError("v must be 1 or 2")
    check_admissible(regime, c)
    I = Inputs(cutoff)
    both = _Both(I)
    rep = ConstantsReport(v, regime, c)
    ram, ram2 = I.lit("mobius_bounds", "ram"), I.lit("mobius_bounds", "ram_v2")
    Cc1, Cc2 = I.lit("mobius_bounds", "Cc1"), I.lit("mobius_bounds", "Cc2")
    n389 = I.lit("mobius_bounds", "checkcheck_large")
    th, two_t = _two_theta_parts()

    eta = _eta(I, v, rep)
    eta2 = both.get("eta", 2)
    up1 = 2 * ram * ram2 * eta2 + (2 * ram * eta2 if v == 1 else 0)
    rep.put("Upsilon1", up1, ["eta_2", "mobius_bounds/ram", "mobius_bounds/ram_v2"])

    phi1, phi2 = _phi_constants(I, v, rep)
    rep.put("Upsilon3", phi1 * phi2 * (4 if v == 2 else 1), ["phi1", "phi2"])

    h2 = _parity_h2(I)
    twin = I.cat("twin_inverse")
    up2 = twin * SQRT2 * h2 if v == 1 else 4 * twin * h2
    rep.put("Upsilon2", up2, ["twin_inverse", "err_parity", "mobius_bounds/Cc2"])

    chi1, chi2 = _chi(I, v, rep)
    tau = _tau(I, v, rep)
    xi = _xi(I, v, c, rep)
    s = SQRT2 - 1
    if v == 1:
        chichi = chi1 * chi2
        omega = 1 / chichi
        local2 = ONE
    else:
        chichi = chi1 * chi2 * 2 / (s * s)
        omega = (s * s) / (chi1 * chi2 * 4)
        local2 = pow_real(2, 2 * th) / (two_t - 1) ** 2
    rep.put("omega", omega, ["chi1", "chi2"])
    rep.put("Upsilon4", (1 + omega) * chichi, ["omega", "chi1", "chi2"])
    rep.put("Upsilon5", (1 + 1 / omega) / (n389 * n389) * tau * xi * local2,
            ["omega", "tau", "xi", "mobius_bounds/checkcheck_large"])

    psi = _psi(I, v, rep)
    psi1, psi2 = both.get("psi", 1), both.get("psi", 2)
    if v == 1:
        coeff = 2 * Cc2 / Cc1 / SQRT2 / s
        T1 = 2 * Cc1 * (coeff + 1) * (psi1 * psi2 + psi1 * psi1)
    else:
        T1 = 2 * Cc2 * SQRT2 / s * psi2 * psi2
    rep.put("T1", T1, ["psi_1", "psi_2", "mobius_bounds/Cc1", "mobius_bounds/Cc2"])
    kb = kernel_bounds(v)
    rep.put("T2", kb.T2, ["kernel_bounds"])
    rep.put("T3", kb.T3, ["kernel_bounds"])
    rep.put("T4", kb.T4, ["kernel_bounds"])
    rep.put("Psi", kb.Psi, ["kernel_bounds"])

    sv = sv_constant(v, integral_cap, integral)
    rep.put("s_v", sv, ["hq_integral", "hq_tail_bound"])

    E = REGIMES[regime]
    U0 = _ten_pow(E)
    rep.put("Xi_bound", _definitive(rep, U0, v, c), ["T1", "Upsilon1..5", "Psi", "T4"])
    if regime == "1e7":
        m1, m2, ml = _merged(rep, v, c)
        rep.put("Merge_log4", m1 + m2, ["T1", "Upsilon1..4", "Psi"])
        rep.put("Merge_log", ml, ["T4", "Upsilon5"])
    else:
        windows = monotonicity_windows(c, E)
        bad = [k for k, ok in windows.items() if not ok]
        if bad:
            raise ConfigError(f"c = {c}: terms {bad} are not yet decreasing at U = 10^{float(E):g}")
        rep.put("K", rep["Xi_bound"] * iv_log(U0), ["Xi_bound"])
        if v == 2:
            bt = brun_titchmarsh(10**25, 1, c=c, report=rep)
            rep.put("iota", iota(), ["pi"])
            rep.put("Brun", bt.brun, ["s_v", "Xi_bound"])
            rep.put("BT_coefficient", bt.coefficient, ["Brun"])
    return rep


def monotonicity_windows(c: int, E) -> dict[str, bool]:
    """Check that each U-dependent term of the ten-term bound decreases from 10^E on.

    log^k(t/c^3) t^{-1/3} peaks at t = c^3 e^{3k}; log t / t^{1/3} at t = e^3.
    The log-order term is decreasing as soon as log U > log c^3.
    """
    U0 = _ten_pow(E)
    c3 = Interval.exact(c) ** 3
    out = {f"log^{k}(U/c^3)/U^(1/3)": (c3 * iv_exp(Interval.exact(3 * k))).hi <= U0.lo for k in (4, 2, 1)}
    out["log U/U^(1/3)"] = iv_exp(Interval.exact(3)).hi <= U0.lo
    out["1/((1-log c^3/log U) log U)"] = c3.hi < U0.lo
    return out


def merged_bound(rep: ConstantsReport, U) -> Interval:
    """Merged majorant Merge_log4 log^4 U / U^{1/3} + Merge_log / log U, valid for U >= 10^7."""
    U = _iv(U)
    if U.lo < 10**7:
        raise DomainError("the merged bound needs U >= 10^7")
    L = iv_log(U)
    return rep["Merge_log4"] * L ** 4 / pow_real(U, Fraction(1, 3)) + rep["Merge_log"] / L


def _vk(v: int) -> Interval:
    return Interval.exact(v) / kappa(v)


def _definitive(rep: ConstantsReport, U: Interval, v: int, c: int) -> Interval:
    """The ten-term majorant of |Ξ_v(U)| with Z = c U^{2/3}."""
    C = Interval.exact(c)
    pi2 = _pi2()
    third = Interval.exact(Fraction(1, 3))
    Uc = pow_real(U, Fraction(1, 3))            # U^{1/3} = U^{1-choice} = U^{choice/2}
    L = iv_log(U)
    Lz = iv_log(U / (C * C * C))                # log(U/c^3) = 3 log(U/Z)
    sc = iv_sqrt(C)
    vk = _vk(v)
    T1, U1, U2, U3, U4, U5 = (rep[k] for k in ("T1", "Upsilon1", "Upsilon2", "Upsilon3",
                                              "Upsilon4", "Upsilon5"))
    Psi, T4 = rep["Psi"], rep["T4"]
    terms = [
        T1 * Lz ** 4 / (81 * sc * Uc),
        2 * U1 * Lz ** 2 / (9 * sc * Uc),
        2 * C * Psi / pi2 * Lz / Uc,                # no v/κ(v) saving on this term
        U4 * L / (3 * Uc),
        6 * C * Psi * vk / (pi2 * Uc),
        U2 / (sc * Uc),
        C * U3 / Uc,
        U4 / Uc,
        36 * T4 * vk / (pi2 * (1 - iv_log(C * C * C) / L)) / L,
    ]
    if U.lo >= PW:
        terms.append(U5 / L)
    elif U.hi >= PW:
        terms.append(Interval(0.0, (U5 / L).hi))
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return total


def _merged(rep: ConstantsReport, v: int, c: int) -> tuple[Interval, Interval, Interval]:
    """Coefficients of log^4 U / U^{1/3} and 1/log U valid for U >= 10^7."""
    C = Interval.exact(c)
    pi2 = _pi2()
    D = iv_log(Interval.exact(10**7))
    third = Interval.exact(Fraction(1, 3))
    sc = iv_sqrt(C)
    vk = _vk(v)
    Psi = rep["Psi"]
    m1 = (rep["T1"] * third ** 4 / sc + 2 * rep["Upsilon1"] * third ** 2 / sc / D ** 2
          + 6 * third * C * Psi / pi2 / D ** 3 * vk * 1 + third * rep["Upsilon4"] / D ** 3)
    m2 = (6 / pi2 * C * Psi * vk + rep["Upsilon2"] / sc + C * rep["Upsilon3"] + rep["Upsilon4"]) / D ** 4
    ml = 12 * rep["T4"] / (third - iv_log(C) / D) / pi2 * vk + rep["Upsilon5"]
    return m1, m2, ml


def xi_bound(U, v: int, c: int, cutoff: int | None = None,
             report: ConstantsReport | None = None) -> Interval:
    """Upper bound on |Ξ_v(U)| for U >= 10^7 (upper endpoint is the bound)."""
    U = Interval.coerce(U) if not isinstance(U, (str, Fraction)) else Interval.exact(U)
    if U.lo < 10**7:
        raise DomainError("the Ξ bound needs U >= 10^7")
    regime = "1e12.5" if U.lo >= _ten_pow(Fraction(25, 2)).hi else "1e7"
    rep = report if report is not None else assemble(v, regime, c, cutoff)
    return _definitive(rep, U, v, c)


def iota() -> Interval:
    return 2 * (1 - 4 / _pi2())


@dataclass(frozen=True)
class BrunTitchmarsh:
    Y: Interval
    q: int
    brun: Interval
    coefficient: Interval
    bound: Interval
    xi2: Interval
    s2: Interval

    def to_json(self) -> dict:
        return {"Y": self.Y.to_json(), "q": self.q, "Brun": self.brun.to_json(),
                "coefficient": self.coefficient.to_json(), "bound": self.bound.to_json(),
                "Xi2": self.xi2.to_json(), "s2": self.s2.to_json(), "inputs_sha256": inputs_hash()}


def brun_titchmarsh(Y, q: int = 1, c: int = 16, cutoff: int | None = None,
                    report: ConstantsReport | None = None) -> BrunTitchmarsh:
    """Explicit second-order constant 𝔅 with π(X+Y;q,a) - π(X;q,a) <= 2Y/(φ(q)L)(1 - 𝔅/L), L = log(Y/q)."""
    Y = Interval.exact(Y) if isinstance(Y, (str, int, Fraction)) else Interval.coerce(Y)
    if q < 1:
        raise DomainError("q must be a positive integer")
    if Y.hi < Interval.exact(10**25 * q).lo:
        raise DomainError("the explicit bound needs Y >= 10^25 q")
    rep = report if report is not None else assemble(2, "1e12.5", c, cutoff)
    E = Fraction(25)
    YE = _ten_pow(E)
    xi2 = rep["Xi_bound"]
    s2 = rep["s_v"]
    four_pi = 4 / _pi2()
    brun = 4 * (-Interval(s2.lo, s2.lo) / 2 + Interval(xi2.hi, xi2.hi) / 2
                + 4 * (four_pi + iota() / pow_real(YE, Fraction(1, 4))) ** 2)
    constantprime = (brun + iv_log(YE) ** 2 / iv_sqrt(YE)) / 2
    coeff = -constantprime
    L = iv_log(Y / q)
    bound = 2 * Y / (euler_phi(q) * L) * (1 - coeff / L)
    return BrunTitchmarsh(Y, q, brun, coeff, bound, xi2, s2)


def log_integral_bound(Z, X, m, n) -> Interval:
    """∫_1^Z du/(u^m log^n(X/u)): exact for m = 1, an upper bound [0, b] for m > 1, n > 0."""
    Z, X = _iv(Z), _iv(X)
    m, n = Fraction(m), Fraction(n)
    if m < 1 or Z.lo < 1 or Z.hi >= X.lo:
        raise DomainError("need m >= 1 and 1 <= Z < X")
    if Z.hi == 1:
        return Interval(0.0, 0.0)
    LX = iv_log(X)
    LXZ = iv_log(X / Z)
    if m == 1:
        if n == 1:
            return iv_log(LX / LXZ)
        k = n - 1
        return (1 / pow_real(LXZ, k) - 1 / pow_real(LX, k)) / Interval.exact(k)
    if n <= 0:
        raise DomainError("the m > 1 bound needs n > 0")
    rz = iv_sqrt(Z)
    b = (1 / pow_real(iv_log(X / rz), n) + 1 / (pow_real(LXZ, n) * pow_real(rz, m - 1))) / Interval.exact(m - 1)
    return Interval(0.0, b.hi)
