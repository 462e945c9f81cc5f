"""Desk-scale regression table behind ``selbergconst verify --suite desk``.

Every row is cheap (seconds) and compares an enclosure against a stored
reference interval or an exact closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .euler import CATALOG, eval_catalog, zeta_point
from .inputs import literal, reference_interval, table
from .interval import Interval, const_catalog, iv_log
from .kernel import hq_eval, hq_integral
from .mobius import threshold_scan
from .pipeline import assemble, brun_titchmarsh
from .sigma import residual_check, sigma_value


@dataclass(frozen=True)
class Row:
    name: str
    passed: bool
    detail: str

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "detail": self.detail}


def _meets(x: Interval, y: Interval) -> bool:
    return x.lo <= y.hi and y.lo <= x.hi


def _catalog_rows() -> list[Row]:
    refs = table()["reference_intervals"]
    rows = []
    for id in CATALOG:
        if id not in refs:
            continue
        got = eval_catalog(id).total
        rows.append(Row(f"catalog {id}", _meets(got, reference_interval(id)), repr(got)))
    got = eval_catalog("delta_sum_half").total
    ref = reference_interval("delta_sum_half_factor1") * reference_interval("delta_sum_half_factor2")
    rows.append(Row("catalog delta_sum_half", _meets(got, ref), repr(got)))
    got = eval_catalog("Delta_alpha_half").total / zeta_point(Fraction(3, 2))
    rows.append(Row("catalog Delta_alpha_half / zeta(3/2)",
                    _meets(got, reference_interval("Delta_alpha_half_ratio")), repr(got)))
    return rows


def _kernel_rows() -> list[Row]:
    whole = hq_integral(10**6, 1)
    left = hq_integral(1000, 1)
    right = hq_integral(10**6, 1, a=1000.0)
    zeta2 = const_catalog("pi2") / 6
    h1 = hq_eval(1, 1)
    return [
        Row("hq additivity at 10^6", _meets(whole, left + right), f"{whole!r} vs {left + right!r}"),
        Row("hq_eval(1, 1) contains zeta(2)", h1.lo <= zeta2.lo and zeta2.hi <= h1.hi, repr(h1)),
    ]


def _sigma_rows() -> list[Row]:
    rows = []
    s2 = sigma_value(2, 1)
    l2 = iv_log(Interval.exact(2)) ** 2
    rows.append(Row("sigma(2, 1) contains log^2 2", _meets(s2, l2), repr(s2)))
    for U in (10, 100, 1000):
        for v in (1, 2):
            a = sigma_value(U, v, "pairwise")
            b = sigma_value(U, v, "decomposition")
            rows.append(Row(f"sigma methods agree U={U} v={v}", _meets(a, b), f"{a!r} vs {b!r}"))
    for U in (10.0, 1000.0, 10**4):
        for v in (1, 2):
            r = residual_check(U, v)
            rows.append(Row(f"sigma residual U={U:g} v={v}", r["pass"], repr(r["residual"])))
    return rows


def _scan_rows() -> list[Row]:
    rows = []
    for name, (lo, _) in table()["scan_ranges"].items():
        for v in (1, 2):
            got = threshold_scan(name, v, float(lo), 10**6)
            ref = literal("threshold_scans", name, str(v))
            rows.append(Row(f"scan {name} v={v} over [{lo}, 1e6]", got.hi <= ref.hi, repr(got)))
    return rows


def _pipeline_rows() -> list[Row]:
    rep = assemble(2, "1e7", 10)
    eta2 = literal("threshold_scans", "sumvar1log", "2")
    expect = 2 * literal("mobius_bounds", "ram") * literal("mobius_bounds", "ram_v2") * eta2
    rows = [Row("Upsilon1_2 = 2 ram ram_2 eta_2", _meets(rep["Upsilon1"], expect), repr(rep["Upsilon1"]))]
    num = assemble(2, "1e12.5", 16)
    K = num["K"]
    rows.append(Row("K_2 finite and positive", math.isfinite(K.hi) and K.lo > 0, repr(K)))
    bt = brun_titchmarsh(10**25, 1, report=num)
    rows.append(Row("Brun-Titchmarsh coefficient positive", bt.coefficient.lo > 0, repr(bt.coefficient)))
    return rows


SUITES: dict[str, list[Callable[[], list[Row]]]] = {
    "desk": [_catalog_rows, _kernel_rows, _sigma_rows, _scan_rows, _pipeline_rows],
    "quick": [_kernel_rows, _sigma_rows],
}


def run_suite(name: str) -> list[Row]:
    rows: list[Row] = []
    for block in SUITES[name]:
        rows.extend(block())
    return rows
