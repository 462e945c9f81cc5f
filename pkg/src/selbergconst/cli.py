"""Command-line entry point.

Exit codes: 0 success, 1 failed verification, 2 domain or configuration
error, 3 resource limit, 64 usage error. Heavy modules are imported lazily so
``SELBERGCONST_CACHE_DIR`` can redirect the numba cache before compilation.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from . import __version__
from .errors import ConfigError, DomainError, ResourceError, SelbergError, UnknownIdError

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_RESOURCE, EXIT_USAGE = 0, 1, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _number(text: str):
    """Exact parse of a decimal literal: integers stay integers, other values become Fractions."""
    try:
        q = Fraction(Decimal(text))
    except (InvalidOperation, ValueError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return int(q) if q.denominator == 1 else q


def _real(text: str) -> float:
    return float(_number(text))


def _range(text: str) -> tuple[float, float]:
    try:
        a, b = text.split(":")
        return _real(a), _real(b)
    except ValueError:
        raise argparse.ArgumentTypeError("range must look like a:b") from None


def _header(args) -> dict:
    from .inputs import inputs_hash
    config = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in vars(args).items()
              if k not in ("func",)}
    return {"version": __version__, "inputs_sha256": inputs_hash(), "config": config,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}


def _emit(args, payload: dict) -> None:
    if args.format == "json":
        print(json.dumps({**payload, "run": _header(args)}, indent=2, ensure_ascii=False))
    else:
        for k, v in payload.items():
            print(f"{k}: {v}")


def _csv(rows, header) -> None:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _iv(x) -> dict:
    return {"lo": x.lo, "hi": x.hi}


# handlers -----------------------------------------------------------------

def cmd_constant(args) -> int:
    from .euler import eval_catalog
    tb = eval_catalog(args.id, args.cutoff)
    _emit(args, tb.to_json())
    return EXIT_OK


def cmd_sum(args) -> int:
    from .mobius import get_spec, normalized_value, weighted_sum
    spec = get_spec(args.spec)
    raw = weighted_sum(spec, args.X, args.q)
    norm = normalized_value(spec, args.X, args.q)
    if args.format == "csv":
        _csv([[repr(args.X), raw.lo, raw.hi, norm.lo, norm.hi]], ["X", "lo", "hi", "normalized_lo", "normalized_hi"])
    else:
        _emit(args, {"spec": spec.id, "X": args.X, "q": args.q, **_iv(raw),
                     "normalized": _iv(norm)})
    return EXIT_OK


def cmd_scan(args) -> int:
    from .mobius import threshold_scan
    a, b = args.range
    if args.blocks < 1:
        raise DomainError("--blocks must be positive")
    edges = [a * (b / a) ** (i / args.blocks) for i in range(args.blocks + 1)]
    edges[0], edges[-1] = a, b
    rows = []
    for lo, hi in zip(edges, edges[1:]):
        r = threshold_scan(args.spec, args.q, lo, hi)
        rows.append([repr(lo), repr(hi), r.lo, r.hi])
    if args.format == "json":
        _emit(args, {"spec": args.spec, "q": args.q,
                     "blocks": [{"X_from": float(r[0]), "X_to": float(r[1]), "lo": r[2], "hi": r[3]}
                                for r in rows],
                     "sup_upper": max(r[3] for r in rows)})
    else:
        _csv(rows, ["X_from", "X_to", "lo", "hi"])
    return EXIT_OK


def cmd_hq(args) -> int:
    from .kernel import hq_eval, hq_integral_run
    if args.action == "integral":
        res = hq_integral_run(args.X, args.v, args.a, checkpoint=args.checkpoint,
                              max_events=args.max_events)
        _emit(args, res.to_json())
    else:
        val = hq_eval(args.s, args.v, args.method)
        _emit(args, {"s": args.s, "q": args.v, "method": args.method, **_iv(val)})
    return EXIT_OK


def cmd_sigma(args) -> int:
    from .sigma import residual_check, sigma_direct
    if args.mode == "sweep":
        if args.points < 2 or not 1 < args.start < args.stop:
            raise DomainError("sweep needs --points >= 2 and 1 < --from < --to")
        rows = []
        ok = True
        for i in range(args.points):
            U = args.start * (args.stop / args.start) ** (i / (args.points - 1))
            r = residual_check(U, args.v)
            ok &= r["pass"]
            rows.append([repr(U), r["residual"].lo, r["residual"].hi, r["bound"].lo, r["pass"]])
        _csv(rows, ["U", "residual_lo", "residual_hi", "bound", "pass"])
        return EXIT_OK if ok else EXIT_FAIL
    if args.U is None:
        raise UsageError("sigma needs --U (or the sweep mode)")
    res = sigma_direct(args.U, args.v, args.method)
    payload = res.to_json()
    if args.residual:
        r = residual_check(args.U, args.v)
        payload.update(bound=r["bound"].lo, within_bound=r["pass"])
    _emit(args, payload)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    from .pipeline import assemble
    rep = assemble(args.v, args.regime, args.c, args.cutoff, integral_cap=args.integral_cap)
    if args.format == "json":
        _emit(args, rep.to_json())
    else:
        for k, x in rep.entries.items():
            print(f"{k:>16} [{x.lo!r}, {x.hi!r}]")
    return EXIT_OK


def cmd_bt(args) -> int:
    from .pipeline import brun_titchmarsh
    bt = brun_titchmarsh(args.Y, args.q, c=args.c, cutoff=args.cutoff)
    _emit(args, bt.to_json())
    return EXIT_OK


def cmd_verify(args) -> int:
    from .desk import run_suite
    rows = run_suite(args.suite)
    failed = [r for r in rows if not r.passed]
    if args.format == "json":
        _emit(args, {"suite": args.suite, "rows": [r.to_json() for r in rows], "failed": len(failed)})
    else:
        for r in rows:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}  {r.detail}")
        print(f"{len(rows) - len(failed)}/{len(rows)} rows pass")
    return EXIT_FAIL if failed else EXIT_OK


# parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default=None)
    common.add_argument("--json", dest="format", action="store_const", const="json")
    common.add_argument("--threads", type=int, default=1, help="numba worker threads")

    p = _Parser(prog="selbergconst", description="Validated constants for a logarithmic Selberg sieve.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("constant", parents=[common], help="Euler product or prime sum from the catalog")
    s.add_argument("id")
    s.add_argument("--cutoff", type=int)
    s.set_defaults(func=cmd_constant, default_format="json")

    s = sub.add_parser("sum", parents=[common], help="weighted squarefree sum at one X")
    s.add_argument("spec")
    s.add_argument("--X", type=_real, required=True)
    s.add_argument("--q", type=int, default=1)
    s.set_defaults(func=cmd_sum, default_format="csv")

    s = sub.add_parser("scan", parents=[common], help="certified sup of a normalized sum over a range")
    s.add_argument("spec")
    s.add_argument("--range", type=_range, required=True, help="a:b")
    s.add_argument("--q", type=int, default=1)
    s.add_argument("--blocks", type=int, default=1, help="log-spaced sub-ranges, one row each")
    s.set_defaults(func=cmd_scan, default_format="csv")

    s = sub.add_parser("hq", parents=[common], help="kernel integral or point value")
    s.add_argument("action", choices=("integral", "eval"))
    s.add_argument("--X", type=_real, default=1e6)
    s.add_argument("--a", type=_real, default=1.0)
    s.add_argument("--s", type=_real, default=1.0)
    s.add_argument("--v", type=int, default=1)
    s.add_argument("--method", choices=("sweep", "direct"), default="sweep")
    s.add_argument("--checkpoint")
    s.add_argument("--max-events", type=int)
    s.set_defaults(func=cmd_hq, default_format="json")

    s = sub.add_parser("sigma", parents=[common], help="quadratic form and its residual")
    s.add_argument("mode", nargs="?", choices=("sweep",))
    s.add_argument("--U", type=_real)
    s.add_argument("--v", type=int, default=1)
    s.add_argument("--method", choices=("pairwise", "decomposition"), default="decomposition")
    s.add_argument("--residual", action="store_true")
    s.add_argument("--from", dest="start", type=_real, default=10.0)
    s.add_argument("--to", dest="stop", type=_real, default=1e5)
    s.add_argument("--points", type=int, default=200)
    s.set_defaults(func=cmd_sigma, default_format="json")

    s = sub.add_parser("pipeline", parents=[common], help="assemble every lemma constant")
    s.add_argument("--v", type=int, choices=(1, 2), default=2)
    s.add_argument("--regime", choices=("1e7", "1e12.5"), default="1e12.5")
    s.add_argument("--c", type=int, default=16)
    s.add_argument("--cutoff", type=int)
    s.add_argument("--integral-cap", type=int, default=10**6)
    s.set_defaults(func=cmd_pipeline, default_format="json")

    s = sub.add_parser("bt", parents=[common], help="explicit Brun-Titchmarsh coefficient")
    s.add_argument("--Y", type=_number, required=True)
    s.add_argument("--q", type=int, default=1)
    s.add_argument("--c", type=int, default=16)
    s.add_argument("--cutoff", type=int)
    s.set_defaults(func=cmd_bt, default_format="json")

    s = sub.add_parser("verify", parents=[common], help="run a regression table")
    s.add_argument("--suite", choices=("desk", "quick"), default="desk")
    s.set_defaults(func=cmd_verify, default_format="text")
    return p


def _configure(args) -> None:
    if args.threads < 1:
        raise UsageError("--threads must be positive")
    if args.threads > 1:
        import numba
        numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))


def main(argv: list[str] | None = None) -> int:
    cache = os.environ.get("SELBERGCONST_CACHE_DIR")
    if cache and "NUMBA_CACHE_DIR" not in os.environ:
        os.environ["NUMBA_CACHE_DIR"] = cache
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.format is None:
            args.format = args.default_format
        del args.default_format
        _configure(args)
        return args.func(args)
    except UsageError as exc:
        print(f"selbergconst: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ConfigError, UnknownIdError) as exc:
        print(f"selbergconst: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ResourceError as exc:
        print(f"selbergconst: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except SelbergError as exc:
        print(f"selbergconst: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
