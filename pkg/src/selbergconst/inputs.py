"""Imported numeric literals, loaded from ``data/inputs.json``.

Values are kept as decimal strings and turned into intervals on demand, so
a literal like ``0.493`` is enclosed exactly rather than rounded once.
"""

from __future__ import annotations

import hashlib
import json
from functools import lru_cache
from importlib import resources

from .errors import UnknownIdError
from .interval import Interval


@lru_cache(maxsize=1)
def _raw() -> bytes:
    return resources.files("selbergconst").joinpath("data/inputs.json").read_bytes()


@lru_cache(maxsize=1)
def table() -> dict:
    return json.loads(_raw())


def inputs_hash() -> str:
    """SHA-256 of the inputs file, embedded in every report."""
    return hashlib.sha256(_raw()).hexdigest()


def literal(*path: str) -> Interval:
    """Enclosure of the decimal literal at ``path`` (e.g. ``literal("kernel_bounds", "1", "T2")``)."""
    node = table()
    try:
        for key in path:
            node = node[key]
    except (KeyError, TypeError):
        raise UnknownIdError(f"no input literal at {'/'.join(path)}") from None
    if not isinstance(node, str):
        raise UnknownIdError(f"{'/'.join(path)} is not a literal")
    return Interval.exact(node)


def reference_interval(name: str) -> Interval:
    """Stored reference enclosure ``[lo, hi]`` used by regression checks."""
    try:
        lo, hi = table()["reference_intervals"][name]
    except KeyError:
        raise UnknownIdError(f"no reference interval {name!r}") from None
    return Interval(Interval.exact(lo).lo, Interval.exact(hi).hi)
