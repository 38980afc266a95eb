"""
On-disk cache for exact coefficient tables.

One JSON file per ``(m, n, Kmax, schema)`` key. Writes go to a temporary
file in the same directory followed by ``os.replace``, so concurrent writers
race harmlessly and readers never see a partial file. Each payload carries a
SHA-256 of its canonical coefficient list; a mismatch is treated as a miss.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from fractions import Fraction
from pathlib import Path

__all__ = ["SCHEMA_VERSION", "TableCache", "default_cache_dir", "fraction_to_str", "str_to_fraction"]

SCHEMA_VERSION = 1
ENV_VAR = "ANHARMONIC_CACHE"

log = logging.getLogger(__name__)


def fraction_to_str(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def str_to_fraction(s: str) -> Fraction:
    return Fraction(s)


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "anharmonic"


def _digest(items: list[str]) -> str:
    return hashlib.sha256("\n".join(items).encode()).hexdigest()


class TableCache:
    """Cache implementing the ``load(m, n, kmax)`` / ``store(m, n, kmax, coeffs)`` protocol."""

    def __init__(self, directory: str | os.PathLike | None = None, schema: int = SCHEMA_VERSION):
        self.directory = Path(directory) if directory is not None else default_cache_dir()
        self.schema = schema

    def path(self, m: int, n: int, kmax: int) -> Path:
        return self.directory / f"rspt-m{m}-n{n}-K{kmax}-v{self.schema}.json"

    def load(self, m: int, n: int, kmax: int):
        p = self.path(m, n, kmax)
        try:
            payload = json.loads(p.read_text())
        except FileNotFoundError:
            return None
        except (OSError, ValueError) as exc:
            log.warning("unreadable cache entry %s (%s); recomputing", p, exc)
            return None
        items = payload.get("coeffs", [])
        if payload.get("schema") != self.schema or payload.get("sha256") != _digest(items):
            log.warning("cache entry %s failed validation; recomputing", p)
            return None
        return [str_to_fraction(s) for s in items]

    def store(self, m: int, n: int, kmax: int, coeffs) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        items = [fraction_to_str(c) for c in coeffs]
        payload = {"schema": self.schema, "m": m, "n": n, "kmax": kmax, "coeffs": items, "sha256": _digest(items)}
        target = self.path(m, n, kmax)
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=target.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(payload, fh, separators=(",", ":"))
            os.replace(tmp, target)
        except BaseException:
            try:
                os.unlink(tmp)
            except FileNotFoundError:
                pass
            raise
        return target
