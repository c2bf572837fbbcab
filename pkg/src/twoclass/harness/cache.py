"""Class-number memo persisted as JSON lines.

The first line is a header carrying the format version; every following line
is one entry with large integers written as decimal strings.  The cache is a
pure memo: entries can always be recomputed and must agree when they are.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass

from ..quadratic import ClassData, PellSolution, class_data, fundamental_unit

log = logging.getLogger(__name__)

FORMAT = "twoclass-cache"
VERSION = 1


class CacheVersionError(ValueError):
    pass


@dataclass(frozen=True)
class CacheEntry:
    d: int
    h_wide: int
    h_narrow: int
    h2: int
    m: int
    pell: PellSolution | None = None

    @classmethod
    def compute(cls, d: int) -> "CacheEntry":
        cd = class_data(d)
        return cls.from_class_data(cd, fundamental_unit(d) if d > 1 else None)

    @classmethod
    def from_class_data(cls, cd: ClassData, pell: PellSolution | None = None) -> "CacheEntry":
        return cls(cd.d, cd.h_wide, cd.h_narrow, cd.h2, cd.m, pell)

    def to_class_data(self, disc: int) -> ClassData:
        return ClassData(self.d, disc, self.h_wide, self.h_narrow, self.h2, self.m)

    def to_json(self) -> dict:
        out = {
            "d": str(self.d),
            "h_wide": str(self.h_wide),
            "h_narrow": str(self.h_narrow),
            "h2": str(self.h2),
            "m": str(self.m),
        }
        if self.pell is not None:
            p = self.pell
            out["pell"] = {"x_num": str(p.x_num), "y_num": str(p.y_num),
                           "denom": str(p.denom), "norm": str(p.norm)}
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "CacheEntry":
        d = int(obj["d"])
        pell = None
        if obj.get("pell") is not None:
            p = obj["pell"]
            pell = PellSolution(d, int(p["x_num"]), int(p["y_num"]), int(p["denom"]), int(p["norm"]))
            if not pell.check():
                raise ValueError(f"cached unit for d={d} fails its norm equation")
        return cls(d, int(obj["h_wide"]), int(obj["h_narrow"]), int(obj["h2"]), int(obj["m"]), pell)


class CacheMap(dict):
    """``d -> CacheEntry`` with a count of skipped corrupt lines."""

    def __init__(self, *args, warnings: int = 0, **kwargs):
        super().__init__(*args, **kwargs)
        self.warnings = warnings


def cache_load(path: str | os.PathLike) -> CacheMap:
    out = CacheMap()
    if not os.path.exists(path):
        return out
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        return out
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError:
        header = None
    if not isinstance(header, dict) or header.get("format") != FORMAT:
        raise CacheVersionError(f"{path}: missing cache header")
    if header.get("version") != VERSION:
        raise CacheVersionError(f"{path}: cache version {header.get('version')} != {VERSION}")
    for ln in lines[1:]:
        try:
            entry = CacheEntry.from_json(json.loads(ln))
        except (ValueError, KeyError, TypeError) as exc:
            out.warnings += 1
            log.warning("skipping corrupt cache line: %s", exc)
            continue
        out[entry.d] = entry
    return out


def cache_store(path: str | os.PathLike, entries: dict[int, CacheEntry]) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"format": FORMAT, "version": VERSION}) + "\n")
        for d in sorted(entries):
            fh.write(json.dumps(entries[d].to_json(), sort_keys=True) + "\n")
    os.replace(tmp, path)


# process-wide memo used by the scans; seeded from a cache file when given
_memo: dict[int, CacheEntry] = {}
_fresh: dict[int, CacheEntry] = {}


def seed(entries: dict[int, CacheEntry]) -> None:
    _memo.clear()
    _memo.update(entries)
    _fresh.clear()


def lookup(d: int) -> CacheEntry:
    e = _memo.get(d)
    if e is None:
        e = CacheEntry.from_class_data(class_data(d))
        _memo[d] = e
        _fresh[d] = e
    return e


def h2(d: int) -> int:
    return lookup(d).h2


def drain_fresh() -> dict[int, CacheEntry]:
    out = dict(_fresh)
    _fresh.clear()
    return out


def verify(entries: dict[int, CacheEntry]) -> list[int]:
    """Recompute every entry; return the d values whose cached data disagree."""
    bad = []
    for d, e in entries.items():
        ref = CacheEntry.from_class_data(class_data(d))
        same = (ref.h_wide, ref.h_narrow, ref.h2, ref.m) == (e.h_wide, e.h_narrow, e.h2, e.m)
        if e.pell is not None and e.pell != fundamental_unit(d):
            same = False
        if not same:
            bad.append(d)
    return bad
