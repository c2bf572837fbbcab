import json

import pytest

from twoclass.harness import cache
from twoclass.harness.cache import CacheEntry, CacheVersionError, cache_load, cache_store
from twoclass.harness.render import report_render
from twoclass.harness.scans import LEMMAS, LemmaReport, run_scan
from twoclass.quadratic import class_data, fundamental_unit
from twoclass.tower import predict


def _strip(report):
    data = report.to_json()
    data.pop("wall_time")
    return data


def test_cache_round_trip(tmp_path):
    path = tmp_path / "c.jsonl"
    entries = {-66: CacheEntry.compute(-66), 151: CacheEntry.compute(151)}
    cache_store(path, entries)
    loaded = cache_load(path)
    assert dict(loaded) == entries
    assert loaded.warnings == 0
    assert loaded[151].pell == fundamental_unit(151)
    assert cache.verify(loaded) == []


def test_cache_empty_and_missing(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    assert cache_load(path) == {}
    assert cache_load(tmp_path / "absent.jsonl") == {}


def test_cache_skips_corrupt_line(tmp_path):
    path = tmp_path / "c.jsonl"
    cache_store(path, {d: CacheEntry.compute(d) for d in (-66, 33, 6)})
    lines = path.read_text().splitlines()
    lines[2] = "{not json"
    path.write_text("\n".join(lines) + "\n")
    loaded = cache_load(path)
    assert len(loaded) == 2
    assert loaded.warnings == 1


def test_cache_rejects_bad_unit(tmp_path):
    path = tmp_path / "c.jsonl"
    cache_store(path, {33: CacheEntry.compute(33)})
    text = path.read_text().replace('"x_num": "23"', '"x_num": "24"')
    path.write_text(text)
    assert cache_load(path).warnings == 1


def test_cache_version_mismatch(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(json.dumps({"format": "twoclass-cache", "version": 99}) + "\n")
    with pytest.raises(CacheVersionError):
        cache_load(path)


def test_cache_detects_tampering():
    cd = class_data(-66)
    bad = CacheEntry(cd.d, cd.h_wide, cd.h_narrow, 4, 2)
    assert cache.verify({-66: bad}) == [-66]


def test_quad_table_example():
    r = run_scan("quad_table", 100, 1)
    assert r.tested_for("h2(-2q)=2") == 7
    assert r.breakdown["h2(-2q)=2"] == [7, 7]
    assert r.ok and r.passed == r.tested and r.unknown == 0


def test_decompositions_parallel():
    r = run_scan("decompositions", 50, 4)
    assert r.ok and r.tested > 0
    assert _strip(r) == _strip(run_scan("decompositions", 50, 1))


def test_splitting_scan():
    r = run_scan("splitting", 100, 1)
    assert r.ok
    assert r.tested_for("count_full=2") == 7 * 10


@pytest.mark.parametrize("lemma", LEMMAS)
def test_every_scan_passes_small(lemma):
    r = run_scan(lemma, 50, 1)
    assert r.ok, r.failures[:3]
    assert r.passed + len(r.failures) == r.tested


def test_scan_cache_transparency(tmp_path):
    path = str(tmp_path / "c.jsonl")
    cold = run_scan("quad_table", 60, 1, path)
    stored = cache_load(path)
    assert len(stored) > 0
    warm = run_scan("quad_table", 60, 2, path)
    assert _strip(cold) == _strip(warm)
    assert cache.verify(stored) == []


def test_scan_determinism():
    a = report_render(_Rep(run_scan("kuroda_K", 60, 1)), "json")
    b = report_render(_Rep(run_scan("kuroda_K", 60, 3)), "json")
    assert a == b


class _Rep:
    def __init__(self, r):
        self.r = r

    def to_json(self):
        return _strip(self.r)


def test_scan_rejects_unknown_lemma():
    with pytest.raises(ValueError):
        run_scan("nope", 10, 1)


def test_render_examples():
    data = json.loads(report_render(predict(33, 1), "json"))
    assert data["cl2_type"] == ["2", "4"]
    empty = report_render(LemmaReport("kida", 2), "table")
    assert len(empty.splitlines()) == 1
    assert empty.split() == ["check", "tested", "passed", "failed"]
    data = json.loads(report_render(run_scan("kida", 30, 1), "json"))
    assert data["failures"] == []
    with pytest.raises(ValueError):
        report_render(LemmaReport("kida", 2), "xml")


def test_render_big_integers_as_strings():
    data = json.loads(report_render(class_data(-66), "json"))
    assert data["h_wide"] == "8" and data["disc"] == "-264"
