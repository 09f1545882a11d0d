import json
import shutil

import pytest

from majorana_u35 import cli


@pytest.fixture(scope="session")
def cache(tmp_path_factory):
    d = tmp_path_factory.mktemp("cache")
    assert cli.main(["build", "--cache", str(d), "--json", str(d.parent / "build1.json")]) == 0
    return d


def test_build_manifest(cache):
    report = json.loads((cache.parent / "build1.json").read_text())
    assert report["schema"] == cli.SCHEMA and report["passed"]
    assert report["cache_manifest"]["group_order"] == 126000
    assert set(report["cache_manifest"]["files"]) == {"aut.grp", "u35.grp", "labels.npz", "suborbits.json",
                                                      "hs_graph.json"}
    assert [c["criterion"] for c in report["checks"]] == [1, 2]


def test_warm_rebuild_is_identical(cache, tmp_path):
    manifest, built = cli.build_cache(cache)
    assert not built
    out = tmp_path / "build2.json"
    assert cli.main(["build", "--cache", str(cache), "--json", str(out)]) == 0
    assert out.read_bytes() == (cache.parent / "build1.json").read_bytes()


def test_corrupted_cache(cache, tmp_path):
    bad = tmp_path / "bad"
    shutil.copytree(cache, bad)
    blob = bytearray((bad / "u35.grp").read_bytes())
    blob[100] ^= 0xFF
    (bad / "u35.grp").write_bytes(bytes(blob))
    assert cli.main(["verify", "lemma15", "--cache", str(bad)]) == cli.EXIT_CACHE
    assert cli.main(["build", "--cache", str(bad)]) == cli.EXIT_CACHE


def test_missing_cache(tmp_path):
    assert cli.main(["verify", "shape", "--cache", str(tmp_path / "nowhere")]) == cli.EXIT_CACHE


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "everything"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "gram525", "--primes", "1048583,12"])
    assert exc.value.code == 2


def test_norton_sakuma_needs_no_cache(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["verify", "norton-sakuma", "--cache", str(tmp_path / "none"), "--json", str(a)]) == 0
    assert cli.main(["verify", "norton-sakuma", "--cache", str(tmp_path / "none"), "--json", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    report = json.loads(a.read_text())
    assert report["checks"][0]["criterion"] == 5


def test_report_byte_stable_with_cache(cache, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["verify", "lemma15", "--cache", str(cache), "--json", str(a)]) == 0
    assert cli.main(["verify", "lemma15", "--cache", str(cache), "--json", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert "timing" not in json.loads(a.read_text())


def test_timing_outside_hash(cache, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    cli.main(["verify", "lemma16", "--cache", str(cache), "--json", str(a)])
    cli.main(["verify", "lemma16", "--cache", str(cache), "--json", str(b), "--timing"])
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert "timing" in rb and ra["manifest_hash"] == rb["manifest_hash"]


def test_exit_code_follows_checks(cache, monkeypatch):
    failing = lambda s: [cli.Check(0, "forced", False)]
    monkeypatch.setitem(cli.SUITES, "lemma16", [failing])
    assert cli.main(["verify", "lemma16", "--cache", str(cache)]) == cli.EXIT_FAIL
    monkeypatch.setitem(cli.SUITES, "lemma16", [lambda s: [cli.Check(0, "forced", True)]])
    assert cli.main(["verify", "lemma16", "--cache", str(cache)]) == cli.EXIT_OK


def test_rationals_are_strings(cache, tmp_path):
    out = tmp_path / "r.json"
    assert cli.main(["verify", "resurrection", "--cache", str(cache), "--json", str(out)]) == 0
    rows = json.loads(out.read_text())["checks"][0]["witness"]["orbits"]
    assert len(rows) == 6 and {r["x"] for r in rows} == {"4/81"}
    assert cli.jsonable({"v": cli.Fraction(3)}) == {"v": "3/1"}


def test_all_covers_each_criterion_once():
    names = [fn.__name__ for fn in cli.ALL]
    assert len(names) == len(set(names)) == 16
    assert set(cli.SUITES) | {"all"} == set(cli.TARGETS)


def test_export(cache, tmp_path):
    out = tmp_path / "gram.txt"
    assert cli.main(["export", "--cache", str(cache), "--out", str(out)]) == 0
    man = json.loads((tmp_path / "gram.txt.json").read_text())
    assert man["dimension"] == 2275 and man["scale"] == 103680 and man["x"] == "4/81"
    first = out.read_text().splitlines()[0].split()
    assert first == ["0", "0", "103680"]
