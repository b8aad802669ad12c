import json
import subprocess
import sys
import warnings
from pathlib import Path

import pytest

from iwasawa import cache
from iwasawa.cli import run

DATA = Path(__file__).resolve().parents[1] / "demos" / "data"
LP = ["lp", "--p", "5", "--chi", "8:0,1", "--N", "16", "--M", "6", "--verify", "2"]


def test_lp_pass_and_schema(tmp_path):
    code, text = run(LP + ["--cache-dir", str(tmp_path)])
    rep = json.loads(text)
    assert code == 0 and rep["status"] == "PASS" and rep["schema_version"] == 1
    assert len(rep["result"]["verification"]) == 2


def test_lp_odd_character_is_error():
    code, text = run(["lp", "--p", "5", "--chi", "3:1", "--no-cache"])
    rep = json.loads(text)
    assert code == 2 and rep["status"] == "ERROR" and "NotTypeS" in rep["error"]


def test_euler_char_file():
    code, text = run(["euler-char", "--p", "5", "--module", str(DATA / "modules.json"), "--n", "4",
                      "--format", "human"])
    assert code == 0
    assert "OK" in text


def test_bockstein_files():
    code, text = run(["bockstein", "--complex", str(DATA / "complex_T_minus_p.json")])
    rep = json.loads(text)
    assert code == 0 and rep["status"] == "PASS"
    code, text = run(["bockstein", "--complex", str(DATA / "complex_T_squared.json")])
    assert code == 2 and json.loads(text)["status"] == "PARTIAL"


def test_ktheory_partial_and_csv(tmp_path):
    code, text = run(["ktheory", "--p", "5", "--chi", "8:0,1", "--n", "4", "--N", "16", "--M", "6",
                      "--no-cache", "--out-dir", str(tmp_path)])
    assert code == 2 and json.loads(text)["status"] == "PARTIAL"
    assert any(f.suffix == ".csv" for f in tmp_path.iterdir())
    code, text = run(["ktheory", "--p", "5", "--chi", "8:0,1", "--n", "4", "--N", "16", "--M", "6",
                      "--no-cache", "--format", "csv"])
    assert text.startswith("degree,group-label,order-exponent")


def test_selftest_deterministic():
    a = run(["selftest", "--seed", "3", "--scale", "0.2"])
    b = run(["selftest", "--seed", "3", "--scale", "0.2"])
    assert a == b and a[0] == 0


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "iwasawa", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip()


# -- cache


def test_cache_cold_warm_and_version(tmp_path):
    calls = []

    def producer():
        calls.append(1)
        return {"x": [1, 2, 3]}

    job = {"command": "t", "a": 1}
    a = cache.cache_get_or_compute(job, producer, tmp_path, version="1")
    b = cache.cache_get_or_compute(job, producer, tmp_path, version="1")
    assert a == b and len(calls) == 1
    old = cache.entry_path(cache.cache_key(job), tmp_path, "1")
    c = cache.cache_get_or_compute(job, producer, tmp_path, version="2")
    assert c == a and len(calls) == 2
    assert old.exists() and cache.entry_path(cache.cache_key(job), tmp_path, "2").exists()


def test_cache_corrupt_entry(tmp_path):
    job = {"command": "t"}
    cache.cache_get_or_compute(job, lambda: 1, tmp_path, version="1")
    path = cache.entry_path(cache.cache_key(job), tmp_path, "1")
    path.write_text("{not json")
    with pytest.warns(UserWarning):
        assert cache.cache_get_or_compute(job, lambda: 2, tmp_path, version="1") == 2
    assert json.loads(path.read_text())["payload"] == 2


def test_cli_cache_warm_identical(tmp_path):
    a = run(LP + ["--cache-dir", str(tmp_path)])
    assert list(tmp_path.rglob("*.json"))
    b = run(LP + ["--cache-dir", str(tmp_path)])
    c = run(LP + ["--no-cache"])
    assert a == b == c


def test_cache_key_is_order_independent():
    assert cache.cache_key({"a": 1, "b": 2}) == cache.cache_key({"b": 2, "a": 1})
