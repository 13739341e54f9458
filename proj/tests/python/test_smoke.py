import hashlib
import json
import math
import os
import subprocess

import pytest

import dfindex


def blob(data):
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def test_zoo_ids():
    ids = dfindex.zoo_ids()
    for name in ("ball", "worm"):
        assert name in ids


def test_blob_hash_matches_hashlib():
    for data in (b"", b"hello\n", bytes(range(256))):
        assert dfindex.git_blob_sha1(data) == blob(data)


def test_ball_levi_and_distance():
    d = dfindex.levi_at("ball", [1.0, 0.0, 0.0, 0.0])
    assert d["min"] == pytest.approx(0.5, abs=1e-6)
    assert dfindex.signed_distance("ball", [0.5, 0.0, 0.0, 0.0]) == pytest.approx(-0.5, abs=1e-9)


def test_worm_period():
    v = dfindex.periods("worm")
    assert v["classification"] == "Obstructed"
    assert v["periods"]["core"] == pytest.approx(-math.pi, rel=1e-2)


def test_ball_sigma_empty():
    s = dfindex.sigma_summary("ball", mesh=800)
    assert s["members"] == 0
    assert s["kind"] == "Empty"


def test_estimate_ball():
    c = dfindex.estimate("ball", etas=[0.5], mesh=600)
    assert c["has_certificate"]
    assert c["bound"] == pytest.approx(0.5)


def test_errors_carry_kind():
    with pytest.raises(dfindex.DfindexError) as e:
        dfindex.periods("bogus")
    assert e.value.kind == "ConfigInvalid"
    with pytest.raises(dfindex.DfindexError) as e:
        dfindex.sigma_summary("worm", params={"beta": 0.1})
    assert e.value.kind == "BetaTooSmall"


def test_inprocess_cli():
    code, report = dfindex.run("period", "--domain", "worm")
    assert code == 0
    assert report["verdict"]["classification"] == "Obstructed"
    code, report = dfindex.run("certify", "--domain", "bogus")
    assert code == 1
    assert report["error"]["kind"] == "ConfigInvalid"


CLI = os.environ.get("DFINDEX_CLI")


@pytest.mark.skipif(not CLI, reason="DFINDEX_CLI not set")
def test_cli_subprocess(tmp_path):
    r = subprocess.run([CLI, "period", "--domain", "worm"], capture_output=True, text=True)
    assert r.returncode == 0
    code, report = dfindex.run("period", "--domain", "worm")
    assert json.loads(r.stdout) == report

    cfg = tmp_path / "run.txt"
    cfg.write_bytes(b"domain=worm\n")
    r = subprocess.run([CLI, "period", "--config", str(cfg)], capture_output=True, text=True)
    out = json.loads(r.stdout)
    assert out["config_hash"] == blob(cfg.read_bytes())
    assert out["config_hash_source"] == "file"

    r = subprocess.run([CLI, "certify", "--domain", "worm"], capture_output=True, text=True)
    assert r.returncode == 2
