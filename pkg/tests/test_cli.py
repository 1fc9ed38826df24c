import json
import os

import pytest
from click.testing import CliRunner

from sl3cusp.cli import RunConfig, main, run_verification


def test_runconfig_validates_moduli():
    with pytest.raises(ValueError):
        RunConfig(moduli=(10,))
    with pytest.raises(ValueError):
        RunConfig(moduli=(2,))
    cfg = RunConfig()
    assert cfg.moduli == (12379, 31991, 13001)
    assert cfg.lmax == 47


def test_config_hash_sensitivity():
    assert RunConfig().hash() != RunConfig(lmax=37).hash()
    assert RunConfig().hash() == RunConfig().hash()


def test_dims_empty_range(tmp_path):
    runner = CliRunner()
    res = runner.invoke(
        main, ["dims", "--min", "24", "--max", "28", "--q", "12379",
               "--outdir", str(tmp_path)]
    )
    assert res.exit_code == 0, res.output
    assert res.output.strip().splitlines()[-1] == "p,q,dim"


def test_dims_small_range_and_resume(tmp_path):
    runner = CliRunner()
    args = ["dims", "--min", "50", "--max", "62", "--q", "12379",
            "--outdir", str(tmp_path)]
    res = runner.invoke(main, args)
    assert res.exit_code == 0, res.output
    lines = [l for l in res.output.strip().splitlines() if "," in l]
    assert "53,12379,2" in lines and "59,12379,0" in lines and "61,12379,2" in lines
    # artifacts exist and carry the config hash + seed
    rec = json.load(open(tmp_path / "dims" / "p53.json"))
    assert rec["dims"]["12379"] == 2
    assert "config_hash" in rec and "seed" in rec
    # idempotent resumption: artifact mtime unchanged on rerun
    mtime = os.path.getmtime(tmp_path / "dims" / "p53.json")
    res2 = runner.invoke(main, args)
    assert res2.exit_code == 0
    assert os.path.getmtime(tmp_path / "dims" / "p53.json") == mtime
    assert [l for l in res2.output.strip().splitlines() if "," in l] == lines


def test_dims_out_file(tmp_path):
    runner = CliRunner()
    out = tmp_path / "dims.csv"
    res = runner.invoke(
        main, ["dims", "--min", "53", "--max", "54", "--q", "12379",
               "--outdir", str(tmp_path), "--out", str(out)]
    )
    assert res.exit_code == 0, res.output
    assert out.read_text().strip().splitlines() == ["p,q,dim", "53,12379,2"]


def test_hecke_requires_dim_two(tmp_path):
    runner = CliRunner()
    res = runner.invoke(
        main, ["hecke", "--p", "59", "--q", "12379", "--outdir", str(tmp_path)]
    )
    assert res.exit_code != 0
    assert "dim U = 2" in res.output


def test_hecke_record_p53(tmp_path):
    runner = CliRunner()
    out = tmp_path / "p53.json"
    res = runner.invoke(
        main, ["hecke", "--p", "53", "--lmax", "3", "--q", "12379",
               "--outdir", str(tmp_path), "--out", str(out)]
    )
    assert res.exit_code == 0, res.output
    rec = json.loads(out.read_text())
    assert rec["p"] == 53 and rec["dim"] == 2 and rec["D"] == -11
    entries = {(e["l"], e["op"]): e for e in rec["entries"]}
    assert entries[(2, "E")]["lift"] == {"trace": -4, "const": 15}
    assert entries[(3, "E")]["lift"] == {"trace": -2, "const": 12}
    for e in rec["entries"]:
        assert e["status"] == "ok"
        a, b = e["eig"]["a"], e["eig"]["b"]
        assert a * a + 11 * b * b <= 9 * e["l"] ** 2
    assert {f["l"] for f in rec["local_factors"]} == {2, 3}
    # b > 0 at the reference prime
    ref = rec["reference_l"]
    assert entries[(ref, "E")]["eig"]["b"] > 0
    # cached record is reused verbatim
    res2 = runner.invoke(
        main, ["hecke", "--p", "53", "--lmax", "3", "--q", "12379",
               "--outdir", str(tmp_path)]
    )
    assert res2.exit_code == 0
    assert json.loads(res2.output) == rec


def test_export(tmp_path):
    runner = CliRunner()
    runner.invoke(
        main, ["dims", "--min", "53", "--max", "54", "--q", "12379",
               "--outdir", str(tmp_path)]
    )
    res = runner.invoke(main, ["export", "--format", "csv", "--outdir", str(tmp_path)])
    assert res.exit_code == 0
    assert res.output.strip().splitlines() == ["p,q,dim", "53,12379,2"]
    res = runner.invoke(main, ["export", "--format", "json", "--outdir", str(tmp_path)])
    data = json.loads(res.output)
    assert data[0]["p"] == 53


def test_verify_suites_pass():
    assert run_verification(echo=lambda *_: None) == []
