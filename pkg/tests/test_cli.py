import json
from fractions import Fraction

import pytest

from bdspace.cli import main, parse_family, parse_vector
from bdspace.families import is_member


CONFIG = {
    "schema": "bdspace-config-v1",
    "seed": {"kind": "tsirelson", "name": "cli", "family": "schreier:1",
             "c": "1/16", "blocks": 3, "unconditional": False},
    "eps": "1/32",
    "stage_bound": 6,
    "samples": 10,
}


@pytest.fixture(scope="module")
def built(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    cfg = root / "config.json"
    cfg.write_text(json.dumps(CONFIG))
    out = root / "build"
    assert main(["build", "--config", str(cfg), "--out", str(out)]) == 0
    return root, cfg, out


def test_family_parser():
    assert parse_family("schreier:1") == parse_family("schreier:1")
    f = parse_family("schreier:w^1*1+2")  # omega + 2
    assert is_member({2, 3}, f)


def test_vector_parser():
    v = parse_vector("3:1,4:-1/2")
    assert dict(v.items()) == {3: Fraction(1), 4: Fraction(-1, 2)}


def test_build_writes_artifacts(built):
    _, _, out = built
    for name in ("manifest.json", "stages.json", "seed.json",
                 "normingset.json", "coding.json"):
        assert (out / name).exists()
    manifest = json.loads((out / "manifest.json").read_text())
    # every stage up to the bound is populated
    for n in range(1, CONFIG["stage_bound"] + 1):
        assert manifest["stage_cardinalities"][str(n)] > 0
    coding = json.loads((out / "coding.json").read_text())
    assert set(c["case"] for c in coding.values()) <= {"i", "ii", "iii", "iv"}


def test_build_determinism(built, tmp_path):
    root, cfg, out = built
    out2 = tmp_path / "again"
    assert main(["build", "--config", str(cfg), "--out", str(out2)]) == 0
    for name in ("manifest.json", "stages.json", "seed.json",
                 "normingset.json", "coding.json"):
        assert (out / name).read_bytes() == (out2 / name).read_bytes()


def test_config_rejected_on_bad_eps(tmp_path):
    bad = dict(CONFIG, eps="1/8")  # eps >= c
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(bad))
    with pytest.raises(SystemExit):
        main(["build", "--config", str(p), "--out", str(tmp_path / "o")])


def test_config_rejected_on_eps_seq_sum(tmp_path):
    bad = dict(CONFIG)
    bad["eps_seq"] = ["1/100", "1/100", "1/100"]  # sum >= eps/8
    p = tmp_path / "bad2.json"
    p.write_text(json.dumps(bad))
    with pytest.raises(SystemExit):
        main(["build", "--config", str(p), "--out", str(tmp_path / "o")])


def test_verify_all_suites(built, capsys):
    _, _, out = built
    rc = main(["verify", "--build", str(out)])
    captured = capsys.readouterr().out
    assert rc == 0
    assert "[FAIL]" not in captured
    assert (out / "report.json").exists()
    rc = main(["report", "--build", str(out)])
    assert rc == 0


def test_verify_single_suite(built, capsys):
    _, _, out = built
    assert main(["verify", "--build", str(out), "--suite",
                 "projection-norms"]) == 0
    assert "projection-norms" in capsys.readouterr().out


def test_verify_worker_fanout(built, capsys, monkeypatch):
    _, _, out = built
    monkeypatch.setenv("BDSPACE_WORKERS", "3")
    assert main(["verify", "--build", str(out), "--suite", "schema"]) == 0
    assert "[PASS] schema" in capsys.readouterr().out


def test_verify_detects_tampering(built, tmp_path):
    root, cfg, out = built
    out3 = tmp_path / "tampered"
    assert main(["build", "--config", str(cfg), "--out", str(out3)]) == 0
    stages = out3 / "stages.json"
    stages.write_text(stages.read_text().replace('"1"', '"1 "', 1))
    with pytest.raises(SystemExit, match="corrupt"):
        main(["verify", "--build", str(out3)])


def test_norm_command(capsys):
    assert main(["norm", "--family", "schreier:1", "--c", "1/2",
                 "3:1,4:1,5:1"]) == 0
    assert capsys.readouterr().out.strip() == "3/2"
    assert main(["norm", "--family", "schreier:1", "--c", "1/2",
                 "--vector", "3:1,4:1,5:1"]) == 0
    assert capsys.readouterr().out.strip() == "3/2"


def test_norm_empty_vector(capsys):
    assert main(["norm", "--family", "schreier:1", "--c", "1/2", " "]) == 0
    assert capsys.readouterr().out.strip() == "0"


def test_decompose_command(capsys):
    assert main(["decompose", "--c", "1/2", "1:3/10,2:3/10,3:4/5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["blocks"] == [{"1": "3/10"}, {"2": "3/10"}, {"3": "4/5"}]


def test_decompose_empty(capsys):
    assert main(["decompose", "--c", "1/2", " "]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["blocks"] == []


def test_dump_command(built, capsys):
    _, _, out = built
    assert main(["dump", "--build", str(out), "--what", "manifest"]) == 0
    assert "stage_cardinalities" in capsys.readouterr().out


def test_augment_command(built, tmp_path, capsys):
    _, _, out = built
    aout = tmp_path / "aug"
    rc = main(["augment", "--build", str(out), "--out", str(aout),
               "--v-family", "schreier:1", "--v-c", "1/2",
               "--carriers", "2,6,11"])
    assert rc == 0
    manifest = json.loads((aout / "manifest.json").read_text())
    assert manifest["verification_ok"]
    assert manifest["certificate"]["status"] == "PASS"
