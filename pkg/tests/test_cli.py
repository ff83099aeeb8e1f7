import json

import numpy as np
import pytest

from bbspaces import io as bio
from bbspaces import signal as sg
from bbspaces.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_sharp_json(capsys):
    d = report(capsys, "sharp", "--left", '{"kind": "explicit", "terms": [0, 1, 2, 3, 4, 5]}',
               "--right", '{"kind": "explicit", "terms": [0, 1, 2, 3, 4, 5]}', "--count", "6")
    assert d["term"] == [0, 1, 1, 2, 2, 2]
    assert d["config"]["grid"] == {"T": 16.0, "N": 2048}


def test_sharp_csv(capsys):
    code, out, _ = run(capsys, "sharp", "--count", "3", "--format", "csv")
    assert code == 0
    rows = [l for l in out.splitlines() if not l.startswith("#")]
    assert rows == ["n,term", "0,0", "1,1", "2,1"]


def test_nu(capsys):
    d = report(capsys, "nu", "--seq", '{"kind": "explicit", "terms": [1, 1, 2, 5]}',
               "--probes", "0,1,4")
    assert d["nu"] == [0, 2, 3]
    # at the last known term the count is not determined by the prefix
    code, _, err = run(capsys, "nu", "--seq", '{"kind": "explicit", "terms": [1, 1, 2, 5]}',
                       "--probes", "5")
    assert code == 4 and "undetermined" in err


def test_lemmas(capsys):
    d = report(capsys, "lemmas", "--left", '{"kind": "powerlog", "mu": 1, "u": 0}',
               "--right", '{"kind": "powerlog", "mu": 2, "u": 0}', "--probes", "1,10,100,1000")
    assert d["fundamental"] is True
    assert d["explicit"]["holds"]


def test_classify(capsys):
    w = lambda mu: json.dumps({"kind": "powerlog", "mu": mu, "u": 0})
    d = report(capsys, "classify", "--omega", w(1), "--eta", w(2), "--omega", w(2), "--eta", w(1))
    assert d["verdict"]["relation"] == "isomorphic"
    d = report(capsys, "classify", "--omega", w(1), "--eta", w(2), "--omega", w(2), "--eta", w(2),
               "--method", "numeric")
    assert d["verdict"]["relation"] == "not_isomorphic"
    assert d["verdict"]["probe_range"] is not None
    d = report(capsys, "classify", "--relation", "inclusion", "--omega", w(1), "--omega", w(2))
    assert d["verdict"]["relation"] == "included"


def test_dual_box(capsys, tmp_path):
    d = report(capsys, "dual", "--window", "box", "--out", str(tmp_path))
    assert d["wexler_raz"]["defect"] < 1e-12
    assert d["duality"]["defect"] < 1e-12
    assert d["config"]["window"] == "box"
    assert json.loads((tmp_path / "report.json").read_text())["solver"] == d["solver"]
    gamma = bio.read_signal(tmp_path / "dual.json")
    assert (gamma - sg.box(gamma.grid, 0.0, 1.0)).norm() < 1e-12


def test_dual_gaussian(capsys):
    d = report(capsys, "dual")
    assert d["wexler_raz"]["defect"] < 1e-8 and d["wexler_raz"]["box"] == 8
    assert d["duality"]["defect"] < 1e-8
    assert d["wexler_raz"]["tol"] == 1e-10


def test_gabor_round_trip(capsys, tmp_path):
    grid = sg.GridSpec(16, 2048)
    h = sg.hermite(4, grid)
    bio.write_signal(tmp_path / "h.csv", h)
    assert run(capsys, "analyze", str(tmp_path / "h.csv"), "--out", str(tmp_path / "c.csv"))[0] == 0
    assert (tmp_path / "c.csv").read_text().startswith("# ")
    assert run(capsys, "synthesize", str(tmp_path / "c.csv"), "--out", str(tmp_path / "g.csv"))[0] == 0
    assert (bio.read_signal(tmp_path / "g.csv") - h).norm() < 1e-8


def test_wilson_commands(capsys, tmp_path):
    grid = sg.GridSpec(32, 4096)
    bio.write_signal(tmp_path / "h.json", sg.hermite(3, grid))
    d = report(capsys, "seqrep", str(tmp_path / "h.json"), "--out", str(tmp_path / "rep"))
    assert d["round_trip"]["relative_l2_error"] < 1e-8
    assert d["config"]["lattice"]["K"] == 24
    code, out, _ = run(capsys, "synthesize", str(tmp_path / "rep" / "seqrep.json"))
    assert code == 0
    back = bio.signal_from_text(out)
    assert (back - sg.hermite(3, grid)).norm() < 1e-8
    d = report(capsys, "decay", str(tmp_path / "h.json"), "--out", str(tmp_path / "dec"))
    assert d["envelope"]["r_star"] > 0.1
    assert (tmp_path / "dec" / "shell_maxima.csv").exists()


def test_wilson_build(capsys):
    d = report(capsys, "wilson-build", "--K", "12", "--M", "24")
    assert d["gram"]["passed"] and d["gram"]["defect"] < 1e-6
    assert d["parseval"]["defect"] < 1e-7


def test_corpus(capsys, tmp_path):
    d = report(capsys, "corpus", "--m-max", "2", "--grid-T", "8", "--grid-N", "256",
               "--out", str(tmp_path), "--format", "csv")
    assert len(d["files"]) == 3
    assert np.allclose(d["norms"], 1.0)


def test_config_layering(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('[grid]\nT = 8.0\nN = 256\n\n[output]\nformat = "csv"\n')
    d = report(capsys, "corpus", "--m-max", "0", "--config", str(cfg), "--grid-N", "512",
               "--format", "json")
    assert d["config"]["grid"] == {"T": 8.0, "N": 512}


@pytest.mark.parametrize("argv,code", [
    (["sharp", "--left", "not json"], 2),
    (["sharp", "--count", "-1"], 2),
    (["classify", "--omega", '{"kind": "powerlog", "mu": 1}'], 2),
    (["dual", "--a", "1.05", "--b", "1.05"], 3),
    (["dual", "--config", "/nonexistent.toml"], 2),
    (["analyze", "/nonexistent.json"], 2),
    (["dual", "--grid-N", "100000000"], 2),
    (["sharp", "--count", "200000000"], 4),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code
