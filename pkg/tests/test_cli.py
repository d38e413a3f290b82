import json
import shutil
import subprocess

import numpy as np
import pytest
from scipy.optimize import brentq

from milnorvf import corpus
from milnorvf.certificate import validate_certificate
from milnorvf.cli import main
from milnorvf.germ import PolyMapGerm
from milnorvf.milnor import omegas
from milnorvf.mixed import msl_check, parse_mixed

FAST = ["--radii", "1e-1,1e-2", "--samples", "20"]


def test_check_xy_xz(data_dir, tmp_path):
    out = tmp_path / "cert.json"
    args = ["check", str(data_dir / "germs/xy_xz.json"), "--radii", "1e-1,1e-2,1e-3", "--samples", "200", "--seed", "7"]
    assert main(args + ["--out", str(out)]) == 0
    cert = json.loads(out.read_text())
    validate_certificate(cert)
    assert cert["conclusion"]["criterion"] == "same_multiplicity"


def test_check_lmap8(data_dir, tmp_path):
    out = tmp_path / "cert.json"
    assert main(["check", str(data_dir / "germs/lmap8.json"), *FAST, "--out", str(out)]) == 0
    assert json.loads(out.read_text())["conclusion"]["criterion"] == "simple_l_map"


def test_check_z_plus_zbar_sq(data_dir, tmp_path):
    out = tmp_path / "cert.json"
    code = main(["check", str(data_dir / "mixed/z_plus_zbar2.json"), *FAST, "--out", str(out)])
    cert = json.loads(out.read_text())
    assert not cert["symbolic"]["msl"]["full"]["holds"]
    assert code == 0 and cert["conclusion"]["criterion"] == "same_multiplicity"


def test_check_inconclusive_exit_code(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps(PolyMapGerm.from_exprs(["x", "y**2 + x*z"], ["x", "y", "z"]).to_document()))
    assert main(["check", str(path), *FAST, "--out", str(tmp_path / "c.json")]) == 2


def test_check_is_byte_identical(data_dir, tmp_path):
    paths = []
    for k in range(2):
        cert, csv = tmp_path / f"c{k}.json", tmp_path / f"s{k}.csv"
        assert main(["check", str(data_dir / "germs/xy_xz.json"), *FAST, "--seed", "5",
                     "--out", str(cert), "--csv", str(csv)]) == 0
        paths.append((cert.read_bytes(), csv.read_bytes()))
    assert paths[0] == paths[1]


@pytest.mark.parametrize(
    "args",
    [
        ["check", "missing.json"],
        ["check", "{germ}", "--radii", "1e-2,1e-1"],
        ["check", "{germ}", "--samples", "0"],
        ["check", "{germ}", "--radii", "a,b"],
        ["flow", "{germ}", "--start", "0.1,0.1,0.1", "--eps", "0.1"],
        ["flow", "{germ}", "--start", "0.1,0.1", "--eps", "1"],
        ["a-coeff", "{germ}", "--point", "1,0.5,0.2"],
        ["a-coeff", "{germ}", "--point", "0,1,1"],
        ["msl-gen"],
        ["bogus"],
    ],
)
def test_error_exit_codes(data_dir, args):
    germ = str(data_dir / "germs/xy_xz.json")
    assert main([a.replace("{germ}", germ) for a in args]) == 1


def test_malformed_input_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vars": ["x"], "components": [[{"coef": "1", "exps": [0]}]]}')
    assert main(["check", str(bad)]) == 1


def test_a_coeff(data_dir, tmp_path, capsys):
    out = tmp_path / "a.json"
    assert main(["a-coeff", str(data_dir / "germs/xy_xz.json"), "--point", f"{2 ** 0.5},1,1", "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["det_D"] == pytest.approx(256, abs=1e-10)
    assert rec["det_M"] == pytest.approx(512, abs=1e-10)
    assert set(rec["a"]) == {"cramer", "alpha", "matrix_identity", "leading_term"}
    assert all(v == pytest.approx(0.5, abs=1e-12) for v in rec["a"].values())
    assert main(["a-coeff", str(data_dir / "germs/xy_xz.json"), "--point", f"{2 ** 0.5},1,1", "--route", "alpha"]) == 0
    assert list(json.loads(capsys.readouterr().out)["a"]) == ["alpha"]


def test_milnor_sample(data_dir, tmp_path):
    csv = tmp_path / "s.csv"
    assert main(["milnor-sample", str(data_dir / "germs/xy_xz.json"), *FAST, "--route", "cramer", "--csv", str(csv)]) == 0
    rows = csv.read_text().splitlines()
    assert len(rows) == 41
    first = rows[1].split(",")
    assert first[7] and not first[8]  # cramer filled, alpha skipped


def test_flow_fan(data_dir, tmp_path):
    out, csv = tmp_path / "f.json", tmp_path / "traj" / "t.csv"
    code = main(["flow", str(data_dir / "germs/xy_xz.json"), "--eta", "1e-4", "--eps", "0.1", "--fan", "8",
                 "--out", str(out), "--csv", str(csv)])
    assert code == 0
    summary = json.loads(out.read_text())
    assert len(summary["trajectories"]) == 8 and summary["all_reached_sphere"]
    assert len(list((tmp_path / "traj").glob("t_*.csv"))) == 8


def test_flow_product(data_dir, tmp_path):
    out = tmp_path / "f.json"
    assert main(["flow", str(data_dir / "mixed/y_norm_x_sq.json"), "--eta", "1e-4", "--eps", "0.1", "--out", str(out)]) == 0
    summary = json.loads(out.read_text())
    assert summary["trajectories"] and summary["all_reached_sphere"]


def test_flow_rho_regularity_exit_code(tmp_path):
    g = PolyMapGerm.from_exprs(["x*y", "x + y**2"], ["x", "y"])
    path = tmp_path / "g.json"
    path.write_text(json.dumps(g.to_document()))

    def cross(t):
        x = 0.2 * np.array([np.cos(t), np.sin(t)])
        om = omegas(g.values(x), g.jacobian(x), 0)[0]
        return x[0] * om[1] - x[1] * om[0]

    t = brentq(cross, 1.0, 1.05, xtol=1e-15)
    start = ",".join(repr(float(v)) for v in 0.2 * np.array([np.cos(t), np.sin(t)]))
    assert main(["flow", str(path), "--start", start, "--eps", "0.5", "--out", str(tmp_path / "f.json")]) == 3


def test_msl_gen_recipe(data_dir, tmp_path):
    out = tmp_path / "m.json"
    assert main(["msl-gen", str(data_dir / "recipes/msl4.json"), "--out", str(out)]) == 0
    assert parse_mixed(out.read_text()) == corpus.msl4()


def test_msl_gen_random_is_verified_and_deterministic(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert main(["msl-gen", "--seed", "42", "--random", "--n", "4", "--k", "2", "--deg", "3", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert msl_check(parse_mixed(outs[0].decode())).holds


def test_msl_gen_wrong_block(data_dir):
    assert main(["msl-gen", str(data_dir / "recipes/wrong_block.json")]) == 1


def test_report(data_dir, tmp_path, capsys):
    cert = tmp_path / "c.json"
    main(["check", str(data_dir / "germs/xy_xz.json"), *FAST, "--out", str(cert)])
    assert main(["report", str(cert)]) == 0
    text = capsys.readouterr().out
    assert "same_multiplicity" in text and "evidence (not proof)" in text
    data = json.loads(cert.read_text())
    data["conclusion"]["status"] = "proved"
    cert.write_text(json.dumps(data))
    assert main(["report", str(cert)]) == 1


@pytest.mark.skipif(shutil.which("milnorvf") is None, reason="console script not installed")
def test_console_script(data_dir):
    proc = subprocess.run(["milnorvf", "msl-gen", str(data_dir / "recipes/msl4.json")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert parse_mixed(proc.stdout) == corpus.msl4()
