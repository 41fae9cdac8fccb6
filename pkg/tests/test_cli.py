import json

import numpy as np
import pytest
from click.testing import CliRunner

from heisengeo import curves, homs
from heisengeo.cli import main


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args, env=None):
        return runner.invoke(main, list(args), env=env)

    return invoke


def test_dist(run):
    res = run("dist", "--norm", "koranyi", "--p", "0,0,0", "--q", "0,0,1")
    assert res.exit_code == 0
    assert json.loads(res.stdout)["distance"] == 1


def test_check_validity_violation(run):
    res = run("norm", "--norm", "lpa:p=1,a=1.5", "--n", "1", "--check-validity")
    assert res.exit_code == 1
    rep = json.loads(res.stdout)["validity"]
    assert rep["threshold"] == 1 and not rep["valid"]
    assert rep["witness"]["triangle_defect"] > 0


def test_check_validity_ok(run):
    res = run("norm", "--norm", "lpa:p=inf,a=0.5", "--n", "2", "--check-validity", "--probe", "--samples", "500")
    assert res.exit_code == 0, res.output
    assert json.loads(res.stdout)["probe"]["holds"]


def test_norm_point(run):
    res = run("norm", "--norm", "leenaor", "--point", "0,0,4")
    assert json.loads(res.stdout)["value"] == 2


def test_geodesic_verify_builtin(run):
    res = run("geodesic-verify", "--builtin", "pinf", "--a", "0.5", "--n", "2", "--range", "-10,10")
    assert res.exit_code == 0
    out = json.loads(res.stdout)
    assert out["report"]["is_geodesic"] and out["linearity_defect"] > 0.1


def test_geodesic_verify_file(run, tmp_path):
    c = curves.catalog_p1_geodesic(1, 0.5).sample_range(-5, 5, 201)
    z = np.array(c.z)
    z[100, 0] += 0.1
    path = tmp_path / "bent.csv"
    path.write_text(curves.curve_to_csv(curves.HorizontalCurve(c.s, z, c.t)))
    res = run("geodesic-verify", "--in", str(path), "--norm", "lpa:p=1,a=0.5")
    assert res.exit_code == 1


def test_lift_roundtrip(run, tmp_path):
    src = tmp_path / "planar.csv"
    src.write_text("s,z_1,z_2\n0,0,0\n1,1,0\n2,1,1\n3,0,1\n4,0,0\n")
    out = tmp_path / "lifted.csv"
    rep = tmp_path / "rep.json"
    res = run("lift", "--in", str(src), "--norm", "lpa:p=2,a=1", "--out", str(out), "--report", str(rep))
    assert res.exit_code == 0, res.output
    s, z, t = curves.read_curve_csv(out.read_text())
    assert t[-1] == pytest.approx(-4.0)  # counterclockwise unit square
    assert json.loads(rep.read_text())["length"] == pytest.approx(4.0)


def test_malformed_csv_names_field(run, tmp_path):
    src = tmp_path / "bad.csv"
    src.write_text("time,z_1,z_2\n0,0,0\n1,1,0\n")
    res = run("lift", "--in", str(src))
    assert res.exit_code == 2
    assert "'s'" in res.output


def test_malformed_spec_names_field(run, tmp_path):
    spec = homs.HomSpec.identity(1).to_dict()
    del spec["T"]
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    res = run("fit-affine", "--map", str(path))
    assert res.exit_code == 2
    assert "'T'" in res.output


def test_fit_affine_spec_file(run, tmp_path):
    spec = homs.random_hom_spec(np.random.default_rng(0), 1, 2).to_dict()
    spec["translation"] = {"z": [1.0, 2.0, 3.0, 4.0], "t": 5.0}
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    res = run("fit-affine", "--map", str(path), "--tol", "1e-5")
    assert res.exit_code == 0, res.output


def test_fit_affine_sine(run):
    res = run("fit-affine", "--map", "builtin:sine", "--n", "2", "--a", "0.5")
    assert res.exit_code == 1
    assert json.loads(res.stdout)["report"]["residual"] >= 0.1


def test_embed_verify(run):
    res = run("embed-verify", "--builtin", "swap", "--n", "1", "--a", "0.5", "--samples", "2000")
    assert res.exit_code == 0


def test_convexity_glp(run):
    res = run("convexity", "--norm", "lpa:p=inf,a=0.7", "--property", "glp")
    assert res.exit_code == 1
    assert json.loads(res.stdout)["report"]["verdict"] == "counterexample-found"
    res = run("convexity", "--norm", "lpa:p=3,a=0.5", "--property", "glp")
    assert res.exit_code == 0


def test_convexity_undetermined_exits_zero(run):
    res = run("convexity", "--norm", "subfinsler:p=3", "--n", "2", "--property", "glp")
    assert res.exit_code == 0
    assert json.loads(res.stdout)["report"]["verdict"] == "undetermined"


def test_isoperimetrix_and_vdist(run, tmp_path):
    out = tmp_path / "iso.csv"
    res = run("isoperimetrix", "--planar", "lp:p=3", "--resolution", "2048", "--out", str(out))
    assert res.exit_code == 0
    assert out.read_text().startswith("x,y\n")
    res = run("vdist", "--planar", "lp:p=2", "--t", "1")
    assert json.loads(res.stdout)["distance"] == pytest.approx(np.sqrt(np.pi), abs=1e-4)


@pytest.mark.parametrize(
    "args",
    [
        ("dist", "--norm", "lpa:p=2", "--p", "0,0,0", "--q", "0,0,1"),
        ("dist", "--norm", "koranyi", "--p", "0,0", "--q", "0,0,1"),
        ("dist", "--norm", "koranyi", "--p", "0,0,0", "--q", "0,0,0,0,1"),
        ("geodesic-verify", "--builtin", "pinf", "--range", "3,1"),
        ("reproduce", "--tolerance", "nonsense=1"),
        ("norm",),
    ],
)
def test_usage_errors_exit_2(run, args):
    assert run(*args).exit_code == 2


def test_seed_from_environment(run):
    args = ("convexity", "--norm", "koranyi", "--property", "midpoint", "--samples", "50")
    a = run(*args, "--seed", "3")
    b = run(*args, env={"HEISENGEO_SEED": "3"})
    c = run(*args)
    assert a.stdout == b.stdout
    assert json.loads(c.stdout)["report"]["verdict"] == json.loads(a.stdout)["report"]["verdict"]


def test_help_shows_defaults(run):
    res = run("reproduce", "--help")
    assert "default: 0" in res.output and "HEISENGEO_SEED" in res.output


@pytest.mark.parametrize(
    "args",
    [
        ("norm", "--norm", "koranyi", "--n", "2", "--probe", "--samples", "3000"),
        ("embed-verify", "--builtin", "sine", "--n", "2", "--a", "0.5", "--samples", "3000"),
        ("convexity", "--norm", "leenaor", "--property", "hsc", "--samples", "100"),
    ],
)
def test_reports_are_byte_identical(run, args):
    assert run(*args).stdout == run(*args).stdout
