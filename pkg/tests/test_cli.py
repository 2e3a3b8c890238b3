import json
import math
import subprocess
import sys


def run_cli(*args, env_extra=None):
    import os
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "levlab.cli", *args],
        capture_output=True, text=True, env=env)


def test_kappa_json_and_determinism():
    a = run_cli("kappa", "--theta", "1", "--r", "1.1111111111111112",
                "--R", "0.83")
    b = run_cli("kappa", "--theta", "1", "--r", "1.1111111111111112",
                "--R", "0.83")
    assert a.returncode == 0
    assert a.stdout == b.stdout                      # byte-identical
    doc = json.loads(a.stdout)
    assert doc["tool"] == "levlab" and "version" in doc
    assert doc["config"]["subcommand"] == "kappa"
    assert abs(doc["result"]["c"] - 1.44079) < 5e-5
    assert abs(doc["result"]["kappaPrime"] - 0.56001) < 5e-5


def test_kappa_r1_matches_simplified_path():
    from levlab.constants import levinson_c_r1
    out = run_cli("kappa", "--theta", "1", "--r", "1", "--R", "0.83")
    doc = json.loads(out.stdout)
    assert abs(doc["result"]["c"] - levinson_c_r1(1.0, 0.83)) < 1e-12


def test_validation_exit_code():
    out = run_cli("kappa", "--theta", "1", "--r", "1", "--R", "0")
    assert out.returncode == 2
    assert json.loads(out.stdout)["error"] == "validation"


def test_cost_guard_exit_code():
    out = run_cli("sums", "--X", "200000", "--theta", "1", "--r", "1",
                  "--R", "0.83")
    assert out.returncode == 4
    assert json.loads(out.stdout)["error"] == "cost-guard"


def test_bad_thread_env():
    out = run_cli("moment", "--q", "5", "--T", "4", "--theta", "0.5",
                  "--r", "1", "--R", "0.8", env_extra={"LEVLAB_THREADS": "x"})
    assert out.returncode == 2


def test_zeros_csv_first_ordinate():
    out = run_cli("zeros", "--q", "1", "--T", "15")
    lines = out.stdout.strip().split("\n")
    assert lines[0] == "gamma,simple"
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 2
    assert abs(float(rows[1][0]) - 14.1347) < 1e-3
    assert rows[1][1] == "1"


def test_count_matches_zeros_rowcount():
    z = run_cli("zeros", "--q", "3", "--chi", "1", "--T", "30")
    c = run_cli("count", "--q", "3", "--chi", "1", "--T", "30")
    n_rows = len(z.stdout.strip().split("\n")) - 1
    assert json.loads(c.stdout)["result"]["count"] == n_rows


def test_imprimitive_chi_rejected():
    out = run_cli("zeros", "--q", "8", "--chi", "1", "--T", "10")
    # index 1 mod 8 is induced from mod 4
    assert out.returncode == 2


def test_surface_shape_and_sorting(tmp_path):
    path = tmp_path / "surface.csv"
    out = run_cli("surface", "--theta", "1", "--grid", "12",
                  "--out", str(path))
    assert out.returncode == 0
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "r,R,kappaPrime"
    assert len(lines) == 1 + 144
    keys = [(float(a), float(b)) for a, b, _ in
            (line.split(",") for line in lines[1:])]
    assert keys == sorted(keys)


def test_sums_csv_schema(tmp_path):
    path = tmp_path / "sums.csv"
    out = run_cli("sums", "--X", "1000", "--X", "3000", "--theta", "1",
                  "--r", "1.1111111111111112", "--R", "0.83",
                  "--out", str(path))
    assert out.returncode == 0
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "X,direct,asymptotic,relError"
    assert len(lines) == 3
    x0, d0, a0, e0 = (float(v) for v in lines[1].split(","))
    assert x0 == 1000.0
    assert abs(d0 / a0 - 1.0) == e0 or abs(abs(d0 - a0) / abs(a0) - e0) < 1e-12


def test_moment_single_modulus():
    out = run_cli("moment", "--q", "5", "--T", "6", "--theta", "0.7",
                  "--r", "1", "--R", "0.8")
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    res = doc["result"]
    assert res["lhs"] > 0 and res["rhs"] > 0
    assert len(res["perCharacter"]) == 3
    assert "desk-scale" in res["regime"]


def test_bound_json():
    out = run_cli("bound", "--q", "5", "--T", "15", "--theta", "0.5",
                  "--r", "1", "--R", "1.2")
    assert out.returncode == 0
    res = json.loads(out.stdout)["result"]
    assert res["littlewoodJ"] <= res["logK"] + 1e-6
    assert res["logK"] <= 0.5 * math.log(res["lBar"]) + 1e-6
    assert res["lowerBoundL"] <= res["lowerBoundJ"] + 1e-6
    assert res["nTotal"] > 0
