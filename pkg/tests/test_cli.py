import json
import subprocess
import sys

import numpy as np
import pytest

from haarlaw import io as hio
from haarlaw.cli import run


def run_cli(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_density_beta_example(capsys):
    code, out, _ = run_cli(capsys, "density", "--generate", "projector", "--rank", "1", "--dim", "8")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,value" and len(lines) == 1002
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    x, p = data[:, 0], data[:, 1]
    assert x[0] == pytest.approx(1e-12) and x[-1] == pytest.approx(1 - 1e-12)
    np.testing.assert_allclose(p, 7 * (1 - x) ** 6, rtol=1e-10, atol=1e-300)


def test_moments_example(capsys):
    code, out, _ = run_cli(capsys, "moments", "--generate", "number-operator", "--dim", "3",
                           "--nmax", "2")
    assert code == 0
    report = json.loads(out)
    for route in ("compact", "permutation", "quadrature"):
        assert report["routes"][route]["m"][0] == pytest.approx(2.0, rel=1e-14)


def test_moments_fidelity_route_for_projector(capsys):
    code, out, _ = run_cli(capsys, "moments", "--generate", "projector", "--dim", "5", "--nmax", "3")
    report = json.loads(out)
    assert code == 0
    assert "fidelity" in report["routes"] and "compact" in report["skipped"]
    assert report["routes"]["fidelity"]["kappa"][1] == pytest.approx(4 / 150)


def test_identities_degenerate_exit_2(capsys, tmp_path):
    path = tmp_path / "deg.json"
    path.write_text(json.dumps({"eigenvalues": [{"value": 0, "multiplicity": 2},
                                                {"value": 1, "multiplicity": 1}]}))
    code, _, err = run_cli(capsys, "identities", "--spectrum", str(path))
    assert code == 2 and "RequiresNonDegenerate" in err


def test_identities_report(capsys):
    code, out, _ = run_cli(capsys, "identities", "--eigenvalues", "0.3,-1,2,5.5")
    report = json.loads(out)
    assert code == 0 and report["max_residual"] < 1e-12 and len(report["checks"]) == 12


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["density"],
    ["density", "--generate", "projector"],
    ["density", "--generate", "power", "--dim", "4"],
    ["density", "--generate", "projector", "--dim", "4", "--grid", "1:0:5"],
    ["density", "--generate", "projector", "--dim", "4", "--precision", "turbo"],
    ["density", "--spectrum", "/nonexistent/file.json"],
    ["density", "--eigenvalues", "1,nan"],
    ["sample", "--generate", "projector", "--dim", "4"],
    ["sample", "--generate", "projector", "--dim", "4", "--samples", "0", "--out", "x.csv"],
    ["moments", "--generate", "projector", "--dim", "4", "--unknown-flag"],
])
def test_invalid_input_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2 and err


def test_precision_exit_3_without_fallback(capsys):
    argv = ["density", "--generate", "number-operator", "--dim", "40", "--precision", "fast"]
    code, _, err = run_cli(capsys, *argv, "--no-fallback")
    assert code == 3 and "exceeds" in err
    code, out, err = run_cli(capsys, *argv)
    assert code == 0 and "retrying" in err and len(out.splitlines()) == 1002


def test_spectrum_round_trip_through_cli(capsys, tmp_path):
    path = tmp_path / "s.json"
    code, _, _ = run_cli(capsys, "spectrum", "--eigenvalues", "0.1,0.2,0.1,3e-7,0.30000000000000004",
                         "--cluster-tol", "0", "--out", str(path))
    assert code == 0
    s = hio.read_spectrum(path)
    code, _, _ = run_cli(capsys, "spectrum", "--spectrum", str(path), "--out", str(tmp_path / "t.json"))
    assert hio.read_spectrum(tmp_path / "t.json") == s
    assert s.values == (3e-7, 0.1, 0.2, 0.30000000000000004) and s.multiplicities == (1, 2, 1, 1)


@pytest.mark.parametrize("argv", [
    ["density", "--generate", "log", "--dim", "6"],
    ["cdf", "--eigenvalues", "0,1,1,2.5", "--grid=-1:3:50"],
    ["charfn", "--generate", "number-operator", "--dim", "5"],
    ["mgf", "--eigenvalues", "0,1", "--omega", "0.5"],
    ["sample", "--generate", "power", "--alpha", "0.5", "--dim", "6", "--samples", "3000",
     "--seed", "17"],
    ["kstest", "--generate", "projector", "--dim", "4", "--samples", "20000", "--seed", "5"],
    ["levy", "--generate", "number-operator", "--dim", "30"],
    ["levy", "--generate", "projector", "--dim", "30", "--format", "csv"],
    ["clt", "--generate", "power", "--alpha", "2", "--dims", "8,16", "--grid=-3:3:13"],
    ["fig1", "--grid", "0:1:101"],
    ["fig2", "--dims", "8,16", "--grid=-3:3:13"],
])
def test_deterministic_output(tmp_path, argv):
    outs = []
    for i in range(2):
        path = tmp_path / f"out{i}.csv"
        assert run(argv + ["--out", str(path)]) == 0
        outs.append(path.read_bytes())
        sidecar = path.with_suffix(".json")
        if sidecar.exists():
            outs.append(sidecar.read_bytes())
    half = len(outs) // 2
    assert outs[:half] == outs[half:]
    assert outs[0]


def test_fig1_columns(capsys):
    code, out, _ = run_cli(capsys, "fig1")
    assert code == 0
    assert out.splitlines()[0] == "x,d=3,d=5,d=9,d=17"


def test_kstest_foreign_samples_fail(capsys, tmp_path):
    path = tmp_path / "d3.csv"
    assert run(["sample", "--generate", "projector", "--dim", "3", "--samples", "20000",
                "--seed", "1", "--out", str(path)]) == 0
    code, out, _ = run_cli(capsys, "kstest", "--generate", "projector", "--dim", "10",
                           "--samples-file", str(path))
    report = json.loads(out)
    assert code == 0 and not report["passed"] and report["scaled_statistic"] > 10


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "haarlaw.cli", "--help"], capture_output=True,
                          text=True)
    assert proc.returncode == 0 and "density" in proc.stdout
