"""Test the condrenyi command line interface"""

import csv
import io
import json
import math
import plistlib

import numpy as np
import pytest

from condrenyi import __version__
from condrenyi.cli import cli
from condrenyi.divergences import DensityOperator
from condrenyi.fileio import dump, load
from condrenyi.objects import KrausChannel, Povm, PureState
from condrenyi.verify import VerificationReport

RHO = DensityOperator.from_matrix(np.diag([0.5, 0.5]))
SIGMA = DensityOperator.from_matrix(np.diag([0.25, 0.75]))
KET_0 = DensityOperator.from_matrix(np.diag([1.0, 0.0]))


@pytest.fixture
def classical_files(tmp_path):
    """Return paths to (1/2, 1/2), (1/4, 3/4) and |0⟩ state files"""
    paths = []
    for name, state in (("rho", RHO), ("sigma", SIGMA), ("ket0", KET_0)):
        path = tmp_path / f"{name}.json"
        dump(state, path)
        paths.append(str(path))
    return paths


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_compute_bell(runner, bell_file, config_file):
    """Test compute prints -1.0 for the sandwiched DOWN entropy of order 2 of a Bell state"""
    result = runner.invoke(
        cli,
        ["--config", str(config_file), "compute", "--kind", "sandwiched-down", "--alpha", "2", "--state", str(bell_file)],
    )
    assert result.exit_code == 0, result.output
    assert result.stdout.strip() == "-1.0"


@pytest.mark.parametrize("kind", ["old-down", "old-up", "sandwiched-down", "sandwiched-up"])
def test_compute_json(runner, bell_file, kind):
    result = runner.invoke(
        cli, ["compute", "-k", kind, "-a", "inf", "-s", str(bell_file), "--json", "--no-indent"]
    )
    assert result.exit_code == 0, result.output
    data = json.loads(result.stdout)
    assert data["kind"] == kind
    assert data["alpha"] == "inf"
    assert data["target"] == ["A"]
    assert data["cond"] == ["B"]
    assert data["value"] == pytest.approx(-1, abs=1e-6)


def test_compute_target_cond(runner, bell_file):
    """Test an empty conditioning system gives the marginal entropy"""
    result = runner.invoke(
        cli, ["compute", "-k", "old-down", "-a", "2", "-s", str(bell_file), "-t", "B", "-c", ""]
    )
    assert result.exit_code == 0, result.output
    assert float(result.stdout) == pytest.approx(1)


def test_compute_unknown_label(runner, bell_file):
    result = runner.invoke(cli, ["compute", "-k", "old-down", "-a", "2", "-s", str(bell_file), "-t", "Q"])
    assert result.exit_code == 2


def test_compute_divergence(runner, classical_files):
    """Test D_2 of the classical pair is log₂(4/3)"""
    rho, sigma, _ = classical_files
    result = runner.invoke(cli, ["compute", "-k", "divergence-old", "-a", "2", "-s", rho, "--sigma", sigma])
    assert result.exit_code == 0, result.output
    assert float(result.stdout) == pytest.approx(math.log2(4 / 3), abs=1e-11)


def test_compute_divergence_needs_sigma(runner, classical_files):
    result = runner.invoke(cli, ["compute", "-k", "divergence-sandwiched", "-a", "2", "-s", classical_files[0]])
    assert result.exit_code == 2


def test_compute_domination_error(runner, classical_files):
    """Test a divergence of order 2 without support inclusion exits 1"""
    rho, _, ket0 = classical_files
    result = runner.invoke(cli, ["compute", "-k", "divergence-old", "-a", "2", "-s", rho, "--sigma", ket0])
    assert result.exit_code == 1


@pytest.mark.parametrize("alpha", ["-1", "abc", "1.0000001"])
def test_compute_bad_alpha(runner, bell_file, alpha):
    result = runner.invoke(cli, ["compute", "-k", "old-down", "-a", alpha, "-s", str(bell_file)])
    assert result.exit_code == 2


def test_compute_malformed_state(runner, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"type": "density", "matrix": [1, 0, 0, 1]}))
    result = runner.invoke(cli, ["compute", "-k", "old-down", "-a", "2", "-s", str(path)])
    assert result.exit_code == 2


def test_verify_rejects_orders(runner):
    """Test orders outside a suite's range exit 2"""
    result = runner.invoke(cli, ["verify", "--suite", "duality1", "--alphas", "2.5,-0.5"])
    assert result.exit_code == 2
    result = runner.invoke(cli, ["verify", "--suite", "duality1", "--alphas", "2.5"])
    assert result.exit_code == 2


def test_verify_rejects_dims(runner):
    result = runner.invoke(cli, ["verify", "--suite", "duality1", "--dims", "2,2"])
    assert result.exit_code == 2
    result = runner.invoke(cli, ["verify", "--suite", "duality1", "--dims", "2,x,2"])
    assert result.exit_code == 2


def test_verify_report_file(runner, tmp_path):
    """Test a passing run exits 0 and writes the report"""
    out = tmp_path / "report.json"
    result = runner.invoke(
        cli, ["verify", "-s", "duality3", "-d", "2,2,2", "-n", "2", "--seed", "7", "-o", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert result.stdout.startswith("duality3: 2 trials")
    report = json.loads(out.read_text())
    assert report["schema"] == 1
    assert report["suite"]["seed"] == 7
    assert report["summary"]["violations"] == 0


def test_verify_stdout(runner):
    result = runner.invoke(cli, ["verify", "-s", "classical-oracle", "-n", "2", "-I"])
    assert result.exit_code == 0, result.output
    assert json.loads(result.stdout)["suite"]["suite"] == "classical-oracle"


def test_verify_reproducible(runner):
    """Test equal seeds give identical trial records"""
    args = ["verify", "-s", "holder", "-n", "3", "--seed", "5"]
    first = json.loads(runner.invoke(cli, args).stdout)
    second = json.loads(runner.invoke(cli, args + ["-w", "2"]).stdout)
    assert first["trials"] == second["trials"]


def test_verify_measurements(runner, tmp_path):
    """Test POVM files for the uncertainty suites"""
    paths = []
    for basis in ("computational", "fourier"):
        path = tmp_path / f"{basis}.json"
        result = runner.invoke(cli, ["gen", "povm", "--dim", "2", "--basis", basis, "-o", str(path)])
        assert result.exit_code == 0
        paths.append(str(path))
    result = runner.invoke(cli, ["verify", "-s", "uncertainty3", "-n", "1", "--measurements", *paths])
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["suite"]["measurements"]["overlap"] == pytest.approx(2**-0.5)


def test_verify_measurements_not_povm(runner, bell_file):
    result = runner.invoke(cli, ["verify", "-s", "uncertainty1", "--measurements", str(bell_file), str(bell_file)])
    assert result.exit_code == 2


def test_sweep(runner, bell_file):
    """Test sweep writes one CSV row per order and kind"""
    result = runner.invoke(
        cli, ["sweep", "-s", str(bell_file), "-k", "old-down", "-k", "old-up", "-a", "0.5,2,inf"]
    )
    assert result.exit_code == 0, result.output
    rows = list(csv.reader(io.StringIO(result.stdout)))
    assert rows[0] == ["alpha", "kind", "value"]
    assert len(rows) == 7
    assert [row[1] for row in rows[1:3]] == ["old-down", "old-up"]
    assert all(float(row[2]) == pytest.approx(-1) for row in rows[1:])


def test_sweep_file(runner, bell_file, tmp_path):
    out = tmp_path / "sweep.csv"
    result = runner.invoke(cli, ["sweep", "-s", str(bell_file), "-a", "2", "-o", str(out)])
    assert result.exit_code == 0, result.output
    assert len(out.read_text().splitlines()) == 5


def test_gen_state(runner, tmp_path):
    """Test generated states load back and are reproducible from the seed"""
    first, second = tmp_path / "first.json", tmp_path / "second.json"
    for path in (first, second):
        result = runner.invoke(cli, ["gen", "state", "-d", "2,3", "-l", "X,Y", "-r", "2", "--seed", "3", "-o", str(path)])
        assert result.exit_code == 0, result.output
    assert first.read_text() == second.read_text()
    state = load(first)
    assert isinstance(state, DensityOperator)
    assert state.layout.labels == ("X", "Y")


def test_gen_pure_state(runner):
    result = runner.invoke(cli, ["gen", "state", "-d", "2,2", "--pure"])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["type"] == "pure"


def test_gen_state_bad_rank(runner):
    result = runner.invoke(cli, ["gen", "state", "-d", "2", "-r", "5"])
    assert result.exit_code == 2


def test_gen_channel(runner, tmp_path):
    path = tmp_path / "channel.json"
    result = runner.invoke(cli, ["gen", "channel", "--dim-in", "2", "--dim-out", "3", "--env", "2", "-o", str(path)])
    assert result.exit_code == 0, result.output
    channel = load(path)
    assert isinstance(channel, KrausChannel)
    assert (channel.dim_in, channel.dim_out, len(channel.kraus_ops)) == (2, 3, 2)


def test_gen_bell(runner, tmp_path):
    path = tmp_path / "bell.json"
    result = runner.invoke(cli, ["gen", "bell", "-o", str(path)])
    assert result.exit_code == 0
    assert isinstance(load(path), PureState)


def test_gen_povm_trivial(runner, tmp_path):
    path = tmp_path / "povm.json"
    runner.invoke(cli, ["gen", "povm", "--dim", "3", "--basis", "trivial", "-o", str(path)])
    povm = load(path)
    assert isinstance(povm, Povm)
    assert len(povm) == 1


def test_indent_conflict(runner):
    result = runner.invoke(cli, ["gen", "bell", "-i", "2", "-I"])
    assert result.exit_code == 2


def test_config_show_and_save(runner, config_file):
    """Test config prints the defaults and --save writes the plist"""
    result = runner.invoke(cli, ["--config", str(config_file), "config", "--no-indent"])
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["path"] == str(config_file)
    assert data["config"]["trials"] == 200
    assert not config_file.exists()

    result = runner.invoke(cli, ["--config", str(config_file), "config", "--save"])
    assert result.exit_code == 0
    assert plistlib.loads(config_file.read_bytes())["seed"] == 0


def test_config_file_defaults(runner, config_file, tmp_path):
    """Test verify takes trials and seed from the config file"""
    with open(config_file, "wb") as f:
        plistlib.dump({"trials": 1, "seed": 42}, f)
    out = tmp_path / "report.json"
    result = runner.invoke(cli, ["--config", str(config_file), "verify", "-s", "limits", "-o", str(out)])
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text())
    assert (report["suite"]["trials"], report["suite"]["seed"]) == (1, 42)


def test_invalid_optimizer_config(runner, config_file, bell_file):
    with open(config_file, "wb") as f:
        plistlib.dump({"optimizer": {"step_rule": "newton"}}, f)
    result = runner.invoke(cli, ["--config", str(config_file), "compute", "-k", "old-down", "-a", "2", "-s", str(bell_file)])
    assert result.exit_code == 2


def test_verify_min_converged(runner, monkeypatch):
    """Test a converged share below --min-converged exits 1"""
    monkeypatch.setattr(VerificationReport, "converged_fraction", property(lambda self: 0.5))
    args = ["verify", "-s", "classical-oracle", "-n", "1", "-a", "2"]
    result = runner.invoke(cli, args + ["--min-converged", "0.5"])
    assert result.exit_code == 0, result.output
    result = runner.invoke(cli, args + ["--min-converged", "0.98"])
    assert result.exit_code == 1
    assert "only 50.0% of checks converged, need 98.0%" in result.stderr


def test_verify_min_converged_range(runner):
    result = runner.invoke(cli, ["verify", "-s", "limits", "--min-converged", "1.5"])
    assert result.exit_code == 2
