import json

import pytest

from src.geometry import load_mesh
from src.models import MsclReport
from src.scripts.cli import main


def passing_report(name="entry", passed=True):
    return MsclReport(name=name, method="rth", degree=1, system="poisson", local_mscl_max=1e-16, passed=passed)


@pytest.fixture
def mock_campaign(mocker):
    service = mocker.patch("src.scripts.cli.CampaignService")
    service.return_value.run = mocker.AsyncMock(return_value=[passing_report()])
    return service.return_value.run


def test_check_system_closed(capsys):
    assert main(["check-system", "--system", "semilinear_sine", "--m", "2"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_check_system_json(capsys):
    assert main(["check-system", "--system", "poisson", "--json"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["passed"] is True
    assert document["residual"] <= document["tolerance"]


def test_check_system_open(capsys):
    assert main(["check-system", "--system", "non_hamiltonian_control"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_check_system_unknown(capsys):
    assert main(["check-system", "--system", "helmholtz"]) == 2
    assert "unknown system" in capsys.readouterr().err


def test_counterexample(capsys):
    assert main(["counterexample"]) == 0
    out = capsys.readouterr().out
    assert "variation_pair  PASS" in out
    assert "strong residual (whole mesh)" in out


def test_counterexample_json(capsys):
    assert main(["counterexample", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True


def test_counterexample_degree_two(capsys):
    assert main(["counterexample", "--degree", "2"]) == 2


def test_mesh_to_stdout(capsys):
    assert main(["mesh", "--two-equilateral"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["dim"] == 2
    assert len(document["vertices"]) == 4
    assert len(document["cells"]) == 2


def test_mesh_to_file(tmp_path):
    path = tmp_path / "rect.json"
    assert main(["mesh", "--rect", "2x1", "--nx", "2", "--ny", "2", "--perturb", "0.1", "--seed", "4", "--out", str(path)]) == 0
    mesh = load_mesh(path)
    assert mesh.n_cells == 8
    assert mesh.total_volume() == pytest.approx(2.0)


def test_mesh_rejects_large_perturbation(capsys):
    assert main(["mesh", "--perturb", "0.5"]) == 2


def test_verify_single_entry(mock_campaign, capsys):
    assert main(["verify", "--method", "cgh", "--degree", "1", "--two-equilateral", "--expect-strong-fail"]) == 0
    (campaign,) = mock_campaign.await_args.args
    (entry,) = campaign.entries
    assert entry.method == "cgh"
    assert entry.expect_strong_fail
    assert entry.mesh.kind.value == "two_equilateral"
    assert "PASS" in capsys.readouterr().out


def test_verify_gate_failure(mock_campaign):
    mock_campaign.return_value = [passing_report(passed=False)]
    assert main(["verify", "--method", "rth", "--degree", "1"]) == 1


def test_verify_campaign_file(mock_campaign, tmp_path):
    document = {
        "entries": [
            {"method": "rth", "degree": 1, "mesh": {"nx": 2, "ny": 2}},
            {"method": "ldgh-b", "degree": 0, "mesh": {"nx": 2, "ny": 2}},
        ],
        "seed": 5,
    }
    path = tmp_path / "campaign.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    assert main(["verify", "--campaign", str(path), "--out", str(tmp_path / "reports")]) == 0
    (campaign,) = mock_campaign.await_args.args
    assert [entry.method for entry in campaign.entries] == ["rth", "ldgh-b"]
    assert campaign.output == str(tmp_path / "reports")


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--method", "hdg-x"],
        ["verify", "--system", "poisson:f"],
        ["verify", "--campaign", "missing.json"],
        ["verify", "--method", "cgh", "--interval", "0", "1", "--expect-strong-fail"],
        ["bogus"],
    ],
)
def test_usage_errors(mock_campaign, argv, capsys):
    assert main(argv) == 2
    mock_campaign.assert_not_called()


def test_solve_json(capsys):
    assert main(["solve", "--method", "cgh", "--two-equilateral", "--seed", "1", "--json"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["iterations"] == 1
    assert summary["cells"] == 2
    assert len(summary["trace"]) == 4


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == 0
