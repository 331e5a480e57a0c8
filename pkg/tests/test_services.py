import math

import pytest

from src.errors import ErrorHandler, MethodError, ValidationError, WorkbenchError
from src.models import CampaignEntry, MeshSpec, MsclReport, ToleranceOverrides, VerifyCampaign
from src.services import (
    CampaignService,
    VerificationService,
    build_mesh,
    build_method,
    campaign_passed,
    report_filename,
    validate_entry,
)

SMALL = MeshSpec(nx=2, ny=2, perturb=0.2, seed=3)
PAIR = MeshSpec(kind="two_equilateral")


@pytest.fixture
def handler():
    return ErrorHandler()


@pytest.fixture
def service(handler):
    return VerificationService(seed=0, error_handler=handler)


def rth_entry(**kwargs):
    return CampaignEntry(method="rth", degree=1, mesh=SMALL, regions={"count": 4}, **kwargs)


def cgh_pair_entry(**kwargs):
    return CampaignEntry(method="cgh", degree=1, mesh=PAIR, boundary={"kind": "zero"}, **kwargs)


def test_build_mesh_and_method():
    assert build_mesh(SMALL).n_cells == 8
    assert build_mesh(MeshSpec(kind="interval", cells=5)).n_cells == 5
    mesh = build_mesh(PAIR)
    two_sided = build_method(CampaignEntry(method="ldgh-a", degree=1, penalty={"plus": 2.0, "minus": 0.5}), mesh)
    (facet_id,) = mesh.internal_facet_ids
    minus = mesh.facets[facet_id].side_minus
    assert two_sided.penalty_for(minus.cell, minus.local_facet) == 0.5
    tabled = build_method(CampaignEntry(method="iph", degree=1, penalty={"value": 3.0, "table": [(0, 1, 7.0)]}), mesh)
    assert tabled.penalty_for(0, 1) == 7.0
    assert tabled.penalty_for(1, 1) == 3.0


def test_rth_entry_passes(service):
    report = service.run_entry(rth_entry())
    assert report.error is None
    assert report.passed
    assert set(report.gates) == {"closedness", "local", "jump_identity", "strong", "conservativity", "schur"}
    assert report.mesh.cells == 8
    assert report.newton_iters == 1
    assert len(report.local_mscl_per_cell) == 8
    assert len(report.strong_entries) >= 9
    assert report.reciprocity is None


def test_cgh_expected_failure_passes(service):
    report = service.run_entry(cgh_pair_entry(expect_strong_fail=True))
    assert report.passed
    assert "conservativity" not in report.gates
    assert report.strong_max == pytest.approx(0.5, abs=1e-12)


def test_cgh_without_expectation_fails(service):
    report = service.run_entry(cgh_pair_entry())
    assert not report.passed
    assert report.gates["strong"] is False
    assert report.gates["local"] is True


def test_open_system_fails_closedness(service):
    report = service.run_entry(rth_entry(system="non_hamiltonian_control"))
    assert report.closedness == 1.0
    assert report.gates["closedness"] is False
    assert not report.passed


def test_nonlinear_entry_has_no_schur_gate(service):
    report = service.run_entry(rth_entry(system="semilinear_sine"))
    assert report.error is None
    assert "schur" not in report.gates
    assert report.schur_asymmetry is None
    assert report.newton_iters >= 2


def test_rth_reciprocity_is_gated(service):
    report = service.run_entry(rth_entry(reciprocity=True))
    assert report.reciprocity <= 1e-10
    assert report.gates["reciprocity"] is True
    assert report.passed


def test_cgh_reciprocity_is_recorded_not_gated(service):
    report = service.run_entry(cgh_pair_entry(reciprocity=True, expect_strong_fail=True))
    assert report.reciprocity is not None and math.isfinite(report.reciprocity)
    assert "reciprocity" not in report.gates


def test_solver_failure_becomes_report_error(service, handler):
    entry = CampaignEntry(name="nch-even", method="nch", degree=2, mesh=SMALL)
    report = service.run_entry(entry)
    assert not report.passed
    assert report.error.startswith("SINGULAR_BLOCK: ")
    assert handler.get_error_stats()["failed_entries"] == ["nch-even"]


def test_validate_entry():
    validate_entry(rth_entry())
    with pytest.raises(MethodError):
        validate_entry(CampaignEntry(method="hdg-x", degree=1))
    with pytest.raises(ValidationError):
        validate_entry(CampaignEntry(method="cgh", degree=1, mesh={"kind": "interval"}, expect_strong_fail=True))


def test_report_filename():
    assert report_filename(3, CampaignEntry(name="rt h/1", method="rth", degree=1)) == "003-rt_h_1.json"


async def test_campaign_writes_reports_in_order(tmp_path, handler):
    campaign = VerifyCampaign(
        entries=[rth_entry(name="first"), cgh_pair_entry(name="second", expect_strong_fail=True)],
        seed=0,
    )
    service = CampaignService(VerificationService(error_handler=handler), concurrency=2, error_handler=handler)
    reports = await service.run(campaign, output_dir=tmp_path)
    assert [report.name for report in reports] == ["first", "second"]
    assert campaign_passed(reports)
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["000-first.json", "001-second.json"]
    written = MsclReport.from_json((tmp_path / "001-second.json").read_text(encoding="utf-8"))
    assert written == reports[1]


async def test_campaign_tolerance_overrides(tmp_path, handler):
    campaign = VerifyCampaign(
        entries=[cgh_pair_entry(expect_strong_fail=True)],
        tolerances=ToleranceOverrides(strong=1.0),
    )
    reports = await CampaignService(error_handler=handler).run(campaign, output_dir=tmp_path)
    assert reports[0].gates["strong"] is False
    assert not campaign_passed(reports)


async def test_unexpected_exceptions_become_error_reports(tmp_path, handler, mocker):
    def flaky(entry):
        if entry.label == "bad":
            raise RuntimeError("boom")
        return MsclReport(name=entry.label, method=entry.method, degree=entry.degree, system=entry.system, passed=True)

    mocker.patch.object(VerificationService, "run_entry", side_effect=flaky)
    campaign = VerifyCampaign(entries=[rth_entry(name="good"), rth_entry(name="bad")])
    reports = await CampaignService(error_handler=handler).run(campaign, output_dir=tmp_path)
    assert reports[0].passed
    assert reports[1].error == "CONVERTED_RUNTIMEERROR: boom"
    assert not campaign_passed(reports)
    assert len(list(tmp_path.iterdir())) == 2


async def test_unwritable_report_directory(tmp_path, handler):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    campaign = VerifyCampaign(entries=[rth_entry()])
    service = CampaignService(error_handler=handler)
    with pytest.raises(WorkbenchError):
        await service.write_reports(campaign, [MsclReport(name="x", method="rth", degree=1, system="poisson")], blocker / "out")
