"""
Command-line front end: hdg-msym {check-system, verify, counterexample, mesh, solve}.

Exit codes: 0 when every gate passes, 1 on a numeric gate failure,
2 on usage or configuration errors.
"""
import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pydantic
from dotenv import load_dotenv

from ..config import settings
from ..errors import (
    EXIT_GATE_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    MeshFormatError,
    MethodError,
    SystemDefinitionError,
    ValidationError,
    WorkbenchError,
    global_error_handler,
)
from ..geometry import save_mesh
from ..hdg import FAMILY_ALIASES, build_trace_layout, local_space_table, random_boundary_data, solve
from ..models import (
    BoundaryKind,
    BoundarySpec,
    CampaignEntry,
    MeshKind,
    MeshSpec,
    MsclReport,
    PenaltySpec,
    RegionSamplerSpec,
    VerifyCampaign,
    dumps,
)
from ..msym import cgh_counterexample
from ..services import CampaignService, build_method, build_mesh, campaign_passed, validate_entry
from ..system import closedness_residual, parse_system_spec, sample_states
from ..system.hamiltonian import SAMPLE_BOUND, SAMPLE_COUNT

logger = logging.getLogger(__name__)

SETUP_ERRORS = (ValidationError, SystemDefinitionError, MethodError, MeshFormatError)


def configure_logging() -> None:
    logging.basicConfig(
        level=settings.log_level.upper(),
        format=settings.log_format or "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )


def _parse_rect(text: str) -> List[float]:
    try:
        width, height = (float(part) for part in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}")
    return [width, height]


def add_mesh_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--mesh", type=Path, help="Mesh document to load")
    group.add_argument("--two-equilateral", action="store_true", help="The two equilateral triangles mesh")
    group.add_argument("--rect", type=_parse_rect, metavar="WxH", help="Triangulated rectangle [0,W]x[0,H]")
    group.add_argument("--interval", type=float, nargs=2, metavar=("A", "B"), help="Uniform 1-D mesh of [A,B]")
    parser.add_argument("--nx", type=int, default=4)
    parser.add_argument("--ny", type=int, default=4)
    parser.add_argument("--perturb", type=float, default=0.0)
    parser.add_argument("--cells", type=int, default=8)


def add_method_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--method", default="rth", help=f"One of {', '.join(sorted(FAMILY_ALIASES))}")
    parser.add_argument("--degree", type=int, default=1)
    parser.add_argument("--system", default="poisson", help="name[:key=value,...]")
    penalty = parser.add_mutually_exclusive_group()
    penalty.add_argument("--penalty", type=float, default=None, help="Constant penalty lambda")
    penalty.add_argument("--penalty-file", type=Path, help="JSON penalty spec (value/plus/minus/table)")


def mesh_spec_from_args(args: argparse.Namespace) -> MeshSpec:
    seed = args.seed if args.seed is not None else settings.seed
    if args.mesh is not None:
        return MeshSpec(kind=MeshKind.FILE, path=str(args.mesh))
    if args.two_equilateral:
        return MeshSpec(kind=MeshKind.TWO_EQUILATERAL)
    if args.interval is not None:
        return MeshSpec(kind=MeshKind.INTERVAL, interval=tuple(args.interval), cells=args.cells)
    width, height = args.rect if args.rect is not None else (1.0, 1.0)
    return MeshSpec(
        kind=MeshKind.RECT, width=width, height=height, nx=args.nx, ny=args.ny, perturb=args.perturb, seed=seed
    )


def penalty_spec_from_args(args: argparse.Namespace) -> PenaltySpec:
    if args.penalty_file is not None:
        try:
            return PenaltySpec.model_validate_json(args.penalty_file.read_text())
        except OSError as e:
            raise ValidationError(f"cannot read penalty file: {e}", field="penalty_file")
    if args.penalty is not None:
        return PenaltySpec(value=args.penalty)
    return PenaltySpec(value=settings.default_penalty)


def entry_from_args(args: argparse.Namespace) -> CampaignEntry:
    return CampaignEntry(
        method=args.method,
        degree=args.degree,
        system=args.system,
        mesh=mesh_spec_from_args(args),
        penalty=penalty_spec_from_args(args),
        boundary=BoundarySpec(kind=BoundaryKind.RANDOM, seed=args.seed),
        regions=RegionSamplerSpec(count=args.regions, seed=args.seed),
        expect_strong_fail=args.expect_strong_fail,
        reciprocity=args.reciprocity,
    )


def cmd_check_system(args: argparse.Namespace) -> int:
    """Closedness residual of a builtin system; exit 0 iff it is within tolerance."""
    try:
        system = parse_system_spec(args.system, m=args.m)
    except SystemDefinitionError as e:
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_USAGE
    seed = settings.seed if args.seed is None else args.seed
    states = sample_states(system.m, system.n, count=args.samples, seed=seed, bound=args.radius)
    residual = closedness_residual(system, states)
    tolerance = settings.tolerance_config.closedness
    passed = residual <= tolerance
    if args.json:
        print(dumps({"system": system.label, "residual": residual, "tolerance": tolerance, "passed": passed}))
    else:
        verdict = "PASS" if passed else "FAIL"
        print(f"{system.label}: closedness residual {residual:.3e} (tol {tolerance:.0e}) {verdict}")
    return EXIT_OK if passed else EXIT_GATE_FAILURE


def _summary_table(reports: Sequence[MsclReport]) -> str:
    def cell(value: Optional[float]) -> str:
        return "-" if value is None else f"{value:.2e}"

    header = f"{'entry':<36} {'local':>9} {'strong':>9} {'conserv':>9} {'schur':>9}  verdict"
    lines = [header, "-" * len(header)]
    for report in reports:
        row = report.summary_row()
        if report.error:
            verdict = f"ERROR ({report.error})"
        elif report.passed:
            verdict = "PASS (strong expected-fail)" if report.expect_strong_fail else "PASS"
        else:
            verdict = "FAIL"
        lines.append(
            f"{str(row['name'])[:36]:<36} {cell(row['local']):>9} {cell(row['strong']):>9} "
            f"{cell(row['conservativity']):>9} {cell(row['schur']):>9}  {verdict}"
        )
    return "\n".join(lines)


def cmd_verify(args: argparse.Namespace) -> int:
    """Run a campaign file or a single entry built from flags."""
    try:
        if args.campaign is not None:
            campaign = VerifyCampaign.from_json(args.campaign.read_text())
        else:
            campaign = VerifyCampaign(entries=[entry_from_args(args)], seed=args.seed)
        if args.out is not None:
            campaign = campaign.model_copy(update={"output": str(args.out)})
        for entry in campaign.entries:
            validate_entry(entry)
    except (pydantic.ValidationError, OSError) as e:
        print(f"error: invalid campaign: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SETUP_ERRORS as e:
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_USAGE

    reports = asyncio.run(CampaignService().run(campaign))
    if args.json:
        print(dumps([report.model_dump(mode="json") for report in reports]))
    else:
        print(_summary_table(reports))
    return EXIT_OK if campaign_passed(reports) else EXIT_GATE_FAILURE


def cmd_counterexample(args: argparse.Namespace) -> int:
    """Reproduce the CG_H counterexample and compare each sub-check with its closed form."""
    if args.degree != 1:
        print("error: the counterexample is defined at degree 1", file=sys.stderr)
        return EXIT_USAGE
    record = cgh_counterexample(args.degree)
    if args.json:
        print(record.to_json())
    else:
        for check in record.checks:
            verdict = "PASS" if check.passed else "FAIL"
            expected = np.array(check.expected)
            computed = np.array(check.computed)
            print(f"{check.name:<15} {verdict}  max deviation {check.error:.3e}")
            if expected.size == 1:
                print(f"    expected {expected.item():.17g}  computed {computed.item():.17g}")
        print(f"strong residual (whole mesh): {record.strong_residual:.17g}  absolute {record.strong_absolute:.17g}")
    return EXIT_OK if record.passed else EXIT_GATE_FAILURE


def cmd_mesh(args: argparse.Namespace) -> int:
    """Print or save a generated mesh document."""
    try:
        mesh = build_mesh(mesh_spec_from_args(args))
    except pydantic.ValidationError as e:
        print(f"error: {e.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_USAGE
    payload = save_mesh(mesh, args.out)
    if args.out is None:
        print(payload.decode("utf-8"))
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    """Solve one configuration with seeded random boundary data."""
    try:
        entry = entry_from_args(args)
        mesh = build_mesh(entry.mesh)
        system = parse_system_spec(entry.system, m=mesh.dim)
        method = build_method(entry, mesh)
    except pydantic.ValidationError as e:
        print(f"error: {e.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_USAGE
    except SETUP_ERRORS as e:
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_USAGE

    layout = build_trace_layout(mesh, local_space_table(method, mesh.dim, system.n))
    seed = settings.seed if args.seed is None else args.seed
    solution = solve(mesh, method, system, random_boundary_data(layout, seed))
    summary = {**solution.summary(), "trace": solution.trace}
    if args.json:
        print(dumps(summary))
    else:
        print(f"{summary['method']} / {summary['system']}: {summary['iterations']} Newton iterations, "
              f"|R| = {summary['residual']:.3e}")
        print("uhat:", " ".join(f"{v:.6g}" for v in solution.trace))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hdg-msym", description="HDG multisymplecticity workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check-system", help="Closedness residual of a builtin system")
    check.add_argument("--system", default="poisson")
    check.add_argument("--m", type=int, default=None, help="Spatial dimension")
    check.add_argument("--samples", type=int, default=SAMPLE_COUNT)
    check.add_argument("--radius", type=float, default=SAMPLE_BOUND, help="Bound on |u| and |sigma|")
    check.add_argument("--seed", type=int, default=None)
    check.add_argument("--json", action="store_true")
    check.set_defaults(handler=cmd_check_system)

    verify = sub.add_parser("verify", help="Run MSCL verification for a campaign or one entry")
    verify.add_argument("--campaign", type=Path, help="Campaign JSON document")
    add_method_arguments(verify)
    add_mesh_arguments(verify)
    verify.add_argument("--regions", type=int, default=settings.region_samples, help="Sampled region count")
    verify.add_argument("--expect-strong-fail", action="store_true")
    verify.add_argument("--reciprocity", action="store_true", help="Record the discrete reciprocity residual")
    verify.add_argument("--seed", type=int, default=None)
    verify.add_argument("--out", type=Path, help="Report directory")
    verify.add_argument("--json", action="store_true")
    verify.set_defaults(handler=cmd_verify)

    counter = sub.add_parser("counterexample", help="Reproduce the CG_H two-triangle counterexample")
    counter.add_argument("--degree", type=int, default=1)
    counter.add_argument("--json", action="store_true")
    counter.set_defaults(handler=cmd_counterexample)

    mesh = sub.add_parser("mesh", help="Generate a mesh document")
    add_mesh_arguments(mesh)
    mesh.add_argument("--seed", type=int, default=None)
    mesh.add_argument("--out", type=Path)
    mesh.set_defaults(handler=cmd_mesh)

    solve_cmd = sub.add_parser("solve", help="Solve one configuration")
    add_method_arguments(solve_cmd)
    add_mesh_arguments(solve_cmd)
    solve_cmd.add_argument("--seed", type=int, default=None)
    solve_cmd.add_argument("--json", action="store_true")
    solve_cmd.set_defaults(handler=cmd_solve, regions=0, expect_strong_fail=False, reciprocity=False)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return args.handler(args)
    except WorkbenchError as e:
        error = global_error_handler.handle_error(e, {"command": args.command})
        print(f"error: {error.message}", file=sys.stderr)
        return global_error_handler.exit_code_for(error)


if __name__ == "__main__":
    sys.exit(main())
