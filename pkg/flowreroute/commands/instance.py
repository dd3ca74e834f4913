import logging
from pathlib import Path
from typing import Optional

import click

from ..errors.errors import InternalSolverError
from ..models.oracle import OracleVerdict, SearchLimits
from ..models.report import ExitReport
from ..models.solver import SolveVerdict
from ..services.codec_service import CodecService
from ..services.network_service import NetworkService
from ..services.oracle_service import OracleService
from ..services.solver_service import SolverService
from ..settings import settings
from .reporting import load_instance, read_text, reported, write_artifact

logger = logging.getLogger(__name__)

FILE = click.Path(dir_okay=False, path_type=Path)


@click.command("validate")
@click.argument("instance", type=FILE)
@reported("validate")
def validate(instance: Path) -> ExitReport:
    """
    Check an instance against the update flow network invariants
    """
    net = load_instance(instance)
    violations = NetworkService.validate_network(net)
    if violations:
        return ExitReport(
            command="validate",
            verdict="invalid",
            details={
                "message": f"{len(violations)} violation(s)",
                "violations": [v.model_dump(mode="json", exclude_none=True) for v in violations],
            },
        )
    return ExitReport(command="validate", verdict="ok", details={"pairs": net.k, "edges": len(net.edges)})


@click.command("solve")
@click.argument("instance", type=FILE)
@click.option("--out", type=FILE, default=None, help="Schedule file, <instance stem>.schedule.json by default")
@click.option("--dump-blocks", is_flag=True, help="Print the block decomposition on standard error")
@click.option("--dump-rh", is_flag=True, help="Print the label graph on standard error")
@click.option("--singleton-rounds", is_flag=True, help="Emit one update per round")
@reported("solve")
def solve(instance: Path, out: Optional[Path], dump_blocks: bool, dump_rh: bool, singleton_rounds: bool) -> ExitReport:
    """
    Decide a DAG instance and write a consistent schedule when one exists
    """
    net = load_instance(instance)
    result = SolverService.solve(net)
    if dump_blocks and result.blocks is not None:
        click.echo(CodecService.dumps({"blocks": [b.describe() for b in result.blocks.blocks]}), err=True, nl=False)
    if dump_rh and result.rh is not None:
        click.echo(CodecService.dumps(result.rh.describe()), err=True, nl=False)

    verdict = result.verdict.value
    details = {"message": result.detail} if result.detail else {}
    artifacts = []

    if result.verdict == SolveVerdict.FEASIBLE:
        schedule = result.schedule
        if singleton_rounds:
            schedule = schedule.singleton_rounds()
            report = NetworkService.verify_schedule(net, schedule)
            if not report.ok:
                raise InternalSolverError(f"singleton refinement fails at round {report.round}")
        target = out or instance.with_name(f"{instance.stem}.schedule.json")
        artifacts.append(write_artifact(target, CodecService.serialize_schedule(schedule)))
        details["rounds"] = len(schedule.rounds)
    elif result.verdict == SolveVerdict.INFEASIBLE and result.witness is not None:
        details["witness"] = result.witness.describe()
    elif result.verdict == SolveVerdict.NOT_A_DAG:
        details["cycle"] = list(result.cycle or ())
        details["hint"] = "the update graph is cyclic, run `oracle` on this instance"
    elif result.verdict == SolveVerdict.INTERNAL_ERROR:
        target = instance.with_name(f"{instance.stem}.counterexample.json")
        dump = {
            "instance": CodecService.serialize_instance(net),
            "detail": result.detail,
            "rh": result.rh.describe() if result.rh else None,
        }
        artifacts.append(write_artifact(target, CodecService.dumps(dump)))

    return ExitReport(command="solve", verdict=verdict, artifacts=artifacts, counters=result.counters, details=details)


@click.command("verify")
@click.argument("instance", type=FILE)
@click.argument("schedule", type=FILE)
@reported("verify")
def verify(instance: Path, schedule: Path) -> ExitReport:
    """
    Replay a schedule round by round against the consistency rule
    """
    net = load_instance(instance)
    parsed = CodecService.parse_schedule(read_text(schedule))
    report = NetworkService.verify_schedule(net, parsed)
    if report.ok:
        return ExitReport(command="verify", verdict="ok", details={"rounds": len(parsed.rounds)})
    kinds = sorted({v.kind.value for v in report.violations})
    where = f"round {report.round}" if report.round is not None else "after the last round"
    return ExitReport(
        command="verify",
        verdict="violation",
        details={
            "message": f"{', '.join(kinds)} {where}",
            "round": report.round,
            "violations": [v.model_dump(mode="json", exclude_none=True) for v in report.violations],
        },
    )


@click.command("oracle")
@click.argument("instance", type=FILE)
@click.option("--max-states", type=click.IntRange(min=1), default=None, help="State budget (FLOWREROUTE_MAX_STATES)")
@click.option("--max-seconds", type=click.FloatRange(min=0, min_open=True), default=None, help="Wall-clock budget (FLOWREROUTE_MAX_SECONDS)")
@click.option("--out", type=FILE, default=None, help="Write the schedule found here")
@click.option("--literal", is_flag=True, help="Search over every effective update, without the activation/deactivation reduction")
@reported("oracle")
def oracle(instance: Path, max_states: Optional[int], max_seconds: Optional[float], out: Optional[Path], literal: bool) -> ExitReport:
    """
    Exhaustive search for a consistent schedule, also on cyclic instances
    """
    net = load_instance(instance)
    limits = SearchLimits(
        max_states=max_states or settings.max_states(),
        max_seconds=max_seconds or settings.max_seconds(),
    )
    result = OracleService.brute_force(net, limits, reduce=not literal)
    artifacts = []
    details = {"message": result.detail} if result.detail else {}
    if result.verdict == OracleVerdict.FEASIBLE:
        details["updates"] = len(result.schedule.rounds)
        if out is not None:
            artifacts.append(write_artifact(out, CodecService.serialize_schedule(result.schedule)))
    return ExitReport(
        command="oracle",
        verdict=result.verdict.value,
        artifacts=artifacts,
        counters={"states": result.states_visited},
        details=details,
    )
