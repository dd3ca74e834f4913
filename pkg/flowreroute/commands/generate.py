import logging
from pathlib import Path
from typing import Optional

import click
from pydantic import ValidationError

from ..models.generators import RandomParams
from ..models.report import ExitReport
from ..services.codec_service import CodecService
from ..services.random_service import RandomService
from ..services.sat_service import SatService
from ..settings import settings
from .reporting import load_instance, read_text, reported, write_artifact

logger = logging.getLogger(__name__)

FILE = click.Path(dir_okay=False, path_type=Path)


def meta_path(out: Path) -> Path:
    return out.with_suffix(".meta.json")


def write_gadget(command: str, out: Path, net, meta) -> ExitReport:
    artifacts = [
        write_artifact(out, CodecService.serialize_instance(net)),
        write_artifact(meta_path(out), CodecService.serialize_meta(meta)),
    ]
    return ExitReport(
        command=command,
        verdict="generated",
        artifacts=artifacts,
        details={"pairs": net.k, "vertices": len(net.vertices), "edges": len(net.edges)},
    )


@click.command("gen-sat2")
@click.argument("cnf", type=FILE)
@click.option("--out", type=FILE, required=True)
@reported("gen-sat2")
def gen_sat2(cnf: Path, out: Path) -> ExitReport:
    """
    Two-flow instance that is reroutable iff the 3-SAT formula is satisfiable
    """
    formula = SatService.parse_dimacs(read_text(cnf))
    net, meta = SatService.gen_2flow_sat(formula)
    return write_gadget("gen-sat2", out, net, meta)


@click.command("gen-satdag")
@click.argument("cnf", type=FILE)
@click.option("--out", type=FILE, required=True)
@reported("gen-satdag")
def gen_satdag(cnf: Path, out: Path) -> ExitReport:
    """
    Acyclic many-flow instance that is reroutable iff the 3-SAT formula is satisfiable
    """
    formula = SatService.parse_dimacs(read_text(cnf))
    net, meta = SatService.gen_dag_sat(formula)
    return write_gadget("gen-satdag", out, net, meta)


@click.command("gen-random")
@click.option("--seed", type=int, default=None, help="Random seed, FLOWREROUTE_SEED takes precedence")
@click.option("--vertices", type=int, default=8, show_default=True)
@click.option("--pairs", type=int, default=2, show_default=True)
@click.option("--cap-min", type=int, default=1, show_default=True)
@click.option("--cap-max", type=int, default=3, show_default=True)
@click.option("--demand-min", type=int, default=1, show_default=True)
@click.option("--demand-max", type=int, default=2, show_default=True)
@click.option("--out", type=FILE, required=True)
@reported("gen-random")
def gen_random(seed: Optional[int], vertices: int, pairs: int, cap_min: int, cap_max: int,
               demand_min: int, demand_max: int, out: Path) -> ExitReport:
    """
    Seeded random DAG instance
    """
    override = settings.seed()
    if override is not None:
        if seed is not None and seed != override:
            logger.info("FLOWREROUTE_SEED=%d overrides --seed %d", override, seed)
        seed = override
    if seed is None:
        raise click.UsageError("pass --seed or set FLOWREROUTE_SEED")
    try:
        params = RandomParams(seed=seed, vertices=vertices, pairs=pairs, cap_min=cap_min, cap_max=cap_max,
                              demand_min=demand_min, demand_max=demand_max)
    except ValidationError as e:
        error = e.errors()[0]
        raise click.BadParameter(error["msg"], param_hint=".".join(str(p) for p in error["loc"]) or None)
    net, meta = RandomService.gen_random_dag(params)
    report = write_gadget("gen-random", out, net, meta)
    return report.model_copy(update={"details": {**report.details, "seed": seed}})


@click.command("decode")
@click.argument("instance", type=FILE)
@click.argument("meta", type=FILE)
@click.argument("schedule", type=FILE)
@reported("decode")
def decode(instance: Path, meta: Path, schedule: Path) -> ExitReport:
    """
    Read the satisfying assignment off a feasible schedule of a DAG gadget
    """
    net = load_instance(instance)
    gadget = CodecService.parse_meta(read_text(meta))
    parsed = CodecService.parse_schedule(read_text(schedule))
    assignment = SatService.decode_assignment(net, gadget, parsed)
    values = {str(i): int(v) for i, v in sorted(assignment.values.items())}
    return ExitReport(
        command="decode",
        verdict="decoded",
        details={
            "assignment": values,
            "message": " ".join(f"x{i}={v}" for i, v in values.items()),
        },
    )
