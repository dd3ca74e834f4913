import functools
import logging
import time
from pathlib import Path
from typing import Any, Callable, Dict

import click

from ..errors.errors import FlowUpdateError, InstanceFormatError, InvalidInstanceError
from ..models.network import UpdateFlowNetwork
from ..models.report import ExitReport
from ..services.codec_service import CodecService

logger = logging.getLogger(__name__)

# verdict -> process exit code
EXIT_CODES: Dict[str, int] = {
    "ok": 0,
    "feasible": 0,
    "generated": 0,
    "decoded": 0,
    "invalid": 2,
    "infeasible": 2,
    "not-a-dag": 2,
    "violation": 2,
    "limit-exceeded": 3,
    "internal-error": 4,
}


def read_text(path: Path) -> str:
    return Path(path).read_text(encoding="utf-8")


def load_instance(path: Path) -> UpdateFlowNetwork:
    return CodecService.parse_instance(read_text(path))


def write_artifact(path: Path, text: str) -> str:
    Path(path).write_text(text, encoding="utf-8")
    logger.info("wrote %s", path)
    return str(path)


def error_details(exc: FlowUpdateError) -> Dict[str, Any]:
    details: Dict[str, Any] = {"error": exc.description, "message": str(exc)}
    if isinstance(exc, InstanceFormatError) and exc.location:
        details["location"] = exc.location
    if isinstance(exc, InvalidInstanceError):
        details["violations"] = [v.model_dump(mode="json", exclude_none=True) for v in exc.violations]
    return details


def emit(report: ExitReport, summary: str) -> None:
    click.echo(CodecService.dumps(report.model_dump(mode="json")), nl=False)
    click.echo(f"{report.command}: {summary}", err=True)


def reported(command: str) -> Callable:
    """
    Run a command body returning an ExitReport, print it and turn its verdict into the exit code
    """
    def decorate(func: Callable[..., ExitReport]) -> Callable[..., int]:
        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> int:
            started = time.monotonic()

            def elapsed() -> int:
                return int((time.monotonic() - started) * 1000)

            try:
                report = func(*args, **kwargs)
            except click.ClickException:
                raise
            except FlowUpdateError as e:
                logger.debug("%s failed", command, exc_info=True)
                report = ExitReport(command=command, verdict="error", timing_ms=elapsed(), details=error_details(e))
                emit(report, f"{e.description}: {e}")
                return e.code
            except OSError as e:
                report = ExitReport(command=command, verdict="error", timing_ms=elapsed(),
                                    details={"error": "I/O error", "message": str(e)})
                emit(report, f"I/O error: {e}")
                return 1
            except Exception as e:
                logger.exception("unexpected failure in %s", command)
                report = ExitReport(command=command, verdict="internal-error", timing_ms=elapsed(),
                                    details={"error": "Internal error", "message": str(e)})
                emit(report, f"internal error: {e}")
                return 4

            report = report.model_copy(update={"timing_ms": elapsed()})
            summary = report.verdict
            if "message" in report.details:
                summary += f" ({report.details['message']})"
            emit(report, summary)
            return EXIT_CODES[report.verdict]
        return wrapper
    return decorate
