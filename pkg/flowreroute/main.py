import logging
import sys
from typing import Optional

import click
from dotenv import load_dotenv

from .commands.generate import decode, gen_random, gen_sat2, gen_satdag
from .commands.instance import oracle, solve, validate, verify
from .settings import settings

# Load environment variables
load_dotenv()


class ExitCodeGroup(click.Group):
    """
    Group whose exit status is the integer returned by the invoked command; usage errors exit with 1
    """

    def main(self, *args, standalone_mode: bool = True, **kwargs):
        try:
            code = super().main(*args, standalone_mode=False, **kwargs)
        except click.ClickException as e:
            e.show()
            code = 1
        except click.Abort:
            click.echo("Aborted!", err=True)
            code = 1
        code = code if isinstance(code, int) else 0
        if standalone_mode:
            sys.exit(code)
        return code


@click.group(cls=ExitCodeGroup)
@click.option("--log-level", default=None, help="Logging level on standard error (FLOWREROUTE_LOG_LEVEL)")
def cli(log_level: Optional[str]):
    """
    Congestion-free rerouting of unsplittable flows
    """
    level = (log_level or settings.log_level()).upper()
    logging.basicConfig(
        level=level if isinstance(logging.getLevelName(level), int) else logging.WARNING,
        stream=sys.stderr,
        force=True,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


# Register commands
for command in (validate, solve, verify, oracle, gen_sat2, gen_satdag, gen_random, decode):
    cli.add_command(command)

if __name__ == "__main__":
    cli()
