"""
flowmut command line

Usage:
    flowmut run     [--config flowmut.json] [--out DIR] [--workers N] [--force-mutants IDS]
    flowmut alive   [--config flowmut.json] [--equivalent IDS] [--force-mutants IDS]
    flowmut exec    [--config flowmut.json] [--program NAME] [--mutant ID] [--test NAME]
    flowmut mutants [--config flowmut.json] [--program NAME]
"""
import logging

import click

from commands.alive import alive_command
from commands.exec import exec_command
from commands.mutants import mutants_command
from commands.run import run_command
from modules import logger, set_console_level
from modules.errors import FlowMutError
from version import __version__


class FlowMutGroup(click.Group):
    """Maps FlowMutError to its exit code instead of a traceback"""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except FlowMutError as exc:
            logger.error(f"{type(exc).__name__}: {exc}")
            click.echo(f"error: {exc}", err=True)
            ctx.exit(int(exc.exit_code))


@click.group(cls=FlowMutGroup)
@click.version_option(__version__, prog_name="flowmut")
@click.option("--verbose", "-v", is_flag=True, help="Log debug output to the console")
def cli(verbose):
    """Mutation testing for .dflow dataflow programs."""
    if verbose:
        set_console_level(logging.DEBUG)


# Register command modules
cli.add_command(run_command)
cli.add_command(alive_command)
cli.add_command(exec_command)
cli.add_command(mutants_command)


def main():
    cli(prog_name="flowmut")


if __name__ == "__main__":
    main()
