"""
`flowmut run`: the full mutation testing workflow
"""
import click

from commands.common import (
    config_option,
    force_option,
    load_cli_config,
    out_option,
    progress_option,
    short_circuit_option,
    summary_line,
    workers_option,
)
from modules import logger
from workflow import run_workflow


@click.command("run")
@config_option
@out_option
@workers_option
@short_circuit_option
@force_option
@click.option("--force-removed", is_flag=True, help="Execute every mutant removed by a reduction rule")
@progress_option
def run_command(config_path, out_dir, workers, short_circuit, force_mutants, force_removed, progress):
    """Generate, reduce and execute every mutant, then write the reports."""
    config = load_cli_config(config_path, out_dir, workers, short_circuit)
    runs = run_workflow(config, force_removed=force_removed, extra_force=force_mutants or (), progress=progress)
    for run in runs:
        click.echo(summary_line(run.report))
        click.echo(f"  reports: {run.json_path}, {run.html_path}")
    logger.info(f"Run finished for {len(runs)} program(s)")
