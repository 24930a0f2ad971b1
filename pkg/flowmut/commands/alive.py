"""
`flowmut alive`: re-run only the mutants that survived the previous run
"""
import click

from commands.common import (
    MUTANT_IDS,
    config_option,
    force_option,
    load_cli_config,
    out_option,
    progress_option,
    short_circuit_option,
    summary_line,
    workers_option,
)
from workflow import alive_workflow


@click.command("alive")
@config_option
@out_option
@workers_option
@short_circuit_option
@force_option
@click.option("--equivalent", "equivalent", type=MUTANT_IDS, default=None,
              help="Tag these mutants as equivalent (added to equivalent-mutants)")
@progress_option
def alive_command(config_path, out_dir, workers, short_circuit, force_mutants, equivalent, progress):
    """Re-execute the survivors of the last run and merge the results into its reports."""
    config = load_cli_config(config_path, out_dir, workers, short_circuit)
    for run in alive_workflow(config, extra_equivalent=equivalent or (), extra_force=force_mutants or (),
                              progress=progress):
        click.echo(summary_line(run.report))
