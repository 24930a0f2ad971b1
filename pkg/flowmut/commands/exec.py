"""
`flowmut exec`: run the original or one mutant and print what it produced
"""
import click

from commands.common import config_option, load_cli_config
from modules.value_types import format_value
from workflow import exec_workflow


def _indent(text: str) -> str:
    return "\n".join("    " + line for line in text.splitlines())


@click.command("exec")
@config_option
@click.option("--program", default=None, help="Program to execute when several are configured")
@click.option("--mutant", "mutant_id", type=click.IntRange(min=1), default=None,
              help="Mutant id; the original program when omitted")
@click.option("--test", "test_name", default=None, help="Single test to run; the whole suite when omitted")
def exec_command(config_path, program, mutant_id, test_name):
    """Execute one program variant on its tests and print outputs and verdicts."""
    config = load_cli_config(config_path)
    report = exec_workflow(config, program, mutant_id, test_name)

    if report.mutant is None:
        click.echo(f"{report.program}: original program")
    else:
        m = report.mutant
        status = f", removed by {m.removed_by}" if m.is_removed else ""
        click.echo(f"{report.program}: mutant {m.id} ({m.operator.value} at site "
                   f"{', '.join(str(s) for s in m.sites)}{status}): {m.description}")
        click.echo("  original:")
        click.echo(_indent(report.original_text))
        click.echo("  mutant:")
        click.echo(_indent(report.mutated_text))

    for run in report.runs:
        click.echo(f"{run.test.name}: {run.result.verdict.value}")
        if run.outcome.ok:
            for name, data in run.outcome.outputs.items():
                click.echo(f"  {name} = [{', '.join(format_value(v) for v in data.elements)}]")
        if run.result.detail:
            click.echo(f"  {run.result.detail}")
