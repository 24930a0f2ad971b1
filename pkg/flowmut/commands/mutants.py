"""
`flowmut mutants`: list generated mutants without executing anything
"""
import click

from commands.common import config_option, load_cli_config
from workflow import list_mutants


@click.command("mutants")
@config_option
@click.option("--program", default=None, help="Only list the mutants of this program")
def mutants_command(config_path, program):
    """List every mutant with its operator, sites and reduction status."""
    config = load_cli_config(config_path)
    for graph, mutants in list_mutants(config, program):
        removed = sum(1 for m in mutants if m.is_removed)
        click.echo(f"{graph.name}: {len(mutants)} generated, {removed} removed")
        for m in mutants:
            sites = ",".join(str(s) for s in m.sites)
            status = f"Removed ({m.removed_by})" if m.is_removed else m.status.value
            click.echo(f"  {m.id:>4}  {m.operator.value:<4}  [{sites}]  {m.description}  {status}")
