"""
Options and helpers shared by the command modules
"""
import re
from pathlib import Path
from typing import Any, Dict, List, Optional

import click

from modules.models import MutationReport, RunConfig
from modules.mutation_operators import MutantStatus
from modules.persistent_data import CONFIG_FILENAME, load_run_config


class MutantIdList(click.ParamType):
    """Comma or whitespace separated positive mutant ids, e.g. `3,5 7`"""
    name = "ids"

    def convert(self, value, param, ctx) -> List[int]:
        if isinstance(value, list):
            return value
        ids = []
        for part in re.split(r"[,\s]+", str(value).strip()):
            if not part:
                continue
            if not part.isdigit() or int(part) == 0:
                self.fail(f"'{part}' is not a positive mutant id", param, ctx)
            ids.append(int(part))
        return ids


MUTANT_IDS = MutantIdList()

config_option = click.option(
    "--config", "config_path", type=click.Path(path_type=Path), default=CONFIG_FILENAME, show_default=True,
    help="Configuration file")
out_option = click.option("--out", "out_dir", type=click.Path(path_type=Path), default=None,
                          help="Report directory (overrides out-dir)")
workers_option = click.option("--workers", type=click.IntRange(min=1), default=None,
                              help="Threads used to execute mutants")
short_circuit_option = click.option("--short-circuit/--no-short-circuit", default=None,
                                    help="Stop testing a mutant at its first killing test")
force_option = click.option("--force-mutants", "force_mutants", type=MUTANT_IDS, default=None,
                            help="Execute these mutants even if a reduction rule removed them")
progress_option = click.option("--progress/--no-progress", default=False, help="Show a progress bar")


def load_cli_config(config_path: Path, out_dir: Optional[Path] = None, workers: Optional[int] = None,
                    short_circuit: Optional[bool] = None) -> RunConfig:
    flags: Dict[str, Any] = {"out-dir": out_dir, "workers": workers, "short-circuit": short_circuit}
    return load_run_config(config_path, {k: v for k, v in flags.items() if v is not None})


def summary_line(report: MutationReport) -> str:
    score = report.mutation_score
    survived = sum(1 for m in report.mutants if m.status == MutantStatus.SURVIVED.value)
    ms = "-" if score.ms is None else f"{score.ms:.2f}"
    return (f"{report.program}: {score.total} mutants, {score.killed} killed, {survived} survived, "
            f"{score.equivalent} equivalent, {score.removed} removed, ms={ms}")
