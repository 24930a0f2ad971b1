"""
Mutation score, per-operator statistics and the JSON/HTML reports.
"""
from __future__ import annotations

import html
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from modules import logger
from modules.dataflow_model import ProgramGraph
from modules.meta_mutant import render_mutation
from modules.models import MutantRecord, MutationReport, OperatorRecord, ScoreRecord, TimingsRecord
from modules.mutation_operators import ALL_OPERATORS, Mutant, MutantStatus, MutationOperatorId
from modules.test_harness import KillMatrix

REPORT_JSON = "report.json"
REPORT_HTML = "report.html"


@dataclass(frozen=True)
class MutationScore:
    killed: int  # DM
    total: int  # M, removed mutants excluded
    equivalent: int  # EM
    removed: int
    ms: Fraction

    @property
    def ms_value(self) -> Optional[float]:
        # nothing to score at all
        if self.total == 0:
            return None
        return float(self.ms)


@dataclass(frozen=True)
class OperatorStats:
    operator: MutationOperatorId
    generated: int
    equivalent: int
    removed: int
    killed_ratio: Optional[float]  # percentage


def mutation_score(killed: int, total: int, equivalent: int) -> Fraction:
    """ms = DM / (M - EM); vacuously 1 when every mutant is equivalent"""
    if killed < 0 or equivalent < 0 or killed + equivalent > total:
        raise ValueError(f"inconsistent counts: DM={killed}, M={total}, EM={equivalent}")
    if total == equivalent:
        return Fraction(1)
    return Fraction(killed, total - equivalent)


def compute_score(matrix: KillMatrix, equivalent_ids: Iterable[int] = ()) -> MutationScore:
    tagged = set(equivalent_ids)
    killed = total = equivalent = removed = 0
    for result in matrix.results:
        if result.status is MutantStatus.REMOVED:
            removed += 1
            continue
        total += 1
        if result.status is MutantStatus.KILLED:
            killed += 1
        elif result.status is MutantStatus.EQUIVALENT or result.mutant_id in tagged:
            equivalent += 1
    return MutationScore(killed, total, equivalent, removed, mutation_score(killed, total, equivalent))


def compute_operator_stats(matrix: KillMatrix, mutants: Sequence[Mutant]) -> List[OperatorStats]:
    """Counts per operator and the pooled killed ratio over executed, non-equivalent mutants"""
    operator_of = {m.id: m.operator for m in mutants}
    generated: Dict[MutationOperatorId, int] = {op: 0 for op in ALL_OPERATORS}
    equivalent = dict(generated)
    removed = dict(generated)
    kills = dict(generated)
    executions = dict(generated)
    for m in mutants:
        generated[m.operator] += 1
    for result in matrix.results:
        op = operator_of[result.mutant_id]
        if result.status is MutantStatus.EQUIVALENT:
            equivalent[op] += 1
            continue
        if result.status is MutantStatus.REMOVED:
            removed[op] += 1
        if result.executed:
            kills[op] += len(result.killing)
            executions[op] += result.executed
    return [
        OperatorStats(op, generated[op], equivalent[op], removed[op],
                      100.0 * kills[op] / executions[op] if executions[op] else None)
        for op in ALL_OPERATORS
    ]


def build_report(graph: ProgramGraph, mutants: Sequence[Mutant], matrix: KillMatrix, source_hash: str,
                 tool_version: str, timings: Optional[TimingsRecord] = None,
                 equivalent_ids: Iterable[int] = ()) -> MutationReport:
    score = compute_score(matrix, equivalent_ids)
    records = []
    for mutant in sorted(mutants, key=lambda m: m.id):
        result = matrix.result(mutant.id)
        original, mutated = render_mutation(graph, mutant)
        records.append(MutantRecord(
            id=mutant.id,
            operator=mutant.operator,
            sites=list(mutant.sites),
            description=mutant.description,
            original=original,
            mutated=mutated,
            status=result.status.value,
            removed_by=mutant.removed_by,
            killed_by=list(result.killing),
            executed_tests=result.executed,
        ))
    return MutationReport(
        tool_version=tool_version,
        source_hash=source_hash,
        program=graph.name,
        mutation_score=ScoreRecord(killed=score.killed, total=score.total, equivalent=score.equivalent,
                                   removed=score.removed, ms=score.ms_value),
        operators=[OperatorRecord(operator=s.operator, generated=s.generated, equivalent=s.equivalent,
                                  removed=s.removed, killed_ratio=s.killed_ratio)
                   for s in compute_operator_stats(matrix, mutants)],
        mutants=records,
        timings=timings or TimingsRecord(),
    )


def report_json(report: MutationReport) -> str:
    return json.dumps(report.model_dump(mode="json"), indent=2, ensure_ascii=False) + "\n"


def report_dir(out_dir: Path, program: str) -> Path:
    return Path(out_dir) / program


# ---------------------------------------------------------------------------
# HTML
# ---------------------------------------------------------------------------

HTML_TEMPLATE = """<!DOCTYPE html>
<html lang="en">
<head>
    <meta charset="UTF-8">
    <title>Mutation report: {program}</title>
    <style>
        body {{ font-family: -apple-system, 'Segoe UI', Roboto, sans-serif; margin: 2em; color: #333; }}
        h1 {{ margin-bottom: 0.2em; }}
        .subtitle {{ color: #666; margin-bottom: 1.5em; }}
        table {{ border-collapse: collapse; margin-bottom: 2em; }}
        th, td {{ border: 1px solid #ccc; padding: 4px 10px; text-align: left; vertical-align: top; }}
        th {{ background: #f2f2f2; }}
        pre {{ margin: 0; font-size: 0.9em; }}
        .Killed {{ color: #1b7f3b; }}
        .Survived {{ color: #b00020; font-weight: bold; }}
        .Equivalent {{ color: #555; }}
        .Removed {{ color: #999; }}
    </style>
</head>
<body>
    <h1>Mutation report: {program}</h1>
    <div class="subtitle">flowmut {tool_version} &middot; source hash <code>{source_hash}</code></div>

    <h2>Program metrics</h2>
    <table>
        <tr><th>Mutants</th><th>Killed</th><th>Survived</th><th>Equivalent</th><th>Removed</th><th>Mutation score</th></tr>
        <tr><td>{total}</td><td>{killed}</td><td>{survived}</td><td>{equivalent}</td><td>{removed}</td><td>{ms}</td></tr>
    </table>

    <h2>Mutants</h2>
    {mutant_list}

    <h2>Mutant details</h2>
    {mutant_details}

    <h2>Operator metrics</h2>
    <table>
        <tr><th>Operator</th><th>#M</th><th>#E</th><th>#R</th><th>KR</th></tr>
{operator_rows}
    </table>
</body>
</html>
"""


def _cell(value) -> str:
    return f"<td>{html.escape(str(value))}</td>"


def _mutant_list(report: MutationReport) -> str:
    if not report.mutants:
        return "<p>no mutants</p>"
    rows = ["<table>", "<tr><th>Id</th><th>Operator</th><th>Sites</th><th>Description</th>"
                       "<th>Status</th><th>Killed by</th></tr>"]
    for m in report.mutants:
        status = m.status if m.removed_by is None else f"{m.status} ({m.removed_by})"
        rows.append(
            f'<tr><td><a href="#mutant-{m.id}">{m.id}</a></td>'
            + _cell(m.operator.value) + _cell(", ".join(str(s) for s in m.sites)) + _cell(m.description)
            + f'<td class="{html.escape(m.status)}">{html.escape(status)}</td>'
            + _cell(", ".join(m.killed_by)) + "</tr>")
    rows.append("</table>")
    return "\n    ".join(rows)


def _mutant_details(report: MutationReport) -> str:
    if not report.mutants:
        return "<p>no mutants</p>"
    rows = ["<table>", "<tr><th>Id</th><th>Original</th><th>Mutant</th></tr>"]
    for m in report.mutants:
        rows.append(f'<tr id="mutant-{m.id}"><td>{m.id}</td>'
                    f"<td><pre>{html.escape(m.original)}</pre></td>"
                    f"<td><pre>{html.escape(m.mutated)}</pre></td></tr>")
    rows.append("</table>")
    return "\n    ".join(rows)


def _operator_rows(report: MutationReport) -> str:
    rows = []
    for op in report.operators:
        kr = "-" if op.killed_ratio is None else f"{op.killed_ratio:.2f}%"
        rows.append("        <tr>" + _cell(op.operator.value) + _cell(op.generated) + _cell(op.equivalent)
                    + _cell(op.removed) + _cell(kr) + "</tr>")
    return "\n".join(rows)


def render_html(report: MutationReport) -> str:
    score = report.mutation_score
    survived = sum(1 for m in report.mutants if m.status == MutantStatus.SURVIVED.value)
    return HTML_TEMPLATE.format(
        program=html.escape(report.program),
        tool_version=html.escape(report.tool_version),
        source_hash=html.escape(report.source_hash[:16]),
        total=score.total,
        killed=score.killed,
        survived=survived,
        equivalent=score.equivalent,
        removed=score.removed,
        ms="-" if score.ms is None else f"{score.ms:.2f}",
        mutant_list=_mutant_list(report),
        mutant_details=_mutant_details(report),
        operator_rows=_operator_rows(report),
    )


def emit_reports(report: MutationReport, out_dir: Path) -> Tuple[Path, Path]:
    """Write report.json and report.html under <out_dir>/<program>/"""
    target = report_dir(out_dir, report.program)
    target.mkdir(parents=True, exist_ok=True)
    json_path = target / REPORT_JSON
    html_path = target / REPORT_HTML
    json_path.write_text(report_json(report), encoding="utf-8")
    html_path.write_text(render_html(report), encoding="utf-8")
    logger.info(f"Reports for '{report.program}' written to {target}")
    return json_path, html_path
