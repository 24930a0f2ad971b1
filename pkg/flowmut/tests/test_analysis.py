"""Tests for the mutation score, operator statistics and reports"""
import json
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from modules.analysis import (
    build_report,
    compute_operator_stats,
    compute_score,
    emit_reports,
    mutation_score,
    render_html,
    report_json,
)
from modules.dsl_parser import parse_program
from modules.meta_mutant import build_meta_mutant
from modules.models import MutationReport, TimingsRecord
from modules.mutation_operators import MutantStatus, MutationOperatorId as Op
from modules.test_harness import KillMatrix, MutantResult, RunOptions, run_mutants


@pytest.fixture
def full_report(word_count, word_count_mutants, word_count_suite):
    meta = build_meta_mutant(word_count, word_count_mutants)
    matrix = run_mutants(meta, word_count_suite.tests, RunOptions(equivalent_ids=frozenset({9})))
    return build_report(word_count, word_count_mutants, matrix, "abc123", "0.4.0", equivalent_ids=[9])


def stats_for(stats, operator):
    return next(s for s in stats if s.operator is operator)


@pytest.mark.unit
@pytest.mark.analysis
class TestMutationScore:
    """Tests for ms = DM / (M - EM)"""

    def test_all_non_equivalent_killed(self):
        assert mutation_score(22, 27, 5) == 1

    def test_partial(self):
        assert mutation_score(11, 14, 1) == Fraction(11, 13)

    def test_every_mutant_equivalent(self):
        assert mutation_score(0, 4, 4) == 1

    def test_inconsistent_counts(self):
        with pytest.raises(ValueError, match="inconsistent"):
            mutation_score(5, 4, 0)

    @given(total=st.integers(min_value=1, max_value=500), data=st.data())
    def test_score_is_a_ratio(self, total, data):
        equivalent = data.draw(st.integers(min_value=0, max_value=total))
        killed = data.draw(st.integers(min_value=0, max_value=total - equivalent))
        assume(total > equivalent)
        score = mutation_score(killed, total, equivalent)
        assert 0 <= score <= 1
        assert score == Fraction(killed, total - equivalent)

    def test_no_mutants_has_no_score(self):
        score = compute_score(KillMatrix((), ()))
        assert score.total == 0
        assert score.ms == 1
        assert score.ms_value is None

    def test_removed_mutants_are_not_counted(self):
        matrix = KillMatrix(("t",), (
            MutantResult(1, MutantStatus.KILLED, executed=1, killing=("t",)),
            MutantResult(2, MutantStatus.REMOVED),
            MutantResult(3, MutantStatus.SURVIVED, executed=1),
        ))
        score = compute_score(matrix)
        assert (score.killed, score.total, score.equivalent, score.removed) == (1, 2, 0, 1)
        assert score.ms_value == 0.5

    def test_tagged_survivor_counts_as_equivalent(self):
        matrix = KillMatrix(("t",), (
            MutantResult(1, MutantStatus.KILLED, executed=1, killing=("t",)),
            MutantResult(2, MutantStatus.SURVIVED, executed=1),
        ))
        assert compute_score(matrix, [2]).ms_value == 1.0


@pytest.mark.unit
@pytest.mark.analysis
class TestOperatorStats:
    """Tests for the pooled killed ratio"""

    def test_single_mutant_ratio(self, word_count_mutants):
        matrix = KillMatrix(("t1", "t2", "t3", "t4"), (
            MutantResult(16, MutantStatus.KILLED, executed=4, killing=("t1",)),
        ))
        assert stats_for(compute_operator_stats(matrix, word_count_mutants[15:16]), Op.ATR).killed_ratio == 25.0

    def test_ratio_is_pooled_over_executions(self, word_count_mutants):
        matrix = KillMatrix(("t1", "t2", "t3", "t4"), (
            MutantResult(16, MutantStatus.KILLED, executed=4, killing=("t1",)),
            MutantResult(17, MutantStatus.KILLED, executed=4, killing=("t1", "t2", "t3")),
        ))
        stats = stats_for(compute_operator_stats(matrix, word_count_mutants[15:17]), Op.ATR)
        assert stats.generated == 2
        assert stats.killed_ratio == 50.0

    def test_operator_without_executions(self, word_count_mutants):
        matrix = KillMatrix(("t1",), (MutantResult(20, MutantStatus.REMOVED),))
        stats = stats_for(compute_operator_stats(matrix, word_count_mutants[19:20]), Op.ATR)
        assert stats.removed == 1
        assert stats.killed_ratio is None

    def test_word_count_statistics(self, full_report):
        by_op = {r.operator: r for r in full_report.operators}
        assert len(full_report.operators) == 15
        assert (by_op[Op.MTR].generated, by_op[Op.MTR].equivalent, by_op[Op.MTR].removed) == (10, 1, 4)
        assert by_op[Op.ATR].killed_ratio == 75.0
        assert by_op[Op.UTD].killed_ratio == 100.0
        assert by_op[Op.OTI].generated == 0
        assert by_op[Op.OTI].killed_ratio is None


@pytest.mark.integration
@pytest.mark.analysis
class TestReports:
    """Tests for report.json and report.html"""

    def test_program_metrics(self, full_report):
        score = full_report.mutation_score
        assert (score.killed, score.total, score.equivalent, score.removed) == (13, 14, 1, 6)
        assert score.ms == 1.0

    def test_mutant_records(self, full_report):
        assert [r.id for r in full_report.mutants] == list(range(1, 21))
        first = full_report.mutant(1)
        assert first.original == 'words = lines.flatMap(l -> split(l, " "))'
        assert first.mutated == "words = lines"
        assert first.killed_by == ["test1", "test2"]
        assert full_report.mutant(20).status == "Removed"
        assert full_report.mutant(20).removed_by == "ATRC"
        assert full_report.mutant(9).status == "Equivalent"

    def test_json_round_trip(self, full_report):
        text = report_json(full_report)
        data = json.loads(text)
        assert list(data) == ["tool_version", "source_hash", "program", "mutation_score",
                              "operators", "mutants", "timings"]
        assert MutationReport.model_validate_json(text) == full_report

    def test_json_is_stable(self, word_count, word_count_mutants, word_count_suite):
        meta = build_meta_mutant(word_count, word_count_mutants)
        reports = [
            report_json(build_report(word_count, word_count_mutants,
                                     run_mutants(meta, word_count_suite.tests, RunOptions(workers=w)),
                                     "h", "v", TimingsRecord()))
            for w in (1, 4)
        ]
        assert reports[0] == reports[1]

    def test_html_sections(self, full_report):
        page = render_html(full_report)
        for heading in ("Program metrics", "Mutants", "Mutant details", "Operator metrics"):
            assert f"<h2>{heading}</h2>" in page
        assert "<td>1.00</td>" in page
        assert 'id="mutant-13"' in page
        assert "<td>75.00%</td>" in page

    def test_html_escapes_source_text(self, full_report):
        page = render_html(full_report)
        assert "split(l, &quot; &quot;)" in page
        assert "(a, b) -&gt; a + b" in page
        assert "-> a + b" not in page

    def test_empty_program(self):
        graph = parse_program("program idle input a: list<int> output a")
        report = build_report(graph, [], KillMatrix((), ()), "h", "v")
        assert report.mutation_score.ms is None
        page = render_html(report)
        assert "<p>no mutants</p>" in page
        assert "<td>-</td>" in page

    def test_emit_reports(self, full_report, tmp_path):
        json_path, html_path = emit_reports(full_report, tmp_path / "out")
        assert json_path == tmp_path / "out" / "word_count" / "report.json"
        assert html_path.name == "report.html"
        assert MutationReport.model_validate_json(json_path.read_text(encoding="utf-8")) == full_report
