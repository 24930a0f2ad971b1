"""
The run, alive, exec and listing workflows behind the CLI commands.

Every phase runs sequentially except mutant execution, which the harness
spreads over `config.workers` threads.
"""
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from modules import logger
from modules.analysis import build_report, emit_reports
from modules.dataflow_model import ProgramGraph
from modules.dsl_parser import parse_file
from modules.errors import ConfigError, DslError, StaleReportError, TestSuiteError
from modules.interpreter import ExecutionOutcome
from modules.meta_mutant import MetaMutant, build_meta_mutant, render_mutation
from modules.models import MutationReport, RunConfig, TimingsRecord
from modules.mutant_reducer import reduce_mutants
from modules.mutation_operators import Mutant, generate_mutants
from modules.persistent_data import (
    compute_source_hash,
    load_previous_reports,
    load_report,
    previous_report_path,
)
from modules.test_harness import (
    RunOptions,
    TestCase,
    TestResult,
    TestSuite,
    build_test_suite,
    judge,
    merge_suites,
    read_suite_file,
    require_original_pass,
    rerun_alive,
    run_mutants,
    run_original,
)
from version import __version__


@dataclass
class ProgramSession:
    """Everything prepared for one program before any execution"""
    graph: ProgramGraph
    suite: TestSuite
    mutants: List[Mutant]
    meta: MetaMutant
    equivalent_ids: FrozenSet[int] = frozenset()
    force_ids: FrozenSet[int] = frozenset()
    generation_s: float = 0.0


@dataclass
class ProgramRun:
    report: MutationReport
    json_path: Path
    html_path: Path


@dataclass
class ExecRun:
    test: TestCase
    outcome: ExecutionOutcome
    result: TestResult


@dataclass
class ExecReport:
    program: str
    mutant: Optional[Mutant]
    original_text: str = ""
    mutated_text: str = ""
    runs: List[ExecRun] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def load_programs(config: RunConfig, only: Optional[str] = None) -> List[ProgramGraph]:
    """Parse every source and keep the configured programs (or all of them)"""
    available: Dict[str, ProgramGraph] = {}
    for source in config.sources:
        parsed = parse_file(Path(source))
        if not parsed.ok:
            raise DslError(parsed.errors)
        for graph in parsed.programs:
            if graph.name in available:
                raise ConfigError(f"program '{graph.name}' is defined in more than one source")
            available[graph.name] = graph
    logger.info(f"Parsed {len(config.sources)} source(s): {', '.join(available) or 'no programs'}")

    selected = list(config.programs) or list(available)
    for name in selected:
        if name not in available:
            raise ConfigError(f"unknown program '{name}'; the sources define: {', '.join(available) or 'nothing'}")
    if only is not None:
        if only not in selected:
            raise ConfigError(f"unknown program '{only}'; configured programs: {', '.join(selected)}")
        selected = [only]
    if not selected:
        raise ConfigError("the sources define no programs")
    return [available[name] for name in selected]


def load_suites(config: RunConfig, graphs: Sequence[ProgramGraph]) -> Dict[str, TestSuite]:
    """Test suites keyed by program; several files for one program are concatenated"""
    by_name = {g.name: g for g in graphs}
    found: Dict[str, List[TestSuite]] = {}
    for path in config.tests:
        model = read_suite_file(Path(path))
        graph = by_name.get(model.program)
        if graph is None:
            logger.debug(f"Skipping {path}: program '{model.program}' is not selected")
            continue
        found.setdefault(graph.name, []).append(build_test_suite(model, graph, Path(path)))

    suites = {}
    for graph in graphs:
        if graph.name in found:
            suites[graph.name] = merge_suites(found[graph.name])
        else:
            logger.warning(f"No test suite for program '{graph.name}'; every mutant will survive")
            suites[graph.name] = TestSuite(graph.name, ())
    return suites


def _known_ids(ids: Iterable[int], mutants: Sequence[Mutant], what: str, program: str) -> FrozenSet[int]:
    known = {m.id for m in mutants}
    kept = set()
    for mutant_id in ids:
        if mutant_id in known:
            kept.add(mutant_id)
        else:
            logger.warning(f"Ignoring {what} id {mutant_id}: '{program}' has {len(known)} mutants")
    return frozenset(kept)


def build_mutants(config: RunConfig, graph: ProgramGraph) -> List[Mutant]:
    mutants = generate_mutants(graph, config.operators)
    if not config.reduction_rules:
        logger.info("Mutant reduction disabled")
        return mutants
    return reduce_mutants(mutants, config.reduction_rules, config.operators)


def prepare_session(config: RunConfig, graph: ProgramGraph, suite: TestSuite,
                    extra_equivalent: Iterable[int] = (), extra_force: Iterable[int] = ()) -> ProgramSession:
    """Generate, reduce and embed the mutants of one program"""
    started = time.perf_counter()
    mutants = build_mutants(config, graph)
    meta = build_meta_mutant(graph, mutants)
    equivalent = _known_ids(set(config.equivalent_for(graph.name)) | set(extra_equivalent),
                            mutants, "equivalent", graph.name)
    forced = _known_ids(set(config.forced_for(graph.name)) | set(extra_force), mutants, "forced", graph.name)
    return ProgramSession(graph, suite, mutants, meta, equivalent, forced, time.perf_counter() - started)


def prepare_sessions(config: RunConfig, extra_equivalent: Iterable[int] = (),
                     extra_force: Iterable[int] = ()) -> List[ProgramSession]:
    graphs = load_programs(config)
    suites = load_suites(config, graphs)
    return [prepare_session(config, g, suites[g.name], extra_equivalent, extra_force) for g in graphs]


def _options(config: RunConfig, session: ProgramSession, force_removed: bool, progress: bool) -> RunOptions:
    return RunOptions(
        short_circuit=config.short_circuit,
        force_removed=force_removed,
        force_ids=session.force_ids,
        equivalent_ids=session.equivalent_ids,
        workers=config.workers,
        progress=progress,
    )


def _check_originals(sessions: Sequence[ProgramSession]) -> Dict[str, float]:
    """Run every original first so a failing suite stops the process before any mutant runs"""
    elapsed = {}
    for session in sessions:
        started = time.perf_counter()
        logger.info(f"Running {len(session.suite.tests)} test(s) against original '{session.graph.name}'")
        results = run_original(session.graph, session.suite.tests)
        require_original_pass(session.graph, results)
        elapsed[session.graph.name] = time.perf_counter() - started
    return elapsed


def _finish(session: ProgramSession, matrix, source_hash: str, out_dir: Path,
            execution_s: float, started: float) -> ProgramRun:
    timings = TimingsRecord(
        generation_s=round(session.generation_s, 6),
        execution_s=round(execution_s, 6),
        total_s=round(time.perf_counter() - started + session.generation_s, 6),
    )
    report = build_report(session.graph, session.mutants, matrix, source_hash, __version__,
                          timings, session.equivalent_ids)
    json_path, html_path = emit_reports(report, out_dir)
    return ProgramRun(report, json_path, html_path)


# ---------------------------------------------------------------------------
# Workflows
# ---------------------------------------------------------------------------

def run_workflow(config: RunConfig, force_removed: bool = False, extra_force: Iterable[int] = (),
                 progress: bool = False) -> List[ProgramRun]:
    """parse, generate, reduce, embed, check the original, run mutants, report"""
    source_hash = compute_source_hash(config)
    sessions = prepare_sessions(config, extra_force=extra_force)
    original_s = _check_originals(sessions)

    runs = []
    for session in sessions:
        started = time.perf_counter()
        matrix = run_mutants(session.meta, session.suite.tests,
                             _options(config, session, force_removed, progress))
        execution_s = original_s[session.graph.name] + time.perf_counter() - started
        runs.append(_finish(session, matrix, source_hash, config.out_dir, execution_s, started))
    return runs


def alive_workflow(config: RunConfig, extra_equivalent: Iterable[int] = (), extra_force: Iterable[int] = (),
                   progress: bool = False) -> List[ProgramRun]:
    """Re-run only the mutants that survived the previous run"""
    source_hash = compute_source_hash(config)
    previous = load_previous_reports(config, source_hash)
    sessions = prepare_sessions(config, extra_equivalent, extra_force)
    for session in sessions:
        if session.graph.name not in previous:
            raise StaleReportError(f"no previous report for '{session.graph.name}'; run 'flowmut run' first")
    original_s = _check_originals(sessions)

    runs = []
    for session in sessions:
        started = time.perf_counter()
        matrix = rerun_alive(previous[session.graph.name], session.meta, session.suite.tests, source_hash,
                             _options(config, session, False, progress))
        execution_s = original_s[session.graph.name] + time.perf_counter() - started
        runs.append(_finish(session, matrix, source_hash, config.out_dir, execution_s, started))
    return runs


def _single_program(config: RunConfig, program: Optional[str]) -> ProgramGraph:
    graphs = load_programs(config, program)
    if len(graphs) > 1:
        names = ", ".join(g.name for g in graphs)
        raise ConfigError(f"several programs are configured ({names}); choose one with --program")
    return graphs[0]


def exec_workflow(config: RunConfig, program: Optional[str] = None, mutant_id: Optional[int] = None,
                  test_name: Optional[str] = None) -> ExecReport:
    """Run the original or one mutant on one test (or the whole suite) for inspection"""
    graph = _single_program(config, program)
    suite = load_suites(config, [graph])[graph.name]
    tests = [suite.test(test_name)] if test_name is not None else list(suite.tests)
    if not tests:
        raise TestSuiteError(f"program '{graph.name}' has no tests to execute")

    meta = build_meta_mutant(graph, build_mutants(config, graph))

    report = ExecReport(graph.name, None)
    if mutant_id is not None:
        mutant = meta.mutant(mutant_id)
        if mutant.is_removed:
            logger.warning(f"Mutant {mutant.id} was removed by {mutant.removed_by}; executing it anyway")
        report.mutant = mutant
        report.original_text, report.mutated_text = render_mutation(graph, mutant)

    for test in tests:
        outcome = meta.execute(test.inputs, mutant_id)
        report.runs.append(ExecRun(test, outcome, judge(test, outcome)))
    return report


def list_mutants(config: RunConfig, program: Optional[str] = None) -> List[Tuple[ProgramGraph, List[Mutant]]]:
    """Generated and reduced mutants per program, nothing executed"""
    listing = []
    for graph in load_programs(config, program):
        listing.append((graph, build_mutants(config, graph)))
    return listing
