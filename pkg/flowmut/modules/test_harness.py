"""
Test suites, verdicts and the kill matrix.

A test is data: named input datasets plus expectations on output datasets.
Mutants run through the meta-mutant; with several workers they run on a
thread pool and results are merged back in mutant-id order.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from pydantic import ValidationError
from tqdm import tqdm
from tqdm.contrib.concurrent import thread_map

from modules import logger
from modules.dataflow_model import ProgramGraph
from modules.errors import OriginalProgramFailed, StaleReportError, TestSuiteError
from modules.interpreter import DatasetInstance, ExecutionOutcome, execute
from modules.meta_mutant import MetaMutant
from modules.models import MutationReport, TestSuiteFile
from modules.mutation_operators import Mutant, MutantStatus
from modules.value_types import format_value, from_json_value, values_equal

DEFAULT_TOLERANCE = 1e-9


class CompareMode(str, Enum):
    UNORDERED = "unordered"
    ORDERED = "ordered"
    SIZE = "size"


class Verdict(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"
    RUNTIME_ERROR = "RuntimeError"

    @property
    def kills(self) -> bool:
        return self is not Verdict.PASS


@dataclass(frozen=True)
class Expectation:
    output: str
    mode: CompareMode = CompareMode.UNORDERED
    values: Tuple = ()
    size: Optional[int] = None
    tolerance: float = DEFAULT_TOLERANCE


@dataclass(frozen=True)
class TestCase:
    __test__ = False

    name: str
    inputs: Mapping[str, DatasetInstance]
    expectations: Tuple[Expectation, ...] = ()


@dataclass(frozen=True)
class TestSuite:
    __test__ = False

    program: str
    tests: Tuple[TestCase, ...]
    path: Optional[Path] = None

    @property
    def names(self) -> List[str]:
        return [t.name for t in self.tests]

    def test(self, name: str) -> TestCase:
        for t in self.tests:
            if t.name == name:
                return t
        raise TestSuiteError(f"unknown test '{name}' for program '{self.program}'")


@dataclass(frozen=True)
class TestResult:
    __test__ = False

    test: str
    verdict: Verdict
    detail: str = ""


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def read_suite_file(path: Path) -> TestSuiteFile:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise TestSuiteError(f"test suite not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise TestSuiteError(f"{path}: invalid JSON: {exc}") from exc
    try:
        return TestSuiteFile.model_validate(raw)
    except ValidationError as exc:
        raise TestSuiteError(f"{path}: {exc}") from exc


def load_test_suite(path: Path, graph: ProgramGraph) -> TestSuite:
    """Read a JSON suite and decode every literal against the program's types"""
    suite = build_test_suite(read_suite_file(path), graph, path)
    logger.info(f"Loaded {len(suite.tests)} tests for '{graph.name}' from {path}")
    return suite


def build_test_suite(model: TestSuiteFile, graph: ProgramGraph, path: Optional[Path] = None) -> TestSuite:
    where = str(path) if path else "<suite>"
    if model.program != graph.name:
        raise TestSuiteError(f"{where}: suite targets program '{model.program}', not '{graph.name}'")

    declared = {ds.name: ds for ds in graph.input_datasets}
    outputs = set(graph.output_names)
    seen = set()
    tests = []
    for case in model.tests:
        if case.name in seen:
            raise TestSuiteError(f"{where}: duplicate test name '{case.name}'")
        seen.add(case.name)
        for name in case.inputs:
            if name not in declared:
                raise TestSuiteError(f"{where}: test '{case.name}' feeds unknown input '{name}'")
        inputs = {}
        for name, ds in declared.items():
            items = case.inputs.get(name, [])
            inputs[name] = DatasetInstance(
                tuple(_decode(item, ds.elem_type, f"{case.name}.inputs.{name}[{i}]", where)
                      for i, item in enumerate(items)),
                ds.elem_type)

        expectations = []
        for index, expect in enumerate(case.expect):
            if expect.output not in outputs:
                raise TestSuiteError(f"{where}: test '{case.name}' checks unknown output '{expect.output}'")
            mode = CompareMode(expect.mode)
            context = f"{case.name}.expect[{index}]"
            if mode is CompareMode.SIZE:
                if expect.size is None:
                    raise TestSuiteError(f"{where}: {context} uses mode 'size' without 'size'")
                expectations.append(Expectation(expect.output, mode, size=expect.size,
                                                tolerance=expect.tolerance))
                continue
            if expect.values is None:
                raise TestSuiteError(f"{where}: {context} has no 'values'")
            elem_type = graph.output_dataset(expect.output).elem_type
            values = tuple(_decode(v, elem_type, f"{context}.values[{i}]", where)
                           for i, v in enumerate(expect.values))
            expectations.append(Expectation(expect.output, mode, values, tolerance=expect.tolerance))
        tests.append(TestCase(case.name, inputs, tuple(expectations)))
    return TestSuite(graph.name, tuple(tests), Path(path) if path else None)


def merge_suites(suites: Sequence[TestSuite]) -> TestSuite:
    """Concatenate several suites of one program in the given order"""
    program = suites[0].program
    tests = []
    seen = set()
    for suite in suites:
        for test in suite.tests:
            if test.name in seen:
                raise TestSuiteError(f"{suite.path}: test name '{test.name}' already used for '{program}'")
            seen.add(test.name)
            tests.append(test)
    return TestSuite(program, tuple(tests), suites[0].path)


def _decode(raw, elem_type, context: str, where: str):
    try:
        return from_json_value(raw, elem_type, context)
    except ValueError as exc:
        raise TestSuiteError(f"{where}: {exc}") from exc


# ---------------------------------------------------------------------------
# Comparison and single runs
# ---------------------------------------------------------------------------

def compare(expectation: Expectation, actual: DatasetInstance) -> Optional[str]:
    """None when the output satisfies the expectation, otherwise a mismatch description"""
    elements = actual.elements
    if expectation.mode is CompareMode.SIZE:
        if len(elements) != expectation.size:
            return f"{expectation.output}: expected size {expectation.size}, got {len(elements)}"
        return None
    expected = expectation.values
    if len(elements) != len(expected):
        return f"{expectation.output}: expected {len(expected)} elements, got {len(elements)}"
    tolerance = expectation.tolerance
    if expectation.mode is CompareMode.ORDERED:
        for index, (want, got) in enumerate(zip(expected, elements)):
            if not values_equal(want, got, tolerance):
                return (f"{expectation.output}[{index}]: expected {format_value(want)}, "
                        f"got {format_value(got)}")
        return None
    if not _multiset_equal(expected, elements, tolerance):
        shown = ", ".join(format_value(v) for v in elements[:10])
        return f"{expectation.output}: multiset differs, got [{shown}{', ...' if len(elements) > 10 else ''}]"
    return None


def _multiset_equal(expected: Sequence, actual: Sequence, tolerance: float) -> bool:
    if Counter(expected) == Counter(actual):
        return True
    unmatched = list(actual)
    for want in expected:
        for index, got in enumerate(unmatched):
            if values_equal(want, got, tolerance):
                del unmatched[index]
                break
        else:
            return False
    return True


def judge(test: TestCase, outcome: ExecutionOutcome) -> TestResult:
    if not outcome.ok:
        return TestResult(test.name, Verdict.RUNTIME_ERROR, str(outcome.runtime_error))
    for expectation in test.expectations:
        mismatch = compare(expectation, outcome.outputs[expectation.output])
        if mismatch is not None:
            return TestResult(test.name, Verdict.FAIL, mismatch)
    return TestResult(test.name, Verdict.PASS)


def run_original(graph: ProgramGraph, tests: Iterable[TestCase]) -> List[TestResult]:
    results = [judge(test, execute(graph, test.inputs)) for test in tests]
    for result in results:
        if result.verdict is not Verdict.PASS:
            logger.error(f"Original '{graph.name}' failed test '{result.test}': {result.detail}")
    return results


def require_original_pass(graph: ProgramGraph, results: Sequence[TestResult]) -> None:
    failed = [r for r in results if r.verdict is not Verdict.PASS]
    if failed:
        details = "; ".join(f"{r.test}: {r.verdict.value} ({r.detail})" for r in failed)
        raise OriginalProgramFailed(
            f"original program '{graph.name}' fails {len(failed)} test(s); fix the program or the tests: {details}")


# ---------------------------------------------------------------------------
# Kill matrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MutantResult:
    mutant_id: int
    status: MutantStatus
    verdicts: Tuple[Tuple[str, Verdict], ...] = ()
    executed: int = 0
    killing: Tuple[str, ...] = ()


@dataclass(frozen=True)
class KillMatrix:
    tests: Tuple[str, ...]
    results: Tuple[MutantResult, ...]

    def result(self, mutant_id: int) -> MutantResult:
        for r in self.results:
            if r.mutant_id == mutant_id:
                return r
        raise KeyError(mutant_id)

    def verdict(self, mutant_id: int, test: str) -> Optional[Verdict]:
        return dict(self.result(mutant_id).verdicts).get(test)

    def ids_with(self, status: MutantStatus) -> List[int]:
        return [r.mutant_id for r in self.results if r.status is status]

    @property
    def executions(self) -> int:
        return sum(r.executed for r in self.results)


@dataclass(frozen=True)
class RunOptions:
    short_circuit: bool = False
    force_removed: bool = False
    force_ids: FrozenSet[int] = frozenset()
    equivalent_ids: FrozenSet[int] = frozenset()
    workers: int = 1
    progress: bool = False


def _execute_mutant(meta: MetaMutant, mutant: Mutant, tests: Sequence[TestCase],
                    short_circuit: bool) -> MutantResult:
    verdicts = []
    killing = []
    for test in tests:
        result = judge(test, meta.execute(test.inputs, mutant.id))
        verdicts.append((test.name, result.verdict))
        if result.verdict.kills:
            killing.append(test.name)
            if short_circuit:
                break
    status = MutantStatus.KILLED if killing else MutantStatus.SURVIVED
    logger.debug(f"Mutant {mutant.id} ({mutant.operator.value}): {status.value} "
                 f"after {len(verdicts)} test(s)")
    return MutantResult(mutant.id, status, tuple(verdicts), len(verdicts), tuple(killing))


def _execute_all(meta: MetaMutant, pending: List[Mutant], tests: Sequence[TestCase],
                 options: RunOptions) -> Dict[int, MutantResult]:
    def work(mutant: Mutant) -> MutantResult:
        return _execute_mutant(meta, mutant, tests, options.short_circuit)

    if options.workers > 1 and len(pending) > 1:
        results = thread_map(work, pending, max_workers=options.workers, desc="Mutants",
                             disable=not options.progress)
    else:
        results = [work(m) for m in tqdm(pending, desc="Mutants", disable=not options.progress)]
    return {r.mutant_id: r for r in results}


def _wants_run(mutant: Mutant, options: RunOptions) -> bool:
    if mutant.id in options.equivalent_ids:
        return False
    if mutant.is_removed:
        return options.force_removed or mutant.id in options.force_ids
    return True


def run_mutants(meta: MetaMutant, tests: Sequence[TestCase], options: RunOptions = RunOptions()) -> KillMatrix:
    """Execute the suite against every active mutant and collect verdicts"""
    pending = [m for m in meta.mutants if _wants_run(m, options)]
    logger.info(f"Running {len(tests)} test(s) against {len(pending)} mutant(s) of '{meta.original.name}' "
                f"with {options.workers} worker(s)")
    executed = _execute_all(meta, pending, tests, options)

    results = []
    for mutant in meta.mutants:
        if mutant.id in executed:
            results.append(executed[mutant.id])
        elif mutant.id in options.equivalent_ids and not mutant.is_removed:
            results.append(MutantResult(mutant.id, MutantStatus.EQUIVALENT))
        else:
            results.append(MutantResult(mutant.id, MutantStatus.REMOVED))
    return KillMatrix(tuple(t.name for t in tests), tuple(results))


def rerun_alive(previous: MutationReport, meta: MetaMutant, tests: Sequence[TestCase],
                source_hash: str, options: RunOptions = RunOptions()) -> KillMatrix:
    """Run only the previous survivors (and forced mutants), carrying every other result over"""
    if previous.source_hash != source_hash:
        raise StaleReportError(
            f"report for '{previous.program}' was produced from different sources or settings; run 'flowmut run' again")
    if sorted(r.id for r in previous.mutants) != sorted(meta.ids):
        raise StaleReportError(f"report for '{previous.program}' lists different mutants than the current program")

    prior = {r.id: r for r in previous.mutants}
    pending = []
    for mutant in meta.mutants:
        record = prior[mutant.id]
        if mutant.id in options.equivalent_ids:
            continue
        # an equivalent tag dropped from the config makes the mutant live again
        if record.status in (MutantStatus.SURVIVED.value, MutantStatus.EQUIVALENT.value):
            pending.append(mutant)
        elif mutant.id in options.force_ids and record.status == MutantStatus.REMOVED.value:
            pending.append(mutant)
    logger.info(f"Re-running {len(pending)} live mutant(s) of '{meta.original.name}'")
    executed = _execute_all(meta, pending, tests, options)

    results = []
    for mutant in meta.mutants:
        record = prior[mutant.id]
        if mutant.id in executed:
            results.append(executed[mutant.id])
            continue
        status = MutantStatus(record.status)
        if mutant.id in options.equivalent_ids and status in (MutantStatus.SURVIVED, MutantStatus.EQUIVALENT):
            status = MutantStatus.EQUIVALENT
        elif mutant.id in options.equivalent_ids:
            logger.warning(f"Mutant {mutant.id} is {status.value}; ignoring its equivalent tag")
        results.append(MutantResult(mutant.id, status, executed=record.executed_tests,
                                    killing=tuple(record.killed_by)))
    return KillMatrix(tuple(t.name for t in tests), tuple(results))
