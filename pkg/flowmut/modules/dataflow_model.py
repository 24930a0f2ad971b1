"""
Typed intermediate representation of a dataflow program.

A program is a set of datasets, a set of transformations and the edges between
them (each transformation names its input and output dataset ids). All types
here are immutable so one graph can be shared by concurrent executions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from graphlib import CycleError, TopologicalSorter
from typing import Any, Dict, List, Optional, Sequence, Tuple

from modules.diagnostics import SourceSpan
from modules.errors import SiteLookupError
from modules.udf_expr import Lambda
from modules.value_types import BOOL, ValueType, list_of, pair_of


class TransformationKind(str, Enum):
    MAP = "map"
    FLAT_MAP = "flatMap"
    FILTER = "filter"
    DISTINCT = "distinct"
    SORT_BY = "sortBy"
    SORT_BY_KEY = "sortByKey"
    GROUP_BY_KEY = "groupByKey"
    REDUCE_BY_KEY = "reduceByKey"
    UNION = "union"
    INTERSECTION = "intersection"
    SUBTRACT = "subtract"
    JOIN = "join"
    LEFT_OUTER_JOIN = "leftOuterJoin"
    RIGHT_OUTER_JOIN = "rightOuterJoin"
    FULL_OUTER_JOIN = "fullOuterJoin"

    @property
    def is_binary(self) -> bool:
        return self in SET_KINDS or self in JOIN_KINDS

    @property
    def udf_count(self) -> int:
        return 1 if self in UDF_KINDS else 0

    @property
    def is_sort(self) -> bool:
        return self in (TransformationKind.SORT_BY, TransformationKind.SORT_BY_KEY)


SET_KINDS = (TransformationKind.UNION, TransformationKind.INTERSECTION, TransformationKind.SUBTRACT)
JOIN_KINDS = (
    TransformationKind.JOIN,
    TransformationKind.LEFT_OUTER_JOIN,
    TransformationKind.RIGHT_OUTER_JOIN,
    TransformationKind.FULL_OUTER_JOIN,
)
UDF_KINDS = (
    TransformationKind.MAP,
    TransformationKind.FLAT_MAP,
    TransformationKind.FILTER,
    TransformationKind.SORT_BY,
    TransformationKind.REDUCE_BY_KEY,
)


@dataclass(frozen=True)
class Dataset:
    id: int
    name: str
    elem_type: ValueType


@dataclass(frozen=True)
class Transformation:
    id: int
    kind: TransformationKind
    inputs: Tuple[int, ...]
    output: int
    udfs: Tuple[object, ...] = ()  # Lambda or WrappedUdf
    ascending: bool = True
    # (side, value) fills for unmatched keys of an outer join; a side not listed gets its type default
    join_fill: Tuple[Tuple[str, Any], ...] = ()
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ProgramOutput:
    name: str
    dataset: int


@dataclass(frozen=True)
class ProgramGraph:
    name: str
    inputs: Tuple[int, ...]
    datasets: Tuple[Dataset, ...]
    transformations: Tuple[Transformation, ...]
    outputs: Tuple[ProgramOutput, ...]

    def dataset(self, dataset_id: int) -> Dataset:
        for ds in self.datasets:
            if ds.id == dataset_id:
                return ds
        raise SiteLookupError(f"unknown dataset id {dataset_id} in program '{self.name}'")

    def dataset_by_name(self, name: str) -> Dataset:
        for ds in self.datasets:
            if ds.name == name:
                return ds
        raise SiteLookupError(f"unknown dataset '{name}' in program '{self.name}'")

    def site(self, site_id: int) -> Transformation:
        if 0 <= site_id < len(self.transformations):
            return self.transformations[site_id]
        raise SiteLookupError(f"unknown transformation site {site_id} in program '{self.name}'")

    def producer(self, dataset_id: int) -> Optional[Transformation]:
        for t in self.transformations:
            if t.output == dataset_id:
                return t
        return None

    def consumers(self, dataset_id: int) -> List[Transformation]:
        return [t for t in self.transformations if dataset_id in t.inputs]

    @property
    def input_datasets(self) -> List[Dataset]:
        return [self.dataset(i) for i in self.inputs]

    @property
    def output_names(self) -> List[str]:
        return [o.name for o in self.outputs]

    def output_dataset(self, name: str) -> Dataset:
        for out in self.outputs:
            if out.name == name:
                return self.dataset(out.dataset)
        raise SiteLookupError(f"unknown output '{name}' in program '{self.name}'")


@dataclass(frozen=True)
class ValidationDiagnostic:
    site: Optional[int]
    rule: str
    message: str

    def __str__(self) -> str:
        return self.message


@dataclass(frozen=True)
class ValidationResult:
    diagnostics: Tuple[ValidationDiagnostic, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.diagnostics


def udf_result_type(udf) -> ValueType:
    return udf.result_type


def udf_param_types(udf) -> Tuple[ValueType, ...]:
    return udf.param_types


def infer_output_type(kind: TransformationKind, input_types: Sequence[ValueType],
                      udfs: Sequence[object], site: int) -> Tuple[Optional[ValueType], List[ValidationDiagnostic]]:
    """Compute the output element type from the inputs and udfs, per the kind's signature rule"""
    problems: List[ValidationDiagnostic] = []

    def fail(rule: str, message: str):
        problems.append(ValidationDiagnostic(site, rule, message))
        return None, problems

    label = _kind_label(kind)
    expected_arity = 2 if kind.is_binary else 1
    if len(input_types) != expected_arity:
        return fail("arity", f"{label} takes {expected_arity} input dataset(s) at site {site}")
    if len(udfs) != kind.udf_count:
        return fail("udf-count", f"{label} takes {kind.udf_count} function(s) at site {site}")

    elem = input_types[0]
    if kind.udf_count:
        udf = udfs[0]
        wanted_params = (elem.value, elem.value) if kind is TransformationKind.REDUCE_BY_KEY and elem.is_pair else (elem,)
        if kind is TransformationKind.REDUCE_BY_KEY and not elem.is_pair:
            return fail("pair-required", f"ReduceByKey requires Pair element type at site {site}")
        if tuple(udf_param_types(udf)) != tuple(wanted_params):
            return fail("udf-params", f"{label} function parameters must be "
                        f"({', '.join(str(t) for t in wanted_params)}) at site {site}")
        result = udf_result_type(udf)
    else:
        result = None

    if kind is TransformationKind.MAP:
        return result, problems
    if kind is TransformationKind.FLAT_MAP:
        if not result.is_list:
            return fail("flatmap-list", f"FlatMap function must return a list at site {site}")
        return result.elem, problems
    if kind is TransformationKind.FILTER:
        if result != BOOL:
            return fail("filter-bool", f"Filter predicate must return Bool at site {site}")
        return elem, problems
    if kind is TransformationKind.DISTINCT:
        return elem, problems
    if kind is TransformationKind.SORT_BY:
        if not result.is_orderable:
            return fail("orderable", f"SortBy key must be int, float, string or bool at site {site}")
        return elem, problems
    if kind in (TransformationKind.SORT_BY_KEY, TransformationKind.GROUP_BY_KEY,
                TransformationKind.REDUCE_BY_KEY):
        if not elem.is_pair:
            return fail("pair-required", f"{label} requires Pair element type at site {site}")
        if kind is TransformationKind.SORT_BY_KEY:
            if not elem.key.is_orderable:
                return fail("orderable", f"SortByKey key must be int, float, string or bool at site {site}")
            return elem, problems
        if kind is TransformationKind.GROUP_BY_KEY:
            return pair_of(elem.key, list_of(elem.value)), problems
        if result != elem.value:
            return fail("reduce-result", f"ReduceByKey function must return {elem.value} at site {site}")
        return elem, problems
    if kind in SET_KINDS:
        if input_types[0] != input_types[1]:
            return fail("set-types", f"{label} requires both inputs of one element type at site {site}")
        return elem, problems
    # joins
    left, right = input_types
    if not (left.is_pair and right.is_pair):
        return fail("pair-required", f"{label} requires Pair element types at site {site}")
    if left.key != right.key:
        return fail("join-keys", f"{label} requires matching key types at site {site}")
    return pair_of(left.key, pair_of(left.value, right.value)), problems


def _kind_label(kind: TransformationKind) -> str:
    return kind.value[0].upper() + kind.value[1:]


def validate(graph: ProgramGraph) -> ValidationResult:
    """Check site numbering, dataset production, type signatures and acyclicity"""
    diagnostics: List[ValidationDiagnostic] = []
    known = {ds.id: ds for ds in graph.datasets}
    if len(known) != len(graph.datasets):
        diagnostics.append(ValidationDiagnostic(None, "dataset-ids", "duplicate dataset ids"))

    for index, t in enumerate(graph.transformations):
        if t.id != index:
            diagnostics.append(ValidationDiagnostic(
                t.id, "site-order", f"transformation id {t.id} does not match its position {index}"))

    producers: Dict[int, List[int]] = {}
    for t in graph.transformations:
        producers.setdefault(t.output, []).append(t.id)
    for ds in graph.datasets:
        sites = producers.get(ds.id, [])
        if ds.id in graph.inputs:
            if sites:
                diagnostics.append(ValidationDiagnostic(
                    sites[0], "input-produced", f"input dataset '{ds.name}' is produced at site {sites[0]}"))
        elif len(sites) != 1:
            diagnostics.append(ValidationDiagnostic(
                sites[0] if sites else None, "single-producer",
                f"dataset '{ds.name}' must be produced by exactly one transformation"))

    for t in graph.transformations:
        missing = [i for i in t.inputs + (t.output,) if i not in known]
        if missing:
            diagnostics.append(ValidationDiagnostic(
                t.id, "dangling", f"site {t.id} references unknown dataset id {missing[0]}"))
            continue
        output_type, problems = infer_output_type(
            t.kind, [known[i].elem_type for i in t.inputs], t.udfs, t.id)
        diagnostics.extend(problems)
        if output_type is not None and output_type != known[t.output].elem_type:
            diagnostics.append(ValidationDiagnostic(
                t.id, "output-type",
                f"site {t.id} declares {known[t.output].elem_type} but computes {output_type}"))
        if not t.kind.is_sort and not t.ascending:
            diagnostics.append(ValidationDiagnostic(
                t.id, "ordering", f"only sort transformations take an ordering (site {t.id})"))

    for out in graph.outputs:
        if out.dataset not in known:
            diagnostics.append(ValidationDiagnostic(
                None, "dangling", f"output '{out.name}' references an unknown dataset"))
    if not graph.outputs:
        diagnostics.append(ValidationDiagnostic(None, "outputs", "program declares no output"))

    sorter = TopologicalSorter()
    for t in graph.transformations:
        sorter.add(("t", t.id), *[("d", i) for i in t.inputs])
        sorter.add(("d", t.output), ("t", t.id))
    try:
        tuple(sorter.static_order())
    except CycleError:
        diagnostics.append(ValidationDiagnostic(None, "acyclic", "the dataflow graph contains a cycle"))

    return ValidationResult(tuple(diagnostics))


def signature(site: int, graph: ProgramGraph) -> Tuple[Tuple[ValueType, ...], ValueType]:
    """Input and output element types of a transformation site"""
    t = graph.site(site)
    inputs = tuple(graph.dataset(i).elem_type for i in t.inputs)
    return inputs, graph.dataset(t.output).elem_type


def execution_order(graph: ProgramGraph) -> List[Transformation]:
    """Transformations in dependency order (program order when already sorted)"""
    produced_by = {t.output: t.id for t in graph.transformations}
    sorter = TopologicalSorter()
    for t in graph.transformations:
        sorter.add(t.id, *[produced_by[i] for i in t.inputs if i in produced_by])
    sorter.prepare()
    order: List[int] = []
    while sorter.is_active():
        ready = sorted(sorter.get_ready())
        order.extend(ready)
        sorter.done(*ready)
    return [graph.transformations[i] for i in order]
