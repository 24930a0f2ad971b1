"""
Eager, deterministic evaluation of a ProgramGraph on in-memory datasets.

Each dataset is a single ordered sequence; the order feeds fold order in
reduceByKey and is otherwise preserved as documented per kind. Executions
share no mutable state, so many of them can run concurrently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from modules import logger
from modules.dataflow_model import ProgramGraph, Transformation, TransformationKind, execution_order
from modules.errors import InputMismatchError, UdfRuntimeError
from modules.udf_wrappers import call_udf
from modules.value_types import NULL, ListValue, ValueType, conforms, default_value


@dataclass(frozen=True)
class DatasetInstance:
    elements: Tuple[Any, ...]
    elem_type: ValueType

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class RuntimeFailure:
    site: Optional[int]
    message: str

    def __str__(self) -> str:
        where = f"site {self.site}" if self.site is not None else "program"
        return f"runtime error at {where}: {self.message}"


@dataclass(frozen=True)
class ExecutionOutcome:
    outputs: Optional[Dict[str, DatasetInstance]] = None
    runtime_error: Optional[RuntimeFailure] = None

    @property
    def ok(self) -> bool:
        return self.runtime_error is None


# A hook replaces the evaluation of one site: (transformation, datasets so far, output type) -> output
SiteHook = Callable[[Transformation, Mapping[int, DatasetInstance], ValueType], DatasetInstance]
InputData = Union[DatasetInstance, Sequence[Any]]


def eval_udf(udf, args: Sequence[Any]) -> Any:
    """Evaluate a function (plain or mutated) on concrete arguments"""
    return call_udf(udf, args)


def execute(graph: ProgramGraph, inputs: Mapping[str, InputData],
            site_hooks: Optional[Mapping[int, SiteHook]] = None) -> ExecutionOutcome:
    """Run every transformation in dependency order and collect the declared outputs"""
    env: Dict[int, DatasetInstance] = {}
    for ds in graph.input_datasets:
        if ds.name not in inputs:
            raise InputMismatchError(f"missing input dataset '{ds.name}' for program '{graph.name}'")
        env[ds.id] = _coerce_input(inputs[ds.name], ds.elem_type, ds.name)

    hooks = site_hooks or {}
    for t in execution_order(graph):
        args = [env[i] for i in t.inputs]
        out_type = graph.dataset(t.output).elem_type
        try:
            hook = hooks.get(t.id)
            if hook is not None:
                env[t.output] = hook(t, env, out_type)
            else:
                env[t.output] = apply_transformation(t, args, out_type)
        except UdfRuntimeError as exc:
            site = exc.site if exc.site is not None else t.id
            logger.debug(f"Program '{graph.name}' failed at site {site}: {exc.message}")
            return ExecutionOutcome(runtime_error=RuntimeFailure(site, exc.message))

    return ExecutionOutcome(outputs={o.name: env[o.dataset] for o in graph.outputs})


def _coerce_input(data: InputData, elem_type: ValueType, name: str) -> DatasetInstance:
    if isinstance(data, DatasetInstance):
        if data.elem_type != elem_type:
            raise InputMismatchError(
                f"input '{name}' has element type {data.elem_type}, program declares {elem_type}")
        return data
    elements = tuple(data)
    for index, element in enumerate(elements):
        if not conforms(element, elem_type):
            raise InputMismatchError(f"input '{name}'[{index}] does not conform to {elem_type}")
    return DatasetInstance(elements, elem_type)


def apply_transformation(t: Transformation, inputs: Sequence[DatasetInstance],
                         out_type: ValueType) -> DatasetInstance:
    """Evaluate one transformation on already computed input datasets"""
    handler = _HANDLERS[t.kind]
    elements = handler(t, [d.elements for d in inputs], [d.elem_type for d in inputs])
    return DatasetInstance(tuple(elements), out_type)


# ---------------------------------------------------------------------------
# Per-kind semantics
# ---------------------------------------------------------------------------

def _map(t, data, types) -> Iterable[Any]:
    udf = t.udfs[0]
    return [call_udf(udf, (x,)) for x in data[0]]


def _flat_map(t, data, types) -> Iterable[Any]:
    udf = t.udfs[0]
    out: List[Any] = []
    for x in data[0]:
        items = call_udf(udf, (x,))
        if items is NULL:
            raise UdfRuntimeError("flatMap function returned null")
        out.extend(items)
    return out


def _filter(t, data, types) -> Iterable[Any]:
    udf = t.udfs[0]
    out = []
    for x in data[0]:
        keep = call_udf(udf, (x,))
        if keep is NULL:
            raise UdfRuntimeError("filter predicate returned null")
        if keep:
            out.append(x)
    return out


def _distinct(t, data, types) -> Iterable[Any]:
    return dict.fromkeys(data[0])


def _union(t, data, types) -> Iterable[Any]:
    return data[0] + data[1]


def _intersection(t, data, types) -> Iterable[Any]:
    right = set(data[1])
    return dict.fromkeys(x for x in data[0] if x in right)


def _subtract(t, data, types) -> Iterable[Any]:
    right = set(data[1])
    return [x for x in data[0] if x not in right]


def _pair(element: Any, what: str) -> Tuple[Any, Any]:
    if element is NULL:
        raise UdfRuntimeError(f"{what} applied to a null element")
    return element


def _group_by_key(t, data, types) -> Iterable[Any]:
    groups: Dict[Any, List[Any]] = {}
    for element in data[0]:
        key, value = _pair(element, "groupByKey")
        groups.setdefault(key, []).append(value)
    return [(key, ListValue(values)) for key, values in groups.items()]


def _reduce_by_key(t, data, types) -> Iterable[Any]:
    udf = t.udfs[0]
    accumulators: Dict[Any, Any] = {}
    for element in data[0]:
        key, value = _pair(element, "reduceByKey")
        if key in accumulators:
            accumulators[key] = call_udf(udf, (accumulators[key], value))
        else:
            accumulators[key] = value
    return list(accumulators.items())


def _sort_key(value: Any) -> Any:
    if value is NULL:
        raise UdfRuntimeError("cannot order a null key")
    if isinstance(value, float) and math.isnan(value):
        raise UdfRuntimeError("cannot order NaN")
    return value


def _sort_by(t, data, types) -> Iterable[Any]:
    udf = t.udfs[0]
    keyed = [(_sort_key(call_udf(udf, (x,))), x) for x in data[0]]
    # sorted() is stable in both directions
    keyed.sort(key=lambda kx: kx[0], reverse=not t.ascending)
    return [x for _, x in keyed]


def _sort_by_key(t, data, types) -> Iterable[Any]:
    keyed = [(_sort_key(_pair(x, "sortByKey")[0]), x) for x in data[0]]
    keyed.sort(key=lambda kx: kx[0], reverse=not t.ascending)
    return [x for _, x in keyed]


def _join(t, data, types) -> Iterable[Any]:
    left, right = data
    left_type, right_type = types
    keep_left = t.kind in (TransformationKind.LEFT_OUTER_JOIN, TransformationKind.FULL_OUTER_JOIN)
    keep_right = t.kind in (TransformationKind.RIGHT_OUTER_JOIN, TransformationKind.FULL_OUTER_JOIN)
    fills = dict(t.join_fill)

    index: Dict[Any, List[Any]] = {}
    for element in right:
        key, value = _pair(element, t.kind.value)
        index.setdefault(key, []).append(value)

    out: List[Any] = []
    left_keys = set()
    right_fill = fills["right"] if "right" in fills else default_value(right_type.value)
    for element in left:
        key, value = _pair(element, t.kind.value)
        left_keys.add(key)
        matches = index.get(key)
        if matches:
            out.extend((key, (value, w)) for w in matches)
        elif keep_left:
            out.append((key, (value, right_fill)))
    if keep_right:
        fill = fills["left"] if "left" in fills else default_value(left_type.value)
        for element in right:
            key, value = element
            if key not in left_keys:
                out.append((key, (fill, value)))
    return out


_HANDLERS: Dict[TransformationKind, Callable] = {
    TransformationKind.MAP: _map,
    TransformationKind.FLAT_MAP: _flat_map,
    TransformationKind.FILTER: _filter,
    TransformationKind.DISTINCT: _distinct,
    TransformationKind.SORT_BY: _sort_by,
    TransformationKind.SORT_BY_KEY: _sort_by_key,
    TransformationKind.GROUP_BY_KEY: _group_by_key,
    TransformationKind.REDUCE_BY_KEY: _reduce_by_key,
    TransformationKind.UNION: _union,
    TransformationKind.INTERSECTION: _intersection,
    TransformationKind.SUBTRACT: _subtract,
    TransformationKind.JOIN: _join,
    TransformationKind.LEFT_OUTER_JOIN: _join,
    TransformationKind.RIGHT_OUTER_JOIN: _join,
    TransformationKind.FULL_OUTER_JOIN: _join,
}
