"""
Function-parameter mutations: wrappers placed around a transformation's UDF.

A WrappedUdf behaves like a Lambda for typing (same parameter and result
types) and is evaluated by calling the original function first where the
replacement needs the original value.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterator, List, Optional, Tuple, Union

from modules.errors import UdfRuntimeError
from modules.udf_expr import Lambda, call_lambda, format_lambda, wrap_int
from modules.value_types import (
    FLOAT_MAX,
    FLOAT_MIN,
    INT_MAX,
    INT_MIN,
    NULL,
    ListValue,
    TypeKind,
    ValueType,
)


class MappingValueId(str, Enum):
    NUM_0 = "Num0"
    NUM_1 = "Num1"
    NUM_MAX = "NumMax"
    NUM_MIN = "NumMin"
    NUM_NEGATE = "NumNegate"
    BOOL_TRUE = "BoolTrue"
    BOOL_FALSE = "BoolFalse"
    BOOL_NEGATE = "BoolNegate"
    STR_EMPTY = "StrEmpty"
    LIST_HEAD = "ListHead"
    LIST_TAIL = "ListTail"
    LIST_REVERSE = "ListReverse"
    LIST_NIL = "ListNil"
    TUPLE_KEY_MOD = "TupleKeyMod"
    TUPLE_VALUE_MOD = "TupleValueMod"
    NULL_VALUE = "NullValue"


_NUMERIC_IDS = (MappingValueId.NUM_0, MappingValueId.NUM_1, MappingValueId.NUM_MAX,
                MappingValueId.NUM_MIN, MappingValueId.NUM_NEGATE)
_BOOL_IDS = (MappingValueId.BOOL_TRUE, MappingValueId.BOOL_FALSE, MappingValueId.BOOL_NEGATE)
_LIST_IDS = (MappingValueId.LIST_HEAD, MappingValueId.LIST_TAIL, MappingValueId.LIST_REVERSE,
             MappingValueId.LIST_NIL)


@dataclass(frozen=True)
class MappingValue:
    """A mapping value; tuple modifications carry the mapping applied to one component"""
    id: MappingValueId
    inner: Optional["MappingValue"] = None

    @property
    def label(self) -> str:
        if self.inner is not None:
            return f"{self.id.value}({self.inner.label})"
        return self.id.value

    def leaf_ids(self) -> Iterator[MappingValueId]:
        yield self.id
        if self.inner is not None:
            yield from self.inner.leaf_ids()

    def apply(self, x: Any, value_type: ValueType) -> Any:
        """Map the original value x (of value_type) to the mutated value"""
        ident = self.id
        if ident is MappingValueId.NULL_VALUE:
            return NULL
        if ident is MappingValueId.TUPLE_KEY_MOD:
            pair = _require(x, "tuple mapping")
            return (self.inner.apply(pair[0], value_type.key), pair[1])
        if ident is MappingValueId.TUPLE_VALUE_MOD:
            pair = _require(x, "tuple mapping")
            return (pair[0], self.inner.apply(pair[1], value_type.value))
        is_float = value_type.kind is TypeKind.FLOAT
        if ident is MappingValueId.NUM_0:
            return 0.0 if is_float else 0
        if ident is MappingValueId.NUM_1:
            return 1.0 if is_float else 1
        if ident is MappingValueId.NUM_MAX:
            return FLOAT_MAX if is_float else INT_MAX
        if ident is MappingValueId.NUM_MIN:
            return FLOAT_MIN if is_float else INT_MIN
        if ident is MappingValueId.NUM_NEGATE:
            x = _require(x, "negation")
            return -x if is_float else wrap_int(-x)
        if ident is MappingValueId.BOOL_TRUE:
            return True
        if ident is MappingValueId.BOOL_FALSE:
            return False
        if ident is MappingValueId.BOOL_NEGATE:
            return not _require(x, "negation")
        if ident is MappingValueId.STR_EMPTY:
            return ""
        if ident is MappingValueId.LIST_NIL:
            return ListValue()
        items = _require(x, "list mapping")
        if ident is MappingValueId.LIST_HEAD:
            if not items:
                raise UdfRuntimeError("head of empty list")
            return ListValue((items[0],))
        if ident is MappingValueId.LIST_TAIL:
            if not items:
                raise UdfRuntimeError("tail of empty list")
            return ListValue(items[1:])
        return ListValue(reversed(items))

    def render(self, original: str) -> str:
        """Pseudo-code of the mutated value in terms of the original expression text"""
        ident = self.id
        if ident is MappingValueId.TUPLE_KEY_MOD:
            return f"({self.inner.render(original + '.key')}, {original}.value)"
        if ident is MappingValueId.TUPLE_VALUE_MOD:
            return f"({original}.key, {self.inner.render(original + '.value')})"
        return {
            MappingValueId.NUM_0: "0",
            MappingValueId.NUM_1: "1",
            MappingValueId.NUM_MAX: "MAX",
            MappingValueId.NUM_MIN: "MIN",
            MappingValueId.NUM_NEGATE: f"-({original})",
            MappingValueId.BOOL_TRUE: "true",
            MappingValueId.BOOL_FALSE: "false",
            MappingValueId.BOOL_NEGATE: f"!({original})",
            MappingValueId.STR_EMPTY: '""',
            MappingValueId.LIST_HEAD: f"[head({original})]",
            MappingValueId.LIST_TAIL: f"tail({original})",
            MappingValueId.LIST_REVERSE: f"reverse({original})",
            MappingValueId.LIST_NIL: "[]",
            MappingValueId.NULL_VALUE: "null",
        }[ident]


def _require(value: Any, what: str) -> Any:
    if value is NULL:
        raise UdfRuntimeError(f"{what} applied to null")
    return value


def applicable_mappings(value_type: ValueType) -> List[MappingValue]:
    """Mapping values applicable to a result type, in canonical order"""
    kind = value_type.kind
    if kind in (TypeKind.INT, TypeKind.FLOAT):
        return [MappingValue(i) for i in _NUMERIC_IDS]
    if kind is TypeKind.BOOL:
        return [MappingValue(i) for i in _BOOL_IDS]
    if kind is TypeKind.STR:
        return [MappingValue(MappingValueId.STR_EMPTY)]
    if kind is TypeKind.LIST:
        return [MappingValue(i) for i in _LIST_IDS]
    if kind is TypeKind.PAIR:
        keys = [MappingValue(MappingValueId.TUPLE_KEY_MOD, m) for m in applicable_mappings(value_type.key)]
        values = [MappingValue(MappingValueId.TUPLE_VALUE_MOD, m) for m in applicable_mappings(value_type.value)]
        return keys + values
    return [MappingValue(MappingValueId.NULL_VALUE)]


class AggReplacement(str, Enum):
    FIRST_ARG = "FirstArg"  # f(x, y) = x
    SECOND_ARG = "SecondArg"  # f(x, y) = y
    DUP_FIRST = "DupFirst"  # f(x, x)
    DUP_SECOND = "DupSecond"  # f(y, y)
    SWAPPED = "Swapped"  # f(y, x)


@dataclass(frozen=True)
class NegatePredicate:
    label = "NegatePredicate"


@dataclass(frozen=True)
class MapResult:
    mapping: MappingValue

    @property
    def label(self) -> str:
        return self.mapping.label


@dataclass(frozen=True)
class AggReplace:
    variant: AggReplacement

    @property
    def label(self) -> str:
        return self.variant.value


UdfWrapper = Union[NegatePredicate, MapResult, AggReplace]


@dataclass(frozen=True)
class WrappedUdf:
    inner: Lambda
    wrapper: UdfWrapper

    @property
    def param_types(self) -> Tuple[ValueType, ...]:
        return self.inner.param_types

    @property
    def result_type(self) -> ValueType:
        return self.inner.result_type

    def render(self) -> str:
        params = self.inner.params
        head = params[0] if len(params) == 1 else f"({', '.join(params)})"
        body = format_lambda(self.inner).split(" -> ", 1)[1]
        wrapper = self.wrapper
        if isinstance(wrapper, NegatePredicate):
            return f"{head} -> !({body})"
        if isinstance(wrapper, MapResult):
            return f"{head} -> {wrapper.mapping.render(body if _is_simple(body) else f'({body})')}"
        x, y = params if len(params) == 2 else (params[0], params[0])
        variant = wrapper.variant
        if variant is AggReplacement.FIRST_ARG:
            return f"{head} -> {x}"
        if variant is AggReplacement.SECOND_ARG:
            return f"{head} -> {y}"
        args = {AggReplacement.DUP_FIRST: (x, x), AggReplacement.DUP_SECOND: (y, y),
                AggReplacement.SWAPPED: (y, x)}[variant]
        return f"{head} -> f({args[0]}, {args[1]}) where f = {format_lambda(self.inner)}"


def _is_simple(text: str) -> bool:
    return text.replace("_", "").isalnum()


def call_udf(udf, args) -> Any:
    """Call a Lambda or a WrappedUdf"""
    if isinstance(udf, Lambda):
        return call_lambda(udf, args)
    inner = udf.inner
    wrapper = udf.wrapper
    if isinstance(wrapper, NegatePredicate):
        return not _require(call_lambda(inner, args), "negation")
    if isinstance(wrapper, MapResult):
        # Constant mappings still evaluate the original function first
        original = call_lambda(inner, args)
        return wrapper.mapping.apply(original, inner.result_type)
    x, y = args
    variant = wrapper.variant
    if variant is AggReplacement.FIRST_ARG:
        return x
    if variant is AggReplacement.SECOND_ARG:
        return y
    if variant is AggReplacement.DUP_FIRST:
        return call_lambda(inner, (x, x))
    if variant is AggReplacement.DUP_SECOND:
        return call_lambda(inner, (y, y))
    return call_lambda(inner, (y, x))
