"""
Element types and runtime values of the dataflow language.

Runtime representation:
- Int -> int, Float -> float, Bool -> bool, Str -> str
- Pair -> plain 2-tuple (key, value)
- ListOf -> ListValue (a tuple subclass, so values stay hashable)
- Null -> the NULL singleton
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

INT_MAX = 2 ** 63 - 1
INT_MIN = -(2 ** 63)
FLOAT_MAX = sys.float_info.max
FLOAT_MIN = -sys.float_info.max


class TypeKind(str, Enum):
    INT = "int"
    FLOAT = "float"
    BOOL = "bool"
    STR = "string"
    PAIR = "pair"
    LIST = "list"


@dataclass(frozen=True)
class ValueType:
    kind: TypeKind
    key: Optional["ValueType"] = None
    value: Optional["ValueType"] = None
    elem: Optional["ValueType"] = None

    @property
    def is_pair(self) -> bool:
        return self.kind is TypeKind.PAIR

    @property
    def is_list(self) -> bool:
        return self.kind is TypeKind.LIST

    @property
    def is_numeric(self) -> bool:
        return self.kind in (TypeKind.INT, TypeKind.FLOAT)

    @property
    def is_orderable(self) -> bool:
        return self.kind in (TypeKind.INT, TypeKind.FLOAT, TypeKind.STR, TypeKind.BOOL)

    def __str__(self) -> str:
        if self.kind is TypeKind.PAIR:
            return f"({self.key}, {self.value})"
        if self.kind is TypeKind.LIST:
            return f"list<{self.elem}>"
        return self.kind.value


INT = ValueType(TypeKind.INT)
FLOAT = ValueType(TypeKind.FLOAT)
BOOL = ValueType(TypeKind.BOOL)
STR = ValueType(TypeKind.STR)


def pair_of(key: ValueType, value: ValueType) -> ValueType:
    return ValueType(TypeKind.PAIR, key=key, value=value)


def list_of(elem: ValueType) -> ValueType:
    return ValueType(TypeKind.LIST, elem=elem)


class ListValue(tuple):
    """Immutable list value; distinct from a pair at runtime"""

    def __repr__(self) -> str:
        return f"[{', '.join(repr(v) for v in self)}]"


class _NullType:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "null"

    def __reduce__(self):
        return (_NullType, ())


NULL = _NullType()


def is_null(value: Any) -> bool:
    return value is NULL


def conforms(value: Any, value_type: ValueType) -> bool:
    """Check that a runtime value has the given type (Null conforms to anything)"""
    if value is NULL:
        return True
    kind = value_type.kind
    if kind is TypeKind.BOOL:
        return isinstance(value, bool)
    if kind is TypeKind.INT:
        return isinstance(value, int) and not isinstance(value, bool) and INT_MIN <= value <= INT_MAX
    if kind is TypeKind.FLOAT:
        return isinstance(value, float)
    if kind is TypeKind.STR:
        return isinstance(value, str)
    if kind is TypeKind.LIST:
        return isinstance(value, ListValue) and all(conforms(v, value_type.elem) for v in value)
    if kind is TypeKind.PAIR:
        return (
            isinstance(value, tuple)
            and not isinstance(value, ListValue)
            and len(value) == 2
            and conforms(value[0], value_type.key)
            and conforms(value[1], value_type.value)
        )
    return False


def default_value(value_type: ValueType) -> Any:
    """Default used to fill missing outer-join sides (getOrElse semantics)"""
    kind = value_type.kind
    if kind is TypeKind.INT:
        return 0
    if kind is TypeKind.FLOAT:
        return 0.0
    if kind is TypeKind.BOOL:
        return False
    if kind is TypeKind.STR:
        return ""
    if kind is TypeKind.LIST:
        return ListValue()
    return (default_value(value_type.key), default_value(value_type.value))


def values_equal(left: Any, right: Any, tolerance: float = 0.0) -> bool:
    """
    Structural equality used when comparing outputs.

    Int and Float never compare equal; floats compare within an absolute tolerance.
    """
    if left is NULL or right is NULL:
        return left is right
    if isinstance(left, bool) or isinstance(right, bool):
        return isinstance(left, bool) and isinstance(right, bool) and left == right
    if isinstance(left, float) or isinstance(right, float):
        if not (isinstance(left, float) and isinstance(right, float)):
            return False
        if math.isnan(left) or math.isnan(right):
            return False
        if left == right:
            return True
        return abs(left - right) <= tolerance
    if isinstance(left, int) or isinstance(right, int):
        return type(left) is type(right) and left == right
    if isinstance(left, str) or isinstance(right, str):
        return isinstance(left, str) and isinstance(right, str) and left == right
    if isinstance(left, ListValue) != isinstance(right, ListValue):
        return False
    if isinstance(left, tuple) and isinstance(right, tuple):
        return len(left) == len(right) and all(
            values_equal(a, b, tolerance) for a, b in zip(left, right)
        )
    return False


def format_value(value: Any) -> str:
    """Human-readable rendering used in reports and the exec command"""
    if value is NULL:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return quote_string(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, ListValue):
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    if isinstance(value, tuple):
        return f"({format_value(value[0])}, {format_value(value[1])})"
    return str(value)


def quote_string(text: str) -> str:
    escaped = (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\t", "\\t")
    )
    return f'"{escaped}"'


def to_json_value(value: Any) -> Any:
    """Encode a runtime value with the test-suite JSON conventions"""
    if value is NULL:
        return None
    if isinstance(value, tuple):
        return [to_json_value(v) for v in value]
    return value


def from_json_value(raw: Any, value_type: ValueType, path: str = "value") -> Any:
    """
    Decode a JSON literal into a runtime value of the given type.

    Pairs are 2-arrays and lists are arrays; ints and floats are told apart by
    the presence of a decimal point (json already parses them that way).
    """
    kind = value_type.kind
    if raw is None:
        raise ValueError(f"{path}: null is not allowed in test data")
    if kind is TypeKind.BOOL:
        if not isinstance(raw, bool):
            raise ValueError(f"{path}: expected bool, got {raw!r}")
        return raw
    if kind is TypeKind.INT:
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise ValueError(f"{path}: expected int, got {raw!r}")
        if not INT_MIN <= raw <= INT_MAX:
            raise ValueError(f"{path}: int {raw} out of 64-bit range")
        return raw
    if kind is TypeKind.FLOAT:
        if not isinstance(raw, float):
            raise ValueError(f"{path}: expected float (with a decimal point), got {raw!r}")
        return raw
    if kind is TypeKind.STR:
        if not isinstance(raw, str):
            raise ValueError(f"{path}: expected string, got {raw!r}")
        return raw
    if kind is TypeKind.LIST:
        if not isinstance(raw, list):
            raise ValueError(f"{path}: expected array for {value_type}, got {raw!r}")
        return ListValue(
            from_json_value(item, value_type.elem, f"{path}[{i}]") for i, item in enumerate(raw)
        )
    if not isinstance(raw, list) or len(raw) != 2:
        raise ValueError(f"{path}: expected 2-array for {value_type}, got {raw!r}")
    return (
        from_json_value(raw[0], value_type.key, f"{path}.key"),
        from_json_value(raw[1], value_type.value, f"{path}.value"),
    )
