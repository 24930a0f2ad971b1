"""
The closed UDF expression language: typed AST, type inference, evaluation
and canonical formatting.

Nodes are frozen dataclasses. `type` is filled in by `typecheck_lambda`;
spans never take part in equality so re-parsed trees compare structurally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Optional, Sequence, Tuple

from modules.diagnostics import SourceSpan
from modules.errors import UdfRuntimeError
from modules.value_types import (
    BOOL,
    FLOAT,
    INT,
    INT_MAX,
    INT_MIN,
    NULL,
    STR,
    ListValue,
    TypeKind,
    ValueType,
    list_of,
    pair_of,
    quote_string,
)

ARITHMETIC_OPS = ("+", "-", "*", "/", "%")
EQUALITY_OPS = ("==", "!=")
ORDERING_OPS = ("<", "<=", ">", ">=")
BOOLEAN_OPS = ("&&", "||")


class ExprTypeError(Exception):
    """Type inference failure, reported by the parser as a diagnostic"""

    def __init__(self, message: str, span: Optional[SourceSpan]):
        super().__init__(message)
        self.message = message
        self.span = span


class UnknownNameError(ExprTypeError):
    """Reference to an undeclared parameter or builtin"""


def _span_field():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Literal:
    value: Any
    type: Optional[ValueType] = None
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True)
class Param:
    name: str
    index: int = 0
    type: Optional[ValueType] = None
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True)
class MakePair:
    left: "Expr"
    right: "Expr"
    type: Optional[ValueType] = None
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True)
class Project:
    operand: "Expr"
    field_name: str  # "key" or "value"
    type: Optional[ValueType] = None
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: "Expr"
    right: "Expr"
    type: Optional[ValueType] = None
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True)
class UnaryOp:
    op: str  # "-" or "!"
    operand: "Expr"
    type: Optional[ValueType] = None
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Expr", ...]
    type_arg: Optional[ValueType] = None  # emptyList<T>() only
    type: Optional[ValueType] = None
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True)
class IfExpr:
    cond: "Expr"
    then_branch: "Expr"
    else_branch: "Expr"
    type: Optional[ValueType] = None
    span: Optional[SourceSpan] = _span_field()


Expr = Any  # Literal | Param | MakePair | Project | BinaryOp | UnaryOp | Call | IfExpr


@dataclass(frozen=True)
class Lambda:
    """A user-defined function: named parameters and a body expression"""
    params: Tuple[str, ...]
    body: Expr
    param_types: Tuple[ValueType, ...] = ()
    span: Optional[SourceSpan] = _span_field()

    @property
    def result_type(self) -> Optional[ValueType]:
        return self.body.type


# ---------------------------------------------------------------------------
# Type inference
# ---------------------------------------------------------------------------

_STR_PREDICATES = ("contains", "startsWith", "endsWith")
_LIST_BUILTINS = ("head", "tail", "reverse", "length")
BUILTIN_NAMES = frozenset(
    ("split", "concat", "lower", "upper", "len", "emptyList") + _STR_PREDICATES + _LIST_BUILTINS
)


def typecheck_lambda(lam: Lambda, param_types: Sequence[ValueType]) -> Lambda:
    """Infer types for every node of the lambda body; raises ExprTypeError"""
    if len(lam.params) != len(param_types):
        raise ExprTypeError(
            f"function takes {len(param_types)} parameter(s), got {len(lam.params)}", lam.span
        )
    if len(set(lam.params)) != len(lam.params):
        raise ExprTypeError("duplicate parameter name", lam.span)
    env = {name: (i, t) for i, (name, t) in enumerate(zip(lam.params, param_types))}
    body = _infer(lam.body, env)
    return replace(lam, body=body, param_types=tuple(param_types))


def _infer(node: Expr, env) -> Expr:
    if isinstance(node, Literal):
        return replace(node, type=_literal_type(node))
    if isinstance(node, Param):
        if node.name not in env:
            raise UnknownNameError(f"unknown identifier '{node.name}'", node.span)
        index, param_type = env[node.name]
        return replace(node, index=index, type=param_type)
    if isinstance(node, MakePair):
        left = _infer(node.left, env)
        right = _infer(node.right, env)
        return replace(node, left=left, right=right, type=pair_of(left.type, right.type))
    if isinstance(node, Project):
        operand = _infer(node.operand, env)
        if not operand.type.is_pair:
            raise ExprTypeError(f".{node.field_name} requires a pair, got {operand.type}", node.span)
        result = operand.type.key if node.field_name == "key" else operand.type.value
        return replace(node, operand=operand, type=result)
    if isinstance(node, UnaryOp):
        operand = _infer(node.operand, env)
        if node.op == "-" and not operand.type.is_numeric:
            raise ExprTypeError("unary - requires a numeric operand", node.span)
        if node.op == "!" and operand.type != BOOL:
            raise ExprTypeError("operator ! requires a bool operand", node.span)
        return replace(node, operand=operand, type=operand.type)
    if isinstance(node, BinaryOp):
        return _infer_binary(node, env)
    if isinstance(node, Call):
        args = tuple(_infer(a, env) for a in node.args)
        return replace(node, args=args, type=_call_type(node, [a.type for a in args]))
    if isinstance(node, IfExpr):
        cond = _infer(node.cond, env)
        if cond.type != BOOL:
            raise ExprTypeError("if condition must be bool", node.span)
        then_branch = _infer(node.then_branch, env)
        else_branch = _infer(node.else_branch, env)
        if then_branch.type != else_branch.type:
            raise ExprTypeError(
                f"if branches differ in type: {then_branch.type} vs {else_branch.type}", node.span
            )
        return replace(node, cond=cond, then_branch=then_branch, else_branch=else_branch,
                       type=then_branch.type)
    raise ExprTypeError(f"unsupported expression {type(node).__name__}", None)


def _literal_type(node: Literal) -> ValueType:
    value = node.value
    if isinstance(value, bool):
        return BOOL
    if isinstance(value, int):
        if not INT_MIN <= value <= INT_MAX:
            raise ExprTypeError(f"integer literal {value} out of 64-bit range", node.span)
        return INT
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ExprTypeError("float literal out of double range", node.span)
        return FLOAT
    return STR


def _infer_binary(node: BinaryOp, env) -> BinaryOp:
    left = _infer(node.left, env)
    right = _infer(node.right, env)
    op = node.op
    if op in ARITHMETIC_OPS:
        if not (left.type.is_numeric and right.type.is_numeric):
            raise ExprTypeError(f"operator {op} requires numeric operands", node.span)
        if left.type != right.type:
            raise ExprTypeError(f"operator {op} mixes {left.type} and {right.type}", node.span)
        result = left.type
    elif op in EQUALITY_OPS:
        if left.type != right.type:
            raise ExprTypeError(f"operator {op} compares {left.type} with {right.type}", node.span)
        result = BOOL
    elif op in ORDERING_OPS:
        if left.type != right.type or not left.type.is_orderable:
            raise ExprTypeError(f"operator {op} requires two operands of one orderable type", node.span)
        result = BOOL
    elif op in BOOLEAN_OPS:
        if left.type != BOOL or right.type != BOOL:
            raise ExprTypeError(f"operator {op} requires bool operands", node.span)
        result = BOOL
    else:
        raise ExprTypeError(f"unknown operator {op}", node.span)
    return replace(node, left=left, right=right, type=result)


def _call_type(node: Call, arg_types) -> ValueType:
    name = node.name

    def expect(*expected):
        if len(arg_types) != len(expected):
            raise ExprTypeError(f"{name} takes {len(expected)} argument(s)", node.span)
        for actual, wanted in zip(arg_types, expected):
            if wanted == "list":
                if not actual.is_list:
                    raise ExprTypeError(f"{name} requires a list argument, got {actual}", node.span)
            elif actual != wanted:
                raise ExprTypeError(f"{name} expects {wanted} argument, got {actual}", node.span)

    if name == "split":
        expect(STR, STR)
        return list_of(STR)
    if name == "concat":
        expect(STR, STR)
        return STR
    if name in _STR_PREDICATES:
        expect(STR, STR)
        return BOOL
    if name in ("lower", "upper"):
        expect(STR)
        return STR
    if name == "len":
        expect(STR)
        return INT
    if name == "head":
        expect("list")
        return arg_types[0].elem
    if name in ("tail", "reverse"):
        expect("list")
        return arg_types[0]
    if name == "length":
        expect("list")
        return INT
    if name == "emptyList":
        expect()
        if node.type_arg is None:
            raise ExprTypeError("emptyList requires a type argument", node.span)
        return list_of(node.type_arg)
    raise UnknownNameError(f"unknown function '{name}'", node.span)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def wrap_int(value: int) -> int:
    """64-bit two's complement wrap-around"""
    return ((value - INT_MIN) % (2 ** 64)) + INT_MIN


def call_lambda(lam: Lambda, args: Sequence[Any]) -> Any:
    return evaluate(lam.body, tuple(args))


def evaluate(node: Expr, env: Tuple[Any, ...]) -> Any:
    if isinstance(node, Literal):
        return node.value
    if isinstance(node, Param):
        return env[node.index]
    if isinstance(node, MakePair):
        return (evaluate(node.left, env), evaluate(node.right, env))
    if isinstance(node, Project):
        operand = _not_null(evaluate(node.operand, env), f".{node.field_name}")
        return operand[0] if node.field_name == "key" else operand[1]
    if isinstance(node, UnaryOp):
        operand = _not_null(evaluate(node.operand, env), f"unary {node.op}")
        if node.op == "!":
            return not operand
        if isinstance(operand, int):
            return wrap_int(-operand)
        return -operand
    if isinstance(node, BinaryOp):
        return _eval_binary(node, env)
    if isinstance(node, Call):
        return _eval_call(node, [evaluate(a, env) for a in node.args])
    if isinstance(node, IfExpr):
        cond = _not_null(evaluate(node.cond, env), "if condition")
        return evaluate(node.then_branch if cond else node.else_branch, env)
    raise UdfRuntimeError(f"cannot evaluate {type(node).__name__}")


def _not_null(value: Any, what: str) -> Any:
    if value is NULL:
        raise UdfRuntimeError(f"{what} applied to null")
    return value


def _eval_binary(node: BinaryOp, env) -> Any:
    op = node.op
    if op in BOOLEAN_OPS:
        left = _not_null(evaluate(node.left, env), f"operator {op}")
        if op == "&&" and not left:
            return False
        if op == "||" and left:
            return True
        return _not_null(evaluate(node.right, env), f"operator {op}")

    left = evaluate(node.left, env)
    right = evaluate(node.right, env)
    if op == "==":
        return _structural_eq(left, right)
    if op == "!=":
        return not _structural_eq(left, right)
    _not_null(left, f"operator {op}")
    _not_null(right, f"operator {op}")
    if op in ORDERING_OPS:
        _not_nan(left, op)
        _not_nan(right, op)
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    if op == ">=":
        return left >= right
    if isinstance(left, float):
        return _float_arith(op, left, right)
    return _int_arith(op, left, right)


def _not_nan(value: Any, op: str) -> None:
    if isinstance(value, float) and math.isnan(value):
        raise UdfRuntimeError(f"operator {op} cannot order NaN")


def _structural_eq(left: Any, right: Any) -> bool:
    if left is NULL or right is NULL:
        return left is right
    if isinstance(left, tuple) and isinstance(right, tuple):
        return len(left) == len(right) and all(_structural_eq(a, b) for a, b in zip(left, right))
    return left == right


def _int_arith(op: str, left: int, right: int) -> int:
    if op == "+":
        return wrap_int(left + right)
    if op == "-":
        return wrap_int(left - right)
    if op == "*":
        return wrap_int(left * right)
    if right == 0:
        raise UdfRuntimeError("division by zero" if op == "/" else "modulo by zero")
    quotient = abs(left) // abs(right)
    if (left < 0) != (right < 0):
        quotient = -quotient
    if op == "/":
        return wrap_int(quotient)
    return wrap_int(left - right * quotient)


def _float_arith(op: str, left: float, right: float) -> float:
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if right == 0.0:
        raise UdfRuntimeError("division by zero" if op == "/" else "modulo by zero")
    if op == "/":
        return left / right
    if math.isinf(left):
        return math.nan
    return math.fmod(left, right)


def split_string(text: str, separator: str) -> ListValue:
    """Literal-separator split with JVM String.split trailing-empty removal"""
    if separator == "":
        return ListValue(text)
    parts = text.split(separator)
    if len(parts) == 1:
        return ListValue(parts)
    while parts and parts[-1] == "":
        parts.pop()
    return ListValue(parts)


def _eval_call(node: Call, args) -> Any:
    name = node.name
    if name == "emptyList":
        return ListValue()
    for arg in args:
        _not_null(arg, name)
    if name == "split":
        return split_string(args[0], args[1])
    if name == "concat":
        return args[0] + args[1]
    if name == "contains":
        return args[1] in args[0]
    if name == "startsWith":
        return args[0].startswith(args[1])
    if name == "endsWith":
        return args[0].endswith(args[1])
    if name == "lower":
        return args[0].lower()
    if name == "upper":
        return args[0].upper()
    if name == "len":
        return len(args[0])
    if name == "head":
        if not args[0]:
            raise UdfRuntimeError("head of empty list")
        return args[0][0]
    if name == "tail":
        if not args[0]:
            raise UdfRuntimeError("tail of empty list")
        return ListValue(args[0][1:])
    if name == "reverse":
        return ListValue(reversed(args[0]))
    if name == "length":
        return len(args[0])
    raise UdfRuntimeError(f"unknown function '{name}'")


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------

def format_type(value_type: ValueType) -> str:
    if value_type.kind is TypeKind.PAIR:
        return f"({format_type(value_type.key)}, {format_type(value_type.value)})"
    if value_type.kind is TypeKind.LIST:
        return f"list<{format_type(value_type.elem)}>"
    return value_type.kind.value


def format_literal(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    return quote_string(value)


def format_expr(node: Expr) -> str:
    """Canonical rendering; parsing the output yields a structurally equal tree"""
    if isinstance(node, Lambda):
        return format_lambda(node)
    if isinstance(node, Literal):
        return format_literal(node.value)
    if isinstance(node, Param):
        return node.name
    if isinstance(node, MakePair):
        return f"({format_expr(node.left)}, {format_expr(node.right)})"
    if isinstance(node, Project):
        return f"{_atomic(node.operand)}.{node.field_name}"
    if isinstance(node, UnaryOp):
        return f"{node.op}({format_expr(node.operand)})"
    if isinstance(node, BinaryOp):
        return f"{_operand(node.left)} {node.op} {_operand(node.right)}"
    if isinstance(node, Call):
        type_arg = f"<{format_type(node.type_arg)}>" if node.type_arg is not None else ""
        return f"{node.name}{type_arg}({', '.join(format_expr(a) for a in node.args)})"
    if isinstance(node, IfExpr):
        return (
            f"if {_operand(node.cond)} then {_operand(node.then_branch)} "
            f"else {format_expr(node.else_branch)}"
        )
    raise TypeError(f"cannot format {type(node).__name__}")


def format_lambda(lam: Lambda) -> str:
    if len(lam.params) == 1:
        return f"{lam.params[0]} -> {format_expr(lam.body)}"
    return f"({', '.join(lam.params)}) -> {format_expr(lam.body)}"


def _operand(node: Expr) -> str:
    if isinstance(node, (BinaryOp, IfExpr)):
        return f"({format_expr(node)})"
    return format_expr(node)


def _atomic(node: Expr) -> str:
    if isinstance(node, (Param, Call, MakePair, Project)):
        return format_expr(node)
    if isinstance(node, Literal) and not (isinstance(node.value, (int, float))
                                          and not isinstance(node.value, bool) and node.value < 0):
        return format_expr(node)
    return f"({format_expr(node)})"
