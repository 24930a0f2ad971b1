"""
Frontend for `.dflow` sources: lexer, recursive-descent parser, resolution
into typed ProgramGraphs and canonical formatting.

Newlines carry no meaning; every statement starts with a keyword
(`program`, `input`, `output`) or with `<id> =`.
"""
from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from modules import logger
from modules.dataflow_model import (
    Dataset,
    ProgramGraph,
    ProgramOutput,
    Transformation,
    TransformationKind,
    infer_output_type,
    validate,
)
from modules.diagnostics import DiagnosticCode, ParseDiagnostic, Severity, SourceSpan
from modules.errors import DslError
from modules.udf_expr import (
    BinaryOp,
    Call,
    ExprTypeError,
    IfExpr,
    Lambda,
    Literal,
    MakePair,
    Param,
    Project,
    UnaryOp,
    UnknownNameError,
    format_lambda,
    format_type,
    typecheck_lambda,
)
from modules.value_types import BOOL, FLOAT, INT, STR, ValueType, list_of, pair_of

KEYWORDS = frozenset(("program", "input", "output", "if", "then", "else", "true", "false", "asc", "desc"))
_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<float>\d+(?:\.\d+(?:[eE][+-]?\d+)?|[eE][+-]?\d+))
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<op>->|==|!=|<=|>=|&&|\|\||[-+*/%!<>(),.:=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, int, float, string, op, eof
    text: str
    span: SourceSpan
    value: object = None


class _Abort(Exception):
    def __init__(self, diagnostic: ParseDiagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def _error(code: DiagnosticCode, message: str, span: SourceSpan) -> _Abort:
    return _Abort(ParseDiagnostic(Severity.ERROR, code, message, span))


class Lexer:
    def __init__(self, source: str, file: str):
        self.source = source
        self.file = file
        self._line_starts = [0] + [m.end() for m in re.finditer(r"\n", source)]

    def span(self, pos: int, length: int) -> SourceSpan:
        line = bisect.bisect_right(self._line_starts, pos) - 1
        return SourceSpan(self.file, line + 1, pos - self._line_starts[line] + 1, max(length, 1))

    def tokens(self) -> List[Token]:
        result: List[Token] = []
        pos = 0
        source = self.source
        while pos < len(source):
            match = _TOKEN_RE.match(source, pos)
            if match is None:
                if source[pos] == '"':
                    raise _error(DiagnosticCode.LEXICAL, "unterminated string literal", self.span(pos, 1))
                raise _error(DiagnosticCode.LEXICAL, f"unexpected character {source[pos]!r}", self.span(pos, 1))
            kind = match.lastgroup
            text = match.group()
            span = self.span(pos, len(text))
            pos = match.end()
            if kind in ("ws", "comment"):
                continue
            if kind == "ident":
                result.append(Token("keyword" if text in KEYWORDS else "ident", text, span))
            elif kind == "int":
                result.append(Token("int", text, span, int(text)))
            elif kind == "float":
                result.append(Token("float", text, span, float(text)))
            elif kind == "string":
                result.append(Token("string", text, span, self._unescape(text, span)))
            else:
                result.append(Token("op", text, span))
        result.append(Token("eof", "", self.span(len(source), 1)))
        return result

    def _unescape(self, text: str, span: SourceSpan) -> str:
        out = []
        body = text[1:-1]
        i = 0
        while i < len(body):
            ch = body[i]
            if ch == "\\":
                escaped = body[i + 1]
                if escaped not in _ESCAPES:
                    raise _error(DiagnosticCode.LEXICAL, f"invalid escape sequence \\{escaped}", span)
                out.append(_ESCAPES[escaped])
                i += 2
            else:
                out.append(ch)
                i += 1
        return "".join(out)


# ---------------------------------------------------------------------------
# Syntax tree of statements (names unresolved)
# ---------------------------------------------------------------------------

@dataclass
class _InputDecl:
    name: Token
    elem_type: ValueType


@dataclass
class _Step:
    target: Token
    source: Token
    method: Token
    span: SourceSpan
    lam: Optional[Lambda] = None
    other: Optional[Token] = None
    ascending: bool = True


@dataclass
class _OutputDecl:
    names: List[Token]


@dataclass
class _ProgramSyntax:
    name: Token
    statements: List[object] = field(default_factory=list)


class Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ----------------------------------------------------

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.current
        if token.kind != "eof":
            self.pos += 1
        return token

    def at(self, text: str) -> bool:
        token = self.current
        return token.kind in ("op", "keyword") and token.text == text

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.unexpected(f"'{text}'")
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> Token:
        if self.current.kind != "ident":
            raise self.unexpected(what)
        return self.advance()

    def unexpected(self, wanted: str) -> _Abort:
        token = self.current
        found = "end of input" if token.kind == "eof" else f"'{token.text}'"
        return _error(DiagnosticCode.SYNTAX, f"expected {wanted}, found {found}", token.span)

    # -- statements -------------------------------------------------------

    def parse_file(self) -> List[_ProgramSyntax]:
        programs = []
        if self.current.kind == "eof":
            raise _error(DiagnosticCode.SYNTAX, "source contains no program", self.current.span)
        while self.current.kind != "eof":
            programs.append(self.parse_program())
        return programs

    def parse_program(self) -> _ProgramSyntax:
        self.expect("program")
        program = _ProgramSyntax(self.expect_ident("program name"))
        while self.current.kind != "eof" and not self.at("program"):
            program.statements.append(self.parse_statement())
        return program

    def parse_statement(self):
        if self.accept("input"):
            name = self.expect_ident("input dataset name")
            self.expect(":")
            type_token = self.current
            declared = self.parse_type()
            if not declared.is_list:
                raise _error(DiagnosticCode.SYNTAX,
                             "input type must be list<T> (a dataset of T)", type_token.span)
            return _InputDecl(name, declared.elem)
        if self.accept("output"):
            names = [self.expect_ident("output dataset name")]
            while self.accept(","):
                names.append(self.expect_ident("output dataset name"))
            return _OutputDecl(names)
        if self.current.kind == "ident" and self.peek().text == "=":
            return self.parse_step()
        raise self.unexpected("'input', 'output' or '<dataset> ='")

    def parse_step(self) -> _Step:
        target = self.advance()
        self.expect("=")
        source = self.expect_ident("dataset name")
        self.expect(".")
        method = self.expect_ident("transformation name")
        step = _Step(target, source, method, target.span)
        kind = _kind_of(method)
        self.expect("(")
        if kind is None:
            raise _error(DiagnosticCode.UNKNOWN_ID, f"unknown transformation '{method.text}'", method.span)
        if kind.is_binary:
            step.other = self.expect_ident("dataset name")
        elif kind.udf_count:
            step.lam = self.parse_lambda()
            if kind is TransformationKind.SORT_BY and self.accept(","):
                step.ascending = self.parse_ordering()
        elif kind is TransformationKind.SORT_BY_KEY and not self.at(")"):
            step.ascending = self.parse_ordering()
        close = self.expect(")")
        if close.span.line == target.span.line:
            step.span = SourceSpan(target.span.file, target.span.line, target.span.column,
                                   close.span.column + 1 - target.span.column)
        return step

    def parse_ordering(self) -> bool:
        if self.accept("asc"):
            return True
        if self.accept("desc"):
            return False
        raise self.unexpected("'asc' or 'desc'")

    def parse_type(self) -> ValueType:
        token = self.current
        if token.kind == "ident":
            simple = {"int": INT, "float": FLOAT, "bool": BOOL, "string": STR}
            if token.text in simple:
                self.advance()
                return simple[token.text]
            if token.text == "list":
                self.advance()
                self.expect("<")
                elem = self.parse_type()
                self.expect(">")
                return list_of(elem)
        if self.accept("("):
            key = self.parse_type()
            self.expect(",")
            value = self.parse_type()
            self.expect(")")
            return pair_of(key, value)
        raise self.unexpected("a type")

    # -- lambdas and expressions -----------------------------------------

    def parse_lambda(self) -> Lambda:
        start = self.current
        if self.accept("("):
            params = [self.expect_ident("parameter name").text]
            while self.accept(","):
                params.append(self.expect_ident("parameter name").text)
            self.expect(")")
        else:
            params = [self.expect_ident("lambda parameter").text]
        self.expect("->")
        body = self.parse_expr()
        return Lambda(tuple(params), body, span=start.span)

    def parse_expr(self):
        if self.at("if"):
            token = self.advance()
            cond = self.parse_expr()
            self.expect("then")
            then_branch = self.parse_expr()
            self.expect("else")
            else_branch = self.parse_expr()
            return IfExpr(cond, then_branch, else_branch, span=token.span)
        return self.parse_binary(0)

    _LEVELS: Tuple[Tuple[str, ...], ...] = (
        ("||",),
        ("&&",),
        ("==", "!="),
        ("<", "<=", ">", ">="),
        ("+", "-"),
        ("*", "/", "%"),
    )

    def parse_binary(self, level: int):
        if level == len(self._LEVELS):
            return self.parse_unary()
        left = self.parse_binary(level + 1)
        while self.current.kind == "op" and self.current.text in self._LEVELS[level]:
            op = self.advance()
            right = self.parse_binary(level + 1)
            left = BinaryOp(op.text, left, right, span=op.span)
        return left

    def parse_unary(self):
        if self.at("-") or self.at("!"):
            op = self.advance()
            nxt = self.current
            if op.text == "-" and nxt.kind in ("int", "float") and not self._followed_by_postfix():
                self.advance()
                span = SourceSpan(op.span.file, op.span.line, op.span.column,
                                  nxt.span.column + nxt.span.length - op.span.column)
                return Literal(-nxt.value, span=span)
            return UnaryOp(op.text, self.parse_unary(), span=op.span)
        return self.parse_postfix()

    def _followed_by_postfix(self) -> bool:
        return self.peek().kind == "op" and self.peek().text == "."

    def parse_postfix(self):
        node = self.parse_primary()
        while self.at("."):
            self.advance()
            field_token = self.expect_ident("'key' or 'value'")
            if field_token.text not in ("key", "value"):
                raise _error(DiagnosticCode.SYNTAX, f"unknown projection '.{field_token.text}'",
                             field_token.span)
            node = Project(node, field_token.text, span=field_token.span)
        return node

    def parse_primary(self):
        token = self.current
        if token.kind in ("int", "float", "string"):
            self.advance()
            return Literal(token.value, span=token.span)
        if token.kind == "keyword" and token.text in ("true", "false"):
            self.advance()
            return Literal(token.text == "true", span=token.span)
        if token.kind == "ident":
            self.advance()
            if token.text == "emptyList" and self.at("<"):
                self.advance()
                type_arg = self.parse_type()
                self.expect(">")
                self.expect("(")
                self.expect(")")
                return Call("emptyList", (), type_arg=type_arg, span=token.span)
            if self.accept("("):
                args = []
                if not self.at(")"):
                    args.append(self.parse_expr())
                    while self.accept(","):
                        args.append(self.parse_expr())
                self.expect(")")
                return Call(token.text, tuple(args), span=token.span)
            return Param(token.text, span=token.span)
        if self.accept("("):
            first = self.parse_expr()
            if self.accept(","):
                second = self.parse_expr()
                self.expect(")")
                return MakePair(first, second, span=token.span)
            self.expect(")")
            return first
        raise self.unexpected("an expression")


def _kind_of(method: Token) -> Optional[TransformationKind]:
    try:
        return TransformationKind(method.text)
    except ValueError:
        return None


# ---------------------------------------------------------------------------
# Resolution: names, types, site numbering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParsedSource:
    programs: Tuple[ProgramGraph, ...]
    diagnostics: Tuple[ParseDiagnostic, ...]

    @property
    def ok(self) -> bool:
        return not any(d.severity is Severity.ERROR for d in self.diagnostics)

    @property
    def errors(self) -> List[ParseDiagnostic]:
        return [d for d in self.diagnostics if d.severity is Severity.ERROR]

    @property
    def warnings(self) -> List[ParseDiagnostic]:
        return [d for d in self.diagnostics if d.severity is Severity.WARNING]


def _resolve(syntax: _ProgramSyntax, warnings: List[ParseDiagnostic]) -> ProgramGraph:
    inputs = [s for s in syntax.statements if isinstance(s, _InputDecl)]
    # inputs take the first dataset ids so formatting can list them first
    input_ids = {decl.name.text: i for i, decl in enumerate(inputs)}
    next_id = len(inputs)

    datasets: Dict[str, Dataset] = {}
    definitions: Dict[str, SourceSpan] = {}
    transformations: List[Transformation] = []
    outputs: List[ProgramOutput] = []
    output_spans: Dict[str, SourceSpan] = {}

    def define(name_token: Token, elem_type: ValueType, dataset_id: int):
        if name_token.text in datasets:
            raise _error(DiagnosticCode.TYPE, f"dataset '{name_token.text}' is already defined",
                         name_token.span)
        datasets[name_token.text] = Dataset(dataset_id, name_token.text, elem_type)
        definitions[name_token.text] = name_token.span

    def lookup(name_token: Token) -> Dataset:
        if name_token.text not in datasets:
            raise _error(DiagnosticCode.UNKNOWN_ID, f"unknown dataset '{name_token.text}'", name_token.span)
        return datasets[name_token.text]

    for statement in syntax.statements:
        if isinstance(statement, _InputDecl):
            define(statement.name, statement.elem_type, input_ids[statement.name.text])
        elif isinstance(statement, _OutputDecl):
            for name_token in statement.names:
                dataset = lookup(name_token)
                if name_token.text in output_spans:
                    raise _error(DiagnosticCode.SYNTAX, f"dataset '{name_token.text}' is already an output",
                                 name_token.span)
                outputs.append(ProgramOutput(name_token.text, dataset.id))
                output_spans[name_token.text] = name_token.span
        else:
            site = len(transformations)
            transformation, elem_type = _resolve_step(statement, site, lookup, next_id)
            define(statement.target, elem_type, next_id)
            next_id += 1
            transformations.append(transformation)

    if not outputs:
        raise _error(DiagnosticCode.SYNTAX, f"program '{syntax.name.text}' declares no output", syntax.name.span)

    consumed = {i for t in transformations for i in t.inputs} | {o.dataset for o in outputs}
    for name, dataset in datasets.items():
        if dataset.id not in consumed:
            warnings.append(ParseDiagnostic(
                Severity.WARNING, DiagnosticCode.UNUSED_DATASET,
                f"dataset '{name}' is never used", definitions[name]))

    graph = ProgramGraph(
        name=syntax.name.text,
        inputs=tuple(range(len(inputs))),
        datasets=tuple(sorted(datasets.values(), key=lambda d: d.id)),
        transformations=tuple(transformations),
        outputs=tuple(outputs),
    )
    result = validate(graph)
    if not result.ok:
        raise _error(DiagnosticCode.TYPE, result.diagnostics[0].message, syntax.name.span)
    return graph


def _resolve_step(step: _Step, site: int, lookup, output_id: int) -> Tuple[Transformation, ValueType]:
    kind = TransformationKind(step.method.text)
    source = lookup(step.source)
    input_ids = [source.id]
    input_types = [source.elem_type]
    if step.other is not None:
        other = lookup(step.other)
        input_ids.append(other.id)
        input_types.append(other.elem_type)

    udfs: Tuple[Lambda, ...] = ()
    if step.lam is not None:
        elem = source.elem_type
        if kind is TransformationKind.REDUCE_BY_KEY:
            if not elem.is_pair:
                raise _error(DiagnosticCode.TYPE, f"ReduceByKey requires Pair element type at site {site}",
                             step.span)
            params = (elem.value, elem.value)
        else:
            params = (elem,)
        try:
            udfs = (typecheck_lambda(step.lam, params),)
        except UnknownNameError as exc:
            raise _error(DiagnosticCode.UNKNOWN_ID, exc.message, exc.span or step.span)
        except ExprTypeError as exc:
            raise _error(DiagnosticCode.TYPE, exc.message, exc.span or step.span)

    elem_type, problems = infer_output_type(kind, input_types, udfs, site)
    if problems:
        raise _error(DiagnosticCode.TYPE, problems[0].message, step.span)
    transformation = Transformation(
        id=site,
        kind=kind,
        inputs=tuple(input_ids),
        output=output_id,
        udfs=udfs,
        ascending=step.ascending,
        span=step.span,
    )
    return transformation, elem_type


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

def parse_source(source: str, file: str = "<string>") -> ParsedSource:
    """Parse a file holding one or more program blocks"""
    warnings: List[ParseDiagnostic] = []
    try:
        tokens = Lexer(source, file).tokens()
        syntaxes = Parser(tokens).parse_file()
        seen = set()
        programs = []
        for syntax in syntaxes:
            if syntax.name.text in seen:
                raise _error(DiagnosticCode.SYNTAX, f"program '{syntax.name.text}' is defined twice",
                             syntax.name.span)
            seen.add(syntax.name.text)
            programs.append(_resolve(syntax, warnings))
    except _Abort as abort:
        logger.debug(f"Parse of {file} failed: {abort.diagnostic}")
        return ParsedSource((), tuple(warnings) + (abort.diagnostic,))
    for warning in warnings:
        logger.warning(str(warning))
    return ParsedSource(tuple(programs), tuple(warnings))


def parse_program(source: str, file: str = "<string>") -> ProgramGraph:
    """Parse a single program; raises DslError carrying the diagnostics on failure"""
    parsed = parse_source(source, file)
    if not parsed.ok:
        raise DslError(parsed.errors)
    if len(parsed.programs) != 1:
        raise DslError([ParseDiagnostic(
            Severity.ERROR, DiagnosticCode.SYNTAX,
            f"expected a single program, found {len(parsed.programs)}", SourceSpan(file, 1, 1, 1))])
    return parsed.programs[0]


def parse_file(path: Path) -> ParsedSource:
    path = Path(path)
    return parse_source(path.read_text(encoding="utf-8"), str(path))


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------

def format_udf(udf) -> str:
    if isinstance(udf, Lambda):
        return format_lambda(udf)
    return udf.render()


def format_step(graph: ProgramGraph, t: Transformation) -> str:
    """One pipeline statement, e.g. `counts = pairs.reduceByKey((a, b) -> a + b)`"""
    target = graph.dataset(t.output).name
    source = graph.dataset(t.inputs[0]).name
    args: List[str] = []
    if t.kind.is_binary:
        args.append(graph.dataset(t.inputs[1]).name)
    args.extend(format_udf(u) for u in t.udfs)
    if t.kind.is_sort:
        args.append("asc" if t.ascending else "desc")
    return f"{target} = {source}.{t.kind.value}({', '.join(args)})"


def format_program(graph: ProgramGraph) -> str:
    """Canonical source text; parsing it yields a structurally equal graph"""
    lines = [f"program {graph.name}"]
    for ds in graph.input_datasets:
        lines.append(f"input {ds.name}: list<{format_type(ds.elem_type)}>")
    for t in graph.transformations:
        lines.append(format_step(graph, t))
    lines.append("output " + ", ".join(graph.output_names))
    return "\n".join(lines) + "\n"


def format_programs(graphs: Sequence[ProgramGraph]) -> str:
    return "\n".join(format_program(g) for g in graphs)
