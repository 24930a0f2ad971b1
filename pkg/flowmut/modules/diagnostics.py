"""Source spans and parse diagnostics shared by the DSL frontend and the model."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int  # 1-based
    column: int  # 1-based
    length: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


class DiagnosticCode(str, Enum):
    LEXICAL = "E-LEX"
    SYNTAX = "E-SYNTAX"
    TYPE = "E-TYPE"
    UNKNOWN_ID = "E-UNKNOWN-ID"
    UNUSED_DATASET = "W-UNUSED"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: Severity
    code: DiagnosticCode
    message: str
    span: SourceSpan

    def __str__(self) -> str:
        return f"{self.span}: {self.severity.value} [{self.code.value}] {self.message}"
