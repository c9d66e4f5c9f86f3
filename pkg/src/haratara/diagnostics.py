"""Diagnostics shared by the parser, validator, linter and CLI."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Optional

CODE_PATTERN = re.compile(r"^[A-Z]-[A-Z0-9]+(?:-[A-Z0-9]+)*$")


class Severity(str, enum.Enum):
    ERROR = "error"
    WARNING = "warning"
    NOTE = "note"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SourceSpan:
    """1-based line/column position plus a token length."""

    line: int
    column: int
    length: int = 0

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1 or self.length < 0:
            raise ValueError(f"invalid span {self.line}:{self.column}+{self.length}")

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    span: Optional[SourceSpan] = None

    def __post_init__(self) -> None:
        if not CODE_PATTERN.match(self.code):
            raise ValueError(f"malformed diagnostic code {self.code!r}")

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def format(self) -> str:
        """One-line form used by the CLI: ``severity code line:col message``."""
        where = str(self.span) if self.span is not None else "-:-"
        return f"{self.severity} {self.code} {where} {self.message}"


def error(code: str, message: str, span: Optional[SourceSpan] = None) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, span)


def warning(code: str, message: str, span: Optional[SourceSpan] = None) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, span)


def note(code: str, message: str, span: Optional[SourceSpan] = None) -> Diagnostic:
    return Diagnostic(Severity.NOTE, code, message, span)


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)


class DiagnosticError(Exception):
    """Raised when an operation cannot produce a result; carries the findings."""

    def __init__(self, diagnostics: Iterable[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.format() for d in self.diagnostics))
