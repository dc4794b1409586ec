"""Frontend diagnostics, formatted `file:line:col: message`."""

from __future__ import annotations

from typing import Optional


class IdlError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0,
                 source: Optional[str] = None) -> None:
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col
        self.source = source

    def __str__(self) -> str:
        src = self.source or "<idl>"
        if self.line:
            return f"{src}:{self.line}:{self.col}: {self.message}"
        return f"{src}: {self.message}"


class LexError(IdlError):
    pass


class ParseError(IdlError):
    def __init__(self, message: str, line: int = 0, col: int = 0,
                 source: Optional[str] = None,
                 expected: Optional[set[str]] = None) -> None:
        super().__init__(message, line, col, source)
        self.expected = expected or set()


class DuplicateName(ParseError):
    pass


class ResolveError(IdlError):
    pass


class UnresolvedType(ResolveError):
    pass


class BadAttrTarget(ResolveError):
    pass


class InheritanceCycle(ResolveError):
    pass
