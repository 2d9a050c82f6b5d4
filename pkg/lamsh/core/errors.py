"""Error hierarchy shared by every stage of the engine.

Each error knows the stage it came from and, when available, the character
span of the offending source text so the shell can underline it.
"""
from typing import Optional, Tuple

Span = Tuple[int, int]


class EngineError(Exception):
    """Base class for all diagnostics reported to the user."""

    stage = "engine"

    def __init__(
        self,
        message: str,
        span: Optional[Span] = None,
        hint: Optional[str] = None,
    ):
        super().__init__(message)
        self.message = message
        self.span = span
        self.hint = hint

    def with_span(self, span: Optional[Span]) -> "EngineError":
        """Attach a span if none is set yet."""
        if self.span is None and span is not None:
            self.span = span
        return self

    def __str__(self) -> str:
        return self.message


class LexError(EngineError):
    stage = "lex"


class ParseError(EngineError):
    stage = "parse"


class RewriteError(EngineError):
    stage = "rewrite"


class UnifyError(EngineError):
    """Two types could not be made equal."""

    stage = "type"

    MISMATCH = "mismatch"
    OCCURS = "occurs"
    KIND = "kind"

    def __init__(
        self,
        message: str,
        reason: str = MISMATCH,
        span: Optional[Span] = None,
        hint: Optional[str] = None,
    ):
        super().__init__(message, span, hint)
        self.reason = reason


class InferError(EngineError):
    stage = "type"

    UNBOUND = "unbound"
    AMBIGUOUS = "ambiguous"
    ANNOTATION = "annotation"
    SYNTAX = "syntax"
    NO_MATCH = "no-match"

    def __init__(
        self,
        message: str,
        reason: str = UNBOUND,
        span: Optional[Span] = None,
        hint: Optional[str] = None,
    ):
        super().__init__(message, span, hint)
        self.reason = reason


class EvalError(EngineError):
    stage = "eval"

    HOST = "host"
    DEPTH = "depth"
    STUCK = "stuck"

    def __init__(
        self,
        message: str,
        reason: str = HOST,
        span: Optional[Span] = None,
        hint: Optional[str] = None,
    ):
        super().__init__(message, span, hint)
        self.reason = reason


class SignatureError(EngineError):
    stage = "prelude"


class NoConversion(EngineError):
    stage = "eval"


class StreamConsumedError(EngineError):
    stage = "eval"


class SpawnError(EngineError):
    """A pipeline stage could not be started."""

    stage = "proc"

    def __init__(self, message: str, stage_index: int, span: Optional[Span] = None):
        super().__init__(message, span)
        self.stage_index = stage_index
