"""Turning values and diagnostics into text."""
from typing import Any, List, Optional

from lamsh.engine.typesys import ResolutionMode
from lamsh.models.expression import (
    Apply,
    ArrowType,
    CommandTerm,
    Constant,
    Expression,
    HostFunctionTerm,
    KindStar,
    Lambda,
    TypeConstructorTerm,
    TypeTerm,
    format_literal,
    format_type,
    pretty_type,
    quote,
)
from lamsh.models.values import (
    ByteStreamValue,
    LineSeqValue,
    ListValue,
    PairValue,
    TextReaderValue,
    TextWriterValue,
)
from lamsh.schemas.result import Diagnostic, RenderedResult
from lamsh.streaming.pump import text_of

FUNCTION = "<fun>"
STREAMING = (ByteStreamValue, TextReaderValue, TextWriterValue, LineSeqValue)


def is_streaming(value: Expression) -> bool:
    return isinstance(value, Constant) and isinstance(value.value, STREAMING)


def format_item(item: Any, nested: bool = True) -> str:
    """One element of a list or line sequence."""
    if isinstance(item, ListValue):
        return "[" + ", ".join(format_item(i) for i in item.items) + "]"
    if isinstance(item, PairValue):
        return f"({format_item(item.first)}, {format_item(item.second)})"
    if isinstance(item, str):
        return quote(item) if nested else item
    if isinstance(item, Expression):
        return render_value(item, ResolutionMode.REPL)
    return format_literal(item)


def stream_text(value: Any) -> str:
    """Consume a stream-like value; runs pipelines behind it."""
    if isinstance(value, LineSeqValue):
        return "".join(f"{format_item(item, nested=False)}\n" for item in value)
    return text_of(value)


def render_value(value: Expression, mode: ResolutionMode) -> str:
    """Short form of a value; stream-like values are summarized, not run."""
    if isinstance(value, (Lambda, HostFunctionTerm, CommandTerm)):
        return FUNCTION
    if isinstance(value, (TypeTerm, TypeConstructorTerm, ArrowType, KindStar)):
        return format_type(value)
    if isinstance(value, Apply):
        return format_type(value)
    if isinstance(value, Constant):
        inner = value.value
        if isinstance(inner, str) and mode == ResolutionMode.SCRIPT:
            return inner
        if isinstance(inner, (ListValue, PairValue)):
            return format_item(inner)
        return format_literal(inner, value.annotation)
    return str(value)


def render_evaluation(value: Expression, mode: ResolutionMode) -> RenderedResult:
    type_text = pretty_type(value.annotation)
    if is_streaming(value):
        text = stream_text(value.value)
        if mode == ResolutionMode.REPL:
            if text and not text.endswith("\n"):
                text += "\n"
            text += f": {type_text}\n"
        return RenderedResult(text=text, type_text=type_text)
    text = render_value(value, mode)
    if mode == ResolutionMode.REPL:
        text = f"{text} : {type_text}"
    return RenderedResult(text=text + "\n", type_text=type_text)


def render_binding(name: str, value: Expression, mode: ResolutionMode) -> RenderedResult:
    type_text = pretty_type(value.annotation)
    if mode == ResolutionMode.SCRIPT:
        return RenderedResult(type_text=type_text, name=name)
    text = f"{name} : {type_text} = {render_value(value, mode)}\n"
    return RenderedResult(text=text, type_text=type_text, name=name)


def render_diagnostic(diagnostic: Diagnostic, origin: Optional[str] = None) -> str:
    """``error[stage]: message``, the source line with the span underlined, and a hint."""
    where = ""
    if diagnostic.line_number is not None:
        where = f" ({origin}:{diagnostic.line_number})" if origin else f" (line {diagnostic.line_number})"
    lines: List[str] = [f"error[{diagnostic.stage}]: {diagnostic.message}{where}"]
    if diagnostic.source:
        lines.append(f"  {diagnostic.source}")
        if diagnostic.span is not None:
            start, end = diagnostic.span
            start = max(0, min(start, len(diagnostic.source)))
            width = max(1, end - start)
            lines.append("  " + " " * start + "^" * width)
    if diagnostic.hint:
        lines.append(f"hint: {diagnostic.hint}")
    return "\n".join(lines) + "\n"
