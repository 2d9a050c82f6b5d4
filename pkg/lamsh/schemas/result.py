from typing import Optional, Tuple

from pydantic import BaseModel

from lamsh.core.errors import EngineError


class Diagnostic(BaseModel):
    """An error reported for one input line."""
    stage: str
    message: str
    source: str = ""
    span: Optional[Tuple[int, int]] = None
    hint: Optional[str] = None
    line_number: Optional[int] = None

    @classmethod
    def from_error(cls, error: EngineError, source: str, line_number: Optional[int] = None) -> "Diagnostic":
        return cls(
            stage=error.stage,
            message=error.message,
            source=source,
            span=error.span,
            hint=error.hint,
            line_number=line_number,
        )


class RenderedResult(BaseModel):
    """Printable outcome of a line that evaluated successfully."""
    text: str = ""
    type_text: Optional[str] = None
    name: Optional[str] = None
