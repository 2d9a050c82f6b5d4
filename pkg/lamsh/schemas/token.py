from enum import Enum
from typing import Tuple

from pydantic import BaseModel, ConfigDict


class TokenKind(str, Enum):
    """Lexical categories produced by the lexer."""
    IDENTITY = "Identity"
    STRING = "StringLit"
    NUMERIC = "Numeric"
    OPEN_PAREN = "OpenParen"
    CLOSE_PAREN = "CloseParen"
    SYMBOL = "Symbol"


class Token(BaseModel):
    """A lexical unit with its character span in the source line.

    For string literals ``text`` is the decoded content while ``span``
    covers the surrounding quotes.
    """
    model_config = ConfigDict(frozen=True)

    kind: TokenKind
    text: str
    span: Tuple[int, int]

    def is_symbol(self, text: str) -> bool:
        return self.kind == TokenKind.SYMBOL and self.text == text

    def __str__(self) -> str:
        if self.kind in (TokenKind.OPEN_PAREN, TokenKind.CLOSE_PAREN):
            return self.kind.value
        return f"{self.kind.value}({self.text})"
