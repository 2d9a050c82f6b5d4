"""Hand-written scanner for the shell's minimal lexical grammar."""
from typing import List
import logging
import unicodedata

from lamsh.core.errors import LexError
from lamsh.schemas.token import Token, TokenKind

logger = logging.getLogger(__name__)

OPEN_PARENS = {"(": ")", "[": "]", "{": "}", "⟨": "⟩"}
CLOSE_PARENS = frozenset(OPEN_PARENS.values())
DIGITS = frozenset("0123456789")
ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


def is_paren(char: str) -> bool:
    return char in OPEN_PARENS or char in CLOSE_PARENS


def is_symbol_char(char: str) -> bool:
    """Punctuation and symbol characters, minus parens and the quote."""
    if char == '"' or is_paren(char):
        return False
    return unicodedata.category(char)[0] in ("P", "S")


class Lexer:
    """Scans one logical line into tokens."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: List[Token] = []

    def peek(self, offset: int = 0) -> str:
        index = self.pos + offset
        if index >= len(self.text):
            return ""
        return self.text[index]

    def emit(self, kind: TokenKind, text: str, start: int) -> None:
        self.tokens.append(Token(kind=kind, text=text, span=(start, self.pos)))

    def run(self) -> List[Token]:
        while self.pos < len(self.text):
            char = self.peek()
            start = self.pos
            if char.isspace():
                self.pos += 1
            elif char == '"':
                self.read_string()
            elif char in OPEN_PARENS:
                self.pos += 1
                self.emit(TokenKind.OPEN_PAREN, char, start)
            elif char in CLOSE_PARENS:
                self.pos += 1
                self.emit(TokenKind.CLOSE_PAREN, char, start)
            elif char in DIGITS or (char in "+-" and self.starts_signed_number()):
                self.read_number()
            elif unicodedata.category(char).startswith("L"):
                self.read_identity()
            elif is_symbol_char(char):
                self.read_symbol()
            else:
                raise LexError(
                    f"unexpected character {char!r}",
                    span=(start, start + 1),
                )
        return self.tokens

    def starts_signed_number(self) -> bool:
        if self.peek(1) not in DIGITS:
            return False
        if self.pos == 0:
            return True
        before = self.text[self.pos - 1]
        return before.isspace() or before in OPEN_PARENS

    def read_string(self) -> None:
        start = self.pos
        self.pos += 1
        chars: List[str] = []
        while True:
            char = self.peek()
            if not char:
                raise LexError(
                    "unterminated string literal",
                    span=(start, start + 1),
                    hint='close the string with a matching "',
                )
            self.pos += 1
            if char == '"':
                break
            if char == "\\" and self.peek():
                escaped = self.peek()
                self.pos += 1
                # Unknown escapes are kept verbatim.
                chars.append(ESCAPES.get(escaped, "\\" + escaped))
            else:
                chars.append(char)
        self.emit(TokenKind.STRING, "".join(chars), start)

    def read_number(self) -> None:
        start = self.pos
        if self.peek() in "+-":
            self.pos += 1
        while self.peek() in DIGITS:
            self.pos += 1
        if self.peek() == "." and self.peek(1) in DIGITS:
            self.pos += 1
            while self.peek() in DIGITS:
                self.pos += 1
            if self.peek() == "." and self.peek(1) in DIGITS:
                raise LexError(
                    "numeric literal has more than one decimal point",
                    span=(start, self.pos + 1),
                )
        self.emit(TokenKind.NUMERIC, self.text[start:self.pos], start)

    def read_identity(self) -> None:
        start = self.pos
        self.pos += 1
        while True:
            char = self.peek()
            if char and (char.isalnum() or char == "_"):
                self.pos += 1
            elif char == "." and self.peek(1).isalpha():
                # dotted names stay one token
                self.pos += 1
            else:
                break
        self.emit(TokenKind.IDENTITY, self.text[start:self.pos], start)

    def read_symbol(self) -> None:
        start = self.pos
        while self.peek() and is_symbol_char(self.peek()):
            self.pos += 1
        self.emit(TokenKind.SYMBOL, self.text[start:self.pos], start)


def tokenize(line: str) -> List[Token]:
    """Split ``line`` into tokens, raising LexError on malformed input."""
    tokens = Lexer(line).run()
    # DEBUG: Log token stream (lexer.py:tokenize)
    logger.debug(f"[LEXER] {len(tokens)} tokens: {' '.join(str(t) for t in tokens)}")
    return tokens
