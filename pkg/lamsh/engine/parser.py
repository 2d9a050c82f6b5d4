"""Left-associative parser: every adjacent pair of terms is an application.

The parser knows nothing about operators. Parenthesized groups parse
recursively and are marked so the rewrite pass treats them as one operand.
"""
from typing import List, NamedTuple, Optional, Sequence, Tuple
import logging

from lamsh.core.errors import ParseError
from lamsh.engine.lexer import OPEN_PARENS
from lamsh.models.attributes import DEFAULT_ATTRIBUTES, BoundAttributes
from lamsh.models.expression import FLOAT, INT, STR, Constant, Expression, Variable, fold_apply
from lamsh.schemas.statement import Binding, Evaluation, Statement
from lamsh.schemas.token import Token, TokenKind

logger = logging.getLogger(__name__)

INT_MIN = -(2 ** 63)
INT_MAX = 2 ** 63 - 1
MAX_NESTING = 100


class Parser:
    def __init__(self, tokens: Sequence[Token], annotated: bool):
        self.tokens = list(tokens)
        self.pos = 0
        self.annotated = annotated
        self.nesting = 0

    def parse(self) -> Expression:
        if not self.tokens:
            raise ParseError("empty expression")
        expr = self.parse_sequence(None)
        if self.pos < len(self.tokens):
            token = self.tokens[self.pos]
            raise ParseError(f"unmatched {token.text!r}", span=token.span)
        if expr is None:
            raise ParseError("empty expression")
        return expr

    def parse_sequence(self, opener: Optional[Token]) -> Optional[Expression]:
        terms: List[Expression] = []
        while self.pos < len(self.tokens):
            token = self.tokens[self.pos]
            if token.kind == TokenKind.CLOSE_PAREN:
                if opener is None:
                    raise ParseError(f"unmatched {token.text!r}", span=token.span)
                if OPEN_PARENS[opener.text] != token.text:
                    raise ParseError(
                        f"{opener.text!r} closed by {token.text!r}",
                        span=token.span,
                        hint=f"expected {OPEN_PARENS[opener.text]!r}",
                    )
                break
            if self.annotated and token.is_symbol(":"):
                self.pos += 1
                if not terms:
                    raise ParseError("annotation has no left-hand term", span=token.span)
                annotation = self.parse_sequence(opener)
                if annotation is None:
                    raise ParseError("annotation has no type expression", span=token.span)
                return fold_apply(terms).with_annotation(annotation)
            terms.append(self.parse_term())
        if not terms:
            return None
        return fold_apply(terms)

    def parse_term(self) -> Expression:
        token = self.tokens[self.pos]
        self.pos += 1
        if token.kind in (TokenKind.IDENTITY, TokenKind.SYMBOL):
            return Variable(name=token.text).located(token.span)
        if token.kind == TokenKind.STRING:
            return Constant(value=token.text, annotation=STR).located(token.span)
        if token.kind == TokenKind.NUMERIC:
            return self.numeric(token)
        # open paren
        if self.nesting >= MAX_NESTING:
            raise ParseError(
                f"parentheses nested deeper than {MAX_NESTING}",
                span=token.span,
                hint="bind inner parts to names first",
            )
        self.nesting += 1
        inner = self.parse_sequence(token)
        self.nesting -= 1
        if self.pos >= len(self.tokens):
            raise ParseError(f"unclosed {token.text!r}", span=token.span)
        closer = self.tokens[self.pos]
        self.pos += 1
        if inner is None:
            raise ParseError("empty parentheses", span=(token.span[0], closer.span[1]))
        return inner.grouped()

    def numeric(self, token: Token) -> Expression:
        if "." in token.text:
            return Constant(value=float(token.text), annotation=FLOAT).located(token.span)
        value = int(token.text)
        if not INT_MIN <= value <= INT_MAX:
            raise ParseError("integer literal out of 64-bit range", span=token.span)
        return Constant(value=value, annotation=INT).located(token.span)


def parse(tokens: Sequence[Token]) -> Expression:
    """Fold tokens into a left-leaning application tree."""
    return Parser(tokens, annotated=False).parse()


def parse_annotated(tokens: Sequence[Token]) -> Expression:
    """Like ``parse`` but ``term : type`` fills the annotation slot of term."""
    return Parser(tokens, annotated=True).parse()


def paren_depth(tokens: Sequence[Token]) -> int:
    """Open parens not yet closed; positive means the input continues."""
    depth = 0
    for token in tokens:
        if token.kind == TokenKind.OPEN_PAREN:
            depth += 1
        elif token.kind == TokenKind.CLOSE_PAREN:
            depth -= 1
    return depth


class BindingHead(NamedTuple):
    name: str
    attributes: BoundAttributes
    annotation: Optional[Expression]
    span: Tuple[int, int]


def _top_level_equals(tokens: Sequence[Token]) -> Optional[int]:
    depth = 0
    for index, token in enumerate(tokens):
        if token.kind == TokenKind.OPEN_PAREN:
            depth += 1
        elif token.kind == TokenKind.CLOSE_PAREN:
            depth -= 1
        elif depth == 0 and token.is_symbol("="):
            return index
    return None


def _binding_head(head: Sequence[Token]) -> Optional[BindingHead]:
    """Recognize the left side of a binding, or None when it is not one."""
    if not head:
        return None
    first = head[0]
    if first.kind == TokenKind.IDENTITY:
        if len(head) == 1:
            return BindingHead(first.text, DEFAULT_ATTRIBUTES, None, first.span)
        if head[1].is_symbol(":"):
            if len(head) == 2:
                raise ParseError("annotation has no type expression", span=head[1].span)
            return BindingHead(first.text, DEFAULT_ATTRIBUTES, parse_annotated(head[2:]), first.span)
        return None
    if first.kind != TokenKind.OPEN_PAREN or head[-1].kind != TokenKind.CLOSE_PAREN or len(head) < 3:
        return None
    inner = head[1:-1]
    name = inner[0]
    if name.kind not in (TokenKind.IDENTITY, TokenKind.SYMBOL):
        return None
    attributes = DEFAULT_ATTRIBUTES
    if len(inner) > 1:
        if not inner[1].is_symbol("@"):
            return None
        words = [t for t in inner[2:] if not t.is_symbol(",")]
        if not words or any(t.kind != TokenKind.IDENTITY for t in words):
            raise ParseError("expected attributes after '@'", span=inner[1].span)
        try:
            attributes = BoundAttributes.parse(t.text for t in words)
        except ValueError as e:
            raise ParseError(str(e), span=(words[0].span[0], words[-1].span[1])) from e
    return BindingHead(name.text, attributes, None, name.span)


def parse_statement(tokens: Sequence[Token]) -> Statement:
    """Parse one line, recognizing the binding forms before general parsing."""
    index = _top_level_equals(tokens)
    if index is not None:
        head = _binding_head(tokens[:index])
        if head is not None:
            body_tokens = tokens[index + 1:]
            if not body_tokens:
                raise ParseError(f"binding of {head.name!r} has no body", span=tokens[index].span)
            # DEBUG: Log binding form (parser.py:parse_statement)
            logger.debug(f"[PARSER] binding {head.name} @ {head.attributes}")
            return Binding(
                name=head.name,
                attributes=head.attributes,
                annotation=head.annotation,
                body=parse_annotated(body_tokens),
                name_span=head.span,
            )
    return Evaluation(expression=parse_annotated(tokens))
