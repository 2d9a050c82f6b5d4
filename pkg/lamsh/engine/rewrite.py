"""Operator rewriting driven by bound attributes.

Runs as a pass between parsing and inference. Infix operators are moved into
prefix position (left-associative ones fold left to right, right-associative
ones nest to the right). Every operator a rewrite places is marked so a
second pass leaves it alone.
"""
from typing import Callable, List, Optional, Set
import logging

from lamsh.core.errors import RewriteError
from lamsh.models.attributes import BoundAttributes
from lamsh.models.expression import (
    Apply,
    Expression,
    Lambda,
    Variable,
    flatten_apply,
    fold_apply,
)
from lamsh.repositories.environment import TypeEnvironment

logger = logging.getLogger(__name__)

IsKnown = Callable[[str], bool]

ARROW = "->"


class Rewriter:
    def __init__(
        self,
        env: TypeEnvironment,
        is_known: Optional[IsKnown] = None,
        *,
        left_to_right: bool = True,
        right_to_left: bool = True,
        type_level: bool = False,
    ):
        self.env = env
        self.left_to_right = left_to_right
        self.right_to_left = right_to_left
        self.type_level = type_level
        self.parameters: Set[str] = set()
        self._is_known = is_known or (lambda name: env.lookup(name) is not None)

    def is_known(self, name: str) -> bool:
        return self.type_level or name in self.parameters or self._is_known(name)

    def operator(self, term: Expression) -> Optional[BoundAttributes]:
        """Attributes of ``term`` when it is an infix use still to be moved."""
        if not isinstance(term, Variable) or term.is_placed or term.is_group:
            return None
        if term.annotation is not None:
            return None
        attributes = self.env.attributes(term.name)
        if attributes is None or not attributes.is_infix:
            return None
        if attributes.is_right_associative:
            return attributes if self.right_to_left else None
        return attributes if self.left_to_right else None

    def annotation_rewriter(self) -> "Rewriter":
        return Rewriter(self.env, left_to_right=False, right_to_left=True, type_level=True)

    def rewrite(self, expr: Expression) -> Expression:
        annotation = expr.annotation
        if annotation is not None:
            annotation = self.annotation_rewriter().rewrite(annotation)
        if isinstance(expr, Apply):
            result = self.rewrite_apply(expr)
        elif isinstance(expr, Lambda):
            result = expr.replace_children((self.rewrite(expr.body),))
        else:
            result = expr
        if annotation is not expr.annotation:
            result = result.with_annotation(annotation)
        if expr.is_group and not result.is_group:
            result = result.grouped()
        return result

    def rewrite_apply(self, expr: Apply) -> Expression:
        head, arguments = flatten_apply(expr, stop_at_groups=True)
        originals = [head, *arguments]
        terms = [self.rewrite(term) for term in originals]
        rewritten = self.rewrite_spine(terms)
        if rewritten is None:
            if all(new is old for new, old in zip(terms, originals)):
                return expr
            rewritten = fold_apply(terms)
        return rewritten.with_annotation(expr.annotation)

    def rewrite_spine(self, terms: List[Expression]) -> Optional[Expression]:
        ops = [(i, attrs) for i, term in enumerate(terms) if i > 0 and (attrs := self.operator(term))]
        if not ops:
            return None
        directions = {attrs.is_right_associative for _, attrs in ops}
        if len(directions) > 1:
            second = next(i for i, attrs in ops if attrs.is_right_associative != ops[0][1].is_right_associative)
            raise RewriteError(
                f"cannot mix left- and right-associative operators ({terms[ops[0][0]].name!r} and {terms[second].name!r})",
                span=terms[second].span,
                hint="add parentheses to group one side",
            )
        if ops[0][1].is_right_associative:
            return self.rotate_spine(terms)
        return self.prefix_spine(terms, [i for i, _ in ops])

    def groupable(self, left: List[Expression]) -> bool:
        """Whether the whole left run is a single operand."""
        if len(left) == 1:
            return True
        head = left[0]
        if isinstance(head, Apply) or head.is_group or head.is_placed:
            return True
        return isinstance(head, Variable) and self.is_known(head.name)

    def prefix_spine(self, terms: List[Expression], positions: List[int]) -> Expression:
        acc = terms[:positions[0]]
        for n, index in enumerate(positions):
            op = terms[index]
            end = positions[n + 1] if n + 1 < len(positions) else len(terms)
            right = terms[index + 1:end]
            if not right and n + 1 < len(positions):
                following = terms[positions[n + 1]]
                raise RewriteError(
                    f"operator {following.name!r} has no left operand",
                    span=following.span,
                )
            placed = op.placed()
            if self.groupable(acc):
                node: Expression = Apply(function=placed, argument=fold_apply(acc))
                if right:
                    node = Apply(function=node, argument=fold_apply(right))
                acc = [node]
            else:
                acc = [*acc[:-1], placed, acc[-1], *right]
            # DEBUG: Log operator placement (rewrite.py:prefix_spine)
            logger.debug(f"[REWRITE] placed {op.name!r} in prefix position")
        return fold_apply(acc)

    def rotate_spine(self, terms: List[Expression]) -> Expression:
        index = next((i for i, term in enumerate(terms) if i > 0 and self.operator(term)), None)
        if index is None:
            return fold_apply(terms)
        op = terms[index]
        left, rest = terms[:index], terms[index + 1:]
        if not rest:
            raise RewriteError(f"operator {op.name!r} has no right operand", span=op.span)
        if self.operator(rest[0]):
            raise RewriteError(f"operator {rest[0].name!r} has no left operand", span=rest[0].span)
        right = self.rotate_spine(rest)
        placed = op.placed()
        logger.debug(f"[REWRITE] rotated {op.name!r} to the right")
        if self.groupable(left):
            return Apply(function=Apply(function=placed, argument=fold_apply(left)), argument=right)
        return Apply(function=fold_apply([*left[:-1], placed, left[-1]]), argument=right)


def arrow_parameters(expr: Expression) -> Set[str]:
    """Names written directly left of an arrow anywhere in ``expr``."""
    found: Set[str] = set()

    def walk(node: Expression) -> None:
        if isinstance(node, Apply):
            head, arguments = flatten_apply(node, stop_at_groups=True)
            terms = [head, *arguments]
            for before, after in zip(terms, terms[1:]):
                if isinstance(before, Variable) and isinstance(after, Variable) and after.name == ARROW:
                    found.add(before.name)
            for term in terms:
                walk(term)
        for child in node.children() if not isinstance(node, Apply) else ():
            walk(child)

    walk(expr)
    return found


def _rewriter(env: TypeEnvironment, expr: Expression, is_known: Optional[IsKnown], **flags: bool) -> Rewriter:
    rewriter = Rewriter(env, is_known, **flags)
    rewriter.parameters = arrow_parameters(expr)
    return rewriter


def infix_to_prefix(expr: Expression, env: TypeEnvironment, is_known: Optional[IsKnown] = None) -> Expression:
    """Move left-associative infix operators ahead of their left operand."""
    return _rewriter(env, expr, is_known, right_to_left=False).rewrite(expr)


def rotate_right(expr: Expression, env: TypeEnvironment, is_known: Optional[IsKnown] = None) -> Expression:
    """Re-associate everything right of a right-associative operator into its argument."""
    return _rewriter(env, expr, is_known, left_to_right=False).rewrite(expr)


def normalize(expr: Expression, env: TypeEnvironment, is_known: Optional[IsKnown] = None) -> Expression:
    """Both rewrites, bottom-up; idempotent."""
    result = _rewriter(env, expr, is_known).rewrite(expr)
    # DEBUG: Log normalized tree (rewrite.py:normalize)
    logger.debug(f"[REWRITE] {expr} => {result}")
    return result
