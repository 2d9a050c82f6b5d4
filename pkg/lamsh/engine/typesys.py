"""Type-level machinery: substitutions, unification, overload ranking and
let-polymorphism. Types are ordinary Expression nodes (TypeTerm,
TypeConstructorTerm applications, ArrowType, Placeholder, KindStar).
"""
from enum import Enum
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union
import logging

from pydantic import BaseModel, ConfigDict

from lamsh.core.errors import InferError, UnifyError
from lamsh.models.expression import (
    KIND_STAR,
    Apply,
    ArrowType,
    Constant,
    Expression,
    KindStar,
    Placeholder,
    TypeConstructorTerm,
    TypeTerm,
    Variable,
    apply_type,
    format_type,
    placeholders,
    split_arrows,
)
from lamsh.models.scheme import TypeScheme
from lamsh.repositories.environment import TypeEnvironment

logger = logging.getLogger(__name__)

Fresh = Callable[[], Placeholder]


class Substitution:
    """Immutable map from placeholder id to type, kept fully applied."""

    def __init__(self, bindings: Optional[Mapping[int, Expression]] = None):
        self._bindings: Dict[int, Expression] = dict(bindings or {})

    def __contains__(self, placeholder_id: int) -> bool:
        return placeholder_id in self._bindings

    def __len__(self) -> int:
        return len(self._bindings)

    def __iter__(self) -> Iterator[int]:
        return iter(self._bindings)

    def get(self, placeholder_id: int) -> Optional[Expression]:
        return self._bindings.get(placeholder_id)

    def items(self) -> List[Tuple[int, Expression]]:
        return list(self._bindings.items())

    def extend(self, placeholder_id: int, t: Expression) -> "Substitution":
        single = {placeholder_id: t}
        bindings = {k: _replace(v, single) for k, v in self._bindings.items()}
        bindings[placeholder_id] = t
        return Substitution(bindings)

    def apply(self, t: Expression) -> Expression:
        if not self._bindings:
            return t
        return _replace(t, self._bindings)

    def __repr__(self) -> str:
        inner = ", ".join(f"?{k} := {format_type(v)}" for k, v in sorted(self._bindings.items()))
        return "{" + inner + "}"


def _replace(t: Expression, bindings: Mapping[int, Expression]) -> Expression:
    if isinstance(t, Placeholder):
        return bindings.get(t.id, t)
    if isinstance(t, (Apply, ArrowType)):
        return t.replace_children(tuple(_replace(child, bindings) for child in t.children()))
    return t


def same_type(a: Expression, b: Expression) -> bool:
    """Structural type equality, ignoring kind annotations."""
    if isinstance(a, Placeholder) and isinstance(b, Placeholder):
        return a.id == b.id
    if isinstance(a, (TypeTerm, TypeConstructorTerm)) and type(a) is type(b):
        return a.name == b.name  # type: ignore[attr-defined]
    if isinstance(a, KindStar) and isinstance(b, KindStar):
        return True
    if isinstance(a, (Apply, ArrowType)) and type(a) is type(b):
        return all(same_type(x, y) for x, y in zip(a.children(), b.children()))
    return False


def type_spine(t: Expression) -> Tuple[Expression, List[Expression]]:
    arguments: List[Expression] = []
    while isinstance(t, Apply):
        arguments.append(t.argument)
        t = t.function
    arguments.reverse()
    return t, arguments


def kind_arity(t: Expression) -> Optional[int]:
    """How many more type arguments ``t`` takes, when known."""
    if isinstance(t, (TypeTerm, ArrowType)):
        return 0
    if isinstance(t, TypeConstructorTerm):
        return t.arity
    if isinstance(t, Apply):
        inner = kind_arity(t.function)
        return None if inner is None else inner - 1
    return None


def unify(a: Expression, b: Expression, s: Optional[Substitution] = None) -> Substitution:
    """Extend ``s`` so that ``a`` and ``b`` become equal."""
    return _unify(a, b, s or Substitution())


def _unify(a: Expression, b: Expression, s: Substitution) -> Substitution:
    a, b = s.apply(a), s.apply(b)
    if same_type(a, b):
        return s
    if isinstance(a, Placeholder):
        return _bind(a, b, s)
    if isinstance(b, Placeholder):
        return _bind(b, a, s)
    if isinstance(a, ArrowType) and isinstance(b, ArrowType):
        s = _unify(a.parameter, b.parameter, s)
        return _unify(a.result, b.result, s)
    if isinstance(a, Apply) and isinstance(b, Apply):
        return _unify_applications(a, b, s)
    kind_a, kind_b = kind_arity(a), kind_arity(b)
    if kind_a is not None and kind_b is not None and kind_a != kind_b:
        raise UnifyError(
            f"kind mismatch between {format_type(a)} and {format_type(b)}",
            reason=UnifyError.KIND,
        )
    raise UnifyError(
        f"type mismatch: expected {format_type(b)}, found {format_type(a)}",
        reason=UnifyError.MISMATCH,
    )


def _unify_applications(a: Apply, b: Apply, s: Substitution) -> Substitution:
    head_a, args_a = type_spine(a)
    head_b, args_b = type_spine(b)
    if len(args_a) != len(args_b):
        (short_head, short_args), (long_head, long_args) = sorted(
            [(head_a, args_a), (head_b, args_b)], key=lambda pair: len(pair[1])
        )
        if not isinstance(short_head, Placeholder):
            raise UnifyError(
                f"kind mismatch between {format_type(a)} and {format_type(b)}",
                reason=UnifyError.KIND,
            )
        extra = len(long_args) - len(short_args)
        s = _unify(short_head, apply_type(long_head, *long_args[:extra]), s)
        pairs = zip(short_args, long_args[extra:])
    else:
        s = _unify(head_a, head_b, s)
        pairs = zip(args_a, args_b)
    for left, right in pairs:
        s = _unify(left, right, s)
    return s


def _bind(p: Placeholder, t: Expression, s: Substitution) -> Substitution:
    if p.id in placeholders(t):
        raise UnifyError(
            f"cannot construct the infinite type {format_type(p)} = {format_type(t)}",
            reason=UnifyError.OCCURS,
        )
    return s.extend(p.id, t)


# --- literal ranking ------------------------------------------------------

LITERAL_RANKS = {
    "Int": 1,
    "Float": 2,
    "Bool": 3,
    "Char": 3,
    "Str": 4,
    "List": 5,
    "LineSeq": 6,
    "Stream": 7,
    "TextReader": 7,
    "TextWriter": 7,
}
OPAQUE_RANK = 8


def rank_literal(t: Expression) -> Optional[int]:
    """Priority class of a fully applied type; None when not a literal."""
    if isinstance(t, (ArrowType, Placeholder)):
        return None
    head, _ = type_spine(t)
    if isinstance(head, (TypeTerm, TypeConstructorTerm)):
        return LITERAL_RANKS.get(head.name, OPAQUE_RANK)
    if isinstance(head, Placeholder):
        return None
    return OPAQUE_RANK


def final_result(t: Expression) -> Expression:
    return split_arrows(t)[1]


# --- overload resolution --------------------------------------------------

class ResolutionMode(str, Enum):
    SCRIPT = "script"
    REPL = "repl"


class OverloadCandidate(BaseModel):
    """One overload considered at a use site."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    signature: Expression
    registration_index: int
    conversion_priority: Optional[int] = None
    value: Optional[Expression] = None
    name: str = ""

    def __str__(self) -> str:
        return f"{self.name}: {format_type(self.signature, {})}"


class Selected(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    candidate: OverloadCandidate
    substitution: Substitution
    remaining: Expression


class Ambiguity(BaseModel):
    """No unique overload: either nothing matched or several tie."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    survivors: Tuple[OverloadCandidate, ...] = ()
    remaining: Tuple[Expression, ...] = ()

    @property
    def is_mismatch(self) -> bool:
        return not self.survivors

    def describe(self) -> str:
        lines = []
        for candidate, remaining in zip(self.survivors, self.remaining):
            rank = rank_literal(remaining)
            label = "not a literal" if rank is None else f"rank {rank}"
            lines.append(f"{format_type(candidate.signature, {})} ({label})")
        return "; ".join(lines)


Resolution = Union[Selected, Ambiguity]


def _strip(t: Expression, count: int) -> Expression:
    for _ in range(count):
        if not isinstance(t, ArrowType):
            break
        t = t.result
    return t


def resolve_overloads(
    candidates: Sequence[OverloadCandidate],
    arg_types: Sequence[Expression],
    expected: Optional[Expression] = None,
    mode: Optional[ResolutionMode] = None,
    substitution: Optional[Substitution] = None,
) -> Resolution:
    """Pick one overload for a site applied to ``arg_types``.

    Parameters are checked in declaration order, then the expected result.
    With ``mode`` None only a unique survivor is accepted. REPL mode prefers
    candidates whose remaining type is a literal, best rank first; sets built
    from conversions resolve by conversion priority in either mode, literal
    results first. Remaining ties fall to registration order.
    """
    base = substitution or Substitution()
    survivors: List[Selected] = []
    for candidate in candidates:
        trial = base
        t = candidate.signature
        try:
            for arg_type in arg_types:
                t = trial.apply(t)
                if not isinstance(t, ArrowType):
                    raise UnifyError(f"{candidate.name} takes fewer arguments")
                trial = unify(t.parameter, arg_type, trial)
                t = t.result
            depth = 0 if expected is None else len(split_arrows(trial.apply(expected))[0])
            if expected is not None:
                trial = unify(t, expected, trial)
        except UnifyError:
            continue
        remaining = _strip(trial.apply(t), depth)
        survivors.append(Selected(candidate=candidate, substitution=trial, remaining=remaining))

    # DEBUG: Log overload filtering (typesys.py:resolve_overloads)
    name = candidates[0].name if candidates else "?"
    logger.debug(f"[INFER] {len(survivors)}/{len(candidates)} overload(s) of {name!r} survive")
    if len(survivors) == 1:
        return survivors[0]
    if not survivors:
        return Ambiguity()
    if mode is not None:
        if all(s.candidate.conversion_priority is not None for s in survivors):
            literal = [s for s in survivors if rank_literal(s.remaining) is not None]
            return min(
                literal or survivors,
                key=lambda s: (s.candidate.conversion_priority, s.candidate.registration_index),
            )
        if mode == ResolutionMode.REPL:
            literal = [s for s in survivors if rank_literal(s.remaining) is not None]
            if literal:
                return min(
                    literal,
                    key=lambda s: (
                        rank_literal(s.remaining),
                        s.candidate.conversion_priority or 0,
                        s.candidate.registration_index,
                    ),
                )
    return Ambiguity(
        survivors=tuple(s.candidate for s in survivors),
        remaining=tuple(s.remaining for s in survivors),
    )


# --- let-polymorphism -----------------------------------------------------

def generalize(t: Expression, env: TypeEnvironment) -> TypeScheme:
    """Quantify the placeholders of ``t`` that are not free in ``env``."""
    bound = env.free_placeholders()
    return TypeScheme(variables=tuple(p for p in placeholders(t) if p not in bound), body=t)


def instantiation(scheme: TypeScheme, fresh: Fresh) -> Substitution:
    return Substitution({variable: fresh() for variable in scheme.variables})


def instantiate(scheme: TypeScheme, fresh: Fresh) -> Expression:
    """Replace quantified placeholders with fresh ones."""
    return instantiation(scheme, fresh).apply(scheme.body)


# --- annotations ----------------------------------------------------------

ARROW = "->"
TYPE_NODES = (TypeTerm, TypeConstructorTerm, ArrowType, KindStar, Placeholder)


def to_type(
    expr: Expression,
    env: TypeEnvironment,
    fresh: Fresh,
    variables: Optional[Dict[str, Placeholder]] = None,
) -> Expression:
    """Turn an annotation expression into a type.

    Unknown lower-case names become type variables shared through
    ``variables``; ``*`` is the kind of types.
    """
    variables = {} if variables is None else variables
    if isinstance(expr, TYPE_NODES) and not isinstance(expr, ArrowType):
        return expr
    if isinstance(expr, ArrowType):
        return ArrowType(
            parameter=to_type(expr.parameter, env, fresh, variables),
            result=to_type(expr.result, env, fresh, variables),
        )
    if isinstance(expr, Variable):
        if expr.name == "*":
            return KIND_STAR
        for overload in env.lookup(expr.name) or ():
            if isinstance(overload.value, (TypeTerm, TypeConstructorTerm)):
                return overload.value
        if expr.name[:1].islower():
            if expr.name not in variables:
                variables[expr.name] = fresh()
            return variables[expr.name]
        raise InferError(f"unknown type {expr.name!r}", reason=InferError.ANNOTATION, span=expr.span)
    if isinstance(expr, Apply):
        head, arguments = type_spine(expr)
        if isinstance(head, Variable) and head.name == ARROW:
            if len(arguments) != 2:
                raise InferError("'->' in a type needs two sides", reason=InferError.ANNOTATION, span=expr.span)
            return ArrowType(
                parameter=to_type(arguments[0], env, fresh, variables),
                result=to_type(arguments[1], env, fresh, variables),
            )
        constructor = to_type(head, env, fresh, variables)
        if isinstance(constructor, TypeConstructorTerm) and len(arguments) > constructor.arity:
            raise InferError(
                f"{constructor.name} takes {constructor.arity} type argument(s)",
                reason=InferError.ANNOTATION,
                span=expr.span,
            )
        if isinstance(constructor, (TypeTerm, ArrowType, KindStar)):
            raise InferError(
                f"{format_type(constructor)} does not take type arguments",
                reason=InferError.ANNOTATION,
                span=expr.span,
            )
        return apply_type(constructor, *(to_type(a, env, fresh, variables) for a in arguments))
    if isinstance(expr, Constant):
        raise InferError("a literal is not a type", reason=InferError.ANNOTATION, span=expr.span)
    raise InferError(f"{expr} is not a type", reason=InferError.ANNOTATION, span=expr.span)
