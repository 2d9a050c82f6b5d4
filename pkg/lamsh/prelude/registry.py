"""Registering host functions and conversions in an environment.

Signatures are written in the surface syntax (``Str -> Int -> Int``) and
go through the same lexer, parser and rewrite pass as user annotations.
"""
from itertools import count
from typing import Any, Callable, List, Union
import logging

from lamsh.core.errors import EngineError, SignatureError, UnifyError
from lamsh.engine.lexer import tokenize
from lamsh.engine.parser import parse
from lamsh.engine.rewrite import Rewriter
from lamsh.engine.typesys import Substitution, generalize, same_type, to_type, type_spine, unify
from lamsh.models.attributes import DEFAULT_ATTRIBUTES, BoundAttributes
from lamsh.models.conversion import Conversion
from lamsh.models.expression import (
    LINE_SEQ,
    STREAM,
    TEXT_READER,
    TEXT_WRITER,
    Expression,
    HostFunctionTerm,
    Placeholder,
    TypeConstructorTerm,
    TypeTerm,
    arrow,
    format_type,
    split_arrows,
)
from lamsh.models.scheme import TypeScheme
from lamsh.repositories.environment import TypeEnvironment

logger = logging.getLogger(__name__)

Signature = Union[str, Expression]
STREAM_KINDS = frozenset(t.name for t in (STREAM, TEXT_READER, TEXT_WRITER, LINE_SEQ))


def parse_signature(signature: Signature, env: TypeEnvironment) -> TypeScheme:
    """Turn a signature into a closed type scheme."""
    if isinstance(signature, Expression):
        return generalize(signature, TypeEnvironment())
    if "," in signature:
        raise SignatureError(
            f"tupled signature {signature!r} is not supported",
            hint="write the parameters curried: `A -> B -> C`",
        )
    supply = count(1)
    try:
        expr = parse(tokenize(signature))
        expr = Rewriter(env, left_to_right=False, type_level=True).rewrite(expr)
        t = to_type(expr, env, lambda: Placeholder(id=next(supply)))
    except EngineError as e:
        raise SignatureError(f"bad signature {signature!r}: {e.message}") from e
    return generalize(t, TypeEnvironment())


def is_stream_kinded(t: Expression) -> bool:
    head, _ = type_spine(t)
    return isinstance(head, (TypeTerm, TypeConstructorTerm)) and head.name in STREAM_KINDS


def _derived_overloads(
    scheme: TypeScheme,
    implementation: Callable[..., Any],
    env: TypeEnvironment,
) -> List[tuple]:
    """Variants of a function reading its last argument through a conversion."""
    parameters, result = split_arrows(scheme.body)
    if not parameters or isinstance(parameters[-1], Placeholder):
        return []
    derived = []
    for conversion in env.conversions:
        if same_type(conversion.source, parameters[-1]):
            continue
        try:
            s: Substitution = unify(conversion.target, parameters[-1])
        except UnifyError:
            continue
        signature = s.apply(arrow(*parameters[:-1], conversion.source, result))

        def convert_last(*args: Any, _c: Conversion = conversion) -> Any:
            return implementation(*args[:-1], _c.implementation(args[-1]))

        derived.append((generalize(signature, TypeEnvironment()), convert_last, conversion))
    return derived


def _bind_host(
    env: TypeEnvironment,
    name: str,
    attributes: BoundAttributes,
    scheme: TypeScheme,
    implementation: Callable[..., Any],
    conversion_priority=None,
) -> TypeEnvironment:
    parameters, _ = split_arrows(scheme.body)
    if not parameters:
        raise SignatureError(f"{name}: a host function needs at least one parameter")
    term = HostFunctionTerm(
        name=name,
        signature=scheme.body,
        arity=len(parameters),
        implementation=implementation,
        annotation=scheme.body,
    )
    return env.bind(name, attributes, term, scheme=scheme, conversion_priority=conversion_priority)


def register_host_function(
    env: TypeEnvironment,
    name: str,
    signature: Signature,
    implementation: Callable[..., Any],
    attributes: BoundAttributes = DEFAULT_ATTRIBUTES,
    derive_conversions: bool = True,
) -> TypeEnvironment:
    """Bind a curried host function, plus conversion-derived overloads.

    When the last parameter is something a registered conversion produces,
    an extra overload accepts the conversion's source type instead. The
    direct form then ranks ahead of the derived ones.
    """
    scheme = parse_signature(signature, env)
    derived = _derived_overloads(scheme, implementation, env) if derive_conversions else []
    env = _bind_host(env, name, attributes, scheme, implementation, 0 if derived else None)
    for derived_scheme, derived_implementation, conversion in derived:
        env = _bind_host(env, name, attributes, derived_scheme, derived_implementation, conversion.priority)
    # DEBUG: Log registered host function (registry.py:register_host_function)
    logger.debug(f"[PRELUDE] {name}: {scheme} (+{len(derived)} derived)")
    return env


def register_conversion(
    env: TypeEnvironment,
    source: Signature,
    target: Signature,
    implementation: Callable[[Any], Any],
    priority: int,
    name: str,
) -> TypeEnvironment:
    """Register ``name: source -> target`` as a conversion and as a host function.

    Both sides must be stream-like and differ; registering the same pair
    again replaces the earlier conversion.
    """
    source_type = parse_signature(source, env).body
    target_type = parse_signature(target, env).body
    if same_type(source_type, target_type):
        raise SignatureError(f"{name}: conversion from {format_type(source_type, {})} to itself")
    for side in (source_type, target_type):
        if not is_stream_kinded(side):
            raise SignatureError(
                f"{name}: {format_type(side, {})} is not a stream type",
                hint=f"conversions connect {', '.join(sorted(STREAM_KINDS))}",
            )
    conversion = Conversion(
        name=name,
        source=source_type,
        target=target_type,
        priority=priority,
        implementation=implementation,
    )
    env = env.with_conversion(conversion)
    logger.debug(f"[PRELUDE] {conversion}")
    return _bind_host(
        env,
        name,
        DEFAULT_ATTRIBUTES,
        generalize(arrow(source_type, target_type), TypeEnvironment()),
        implementation,
    )


def describe(env: TypeEnvironment, name: str) -> List[str]:
    """Signatures bound to ``name``, one line each."""
    return [
        f"{name} : {format_type(o.scheme.body if o.scheme else o.value.annotation, {})}"
        for o in env.lookup(name) or ()
    ]
