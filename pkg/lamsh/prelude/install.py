"""The standard environment every session starts from."""
from typing import Optional
import logging
import operator

from lamsh.engine.inference import infer
from lamsh.engine.lexer import tokenize
from lamsh.engine.parser import parse_annotated
from lamsh.engine.rewrite import normalize
from lamsh.engine.typesys import ResolutionMode, generalize
from lamsh.models.attributes import DEFAULT_ATTRIBUTES, INFIX_LTR, INFIX_RTL, BoundAttributes
from lamsh.models.expression import (
    BOOL,
    CHAR,
    EXIT_STATUS,
    FLOAT,
    INT,
    LINE_SEQ,
    LIST,
    PAIR,
    STR,
    STREAM,
    TEXT_READER,
    TEXT_WRITER,
    UNIT,
    BuiltinTerm,
    Constant,
    Expression,
)
from lamsh.models.scheme import TypeScheme
from lamsh.prelude import builtins
from lamsh.prelude.registry import register_conversion, register_host_function
from lamsh.repositories.environment import TypeEnvironment

logger = logging.getLogger(__name__)

TYPES = (INT, FLOAT, BOOL, CHAR, STR, UNIT, STREAM, TEXT_READER, TEXT_WRITER, EXIT_STATUS, LIST, LINE_SEQ, PAIR)

# source, target, implementation, priority, name
CONVERSIONS = (
    ("TextWriter", "Stream", builtins.writer_to_stream, 2, "tws"),
    ("TextReader", "Stream", builtins.reader_to_stream, 2, "rws"),
    ("LineSeq Str", "Stream", builtins.lines_to_stream, 3, "lws"),
    ("Stream", "TextReader", builtins.stream_to_reader, 1, "sreader"),
    ("TextWriter", "TextReader", builtins.writer_to_reader, 2, "wreader"),
    ("Stream", "LineSeq Str", builtins.to_lines, 1, "slines"),
    ("TextReader", "LineSeq Str", builtins.to_lines, 2, "rlines"),
)

# name, signature, implementation, attributes
HOST_FUNCTIONS = (
    ("+", "Int -> Int -> Int", builtins.int_add, INFIX_LTR),
    ("+", "Float -> Float -> Float", operator.add, INFIX_LTR),
    ("-", "Int -> Int -> Int", builtins.int_subtract, INFIX_LTR),
    ("-", "Float -> Float -> Float", operator.sub, INFIX_LTR),
    ("*", "Int -> Int -> Int", builtins.int_multiply, INFIX_LTR),
    ("*", "Float -> Float -> Float", operator.mul, INFIX_LTR),
    ("/", "Int -> Int -> Int", builtins.int_divide, INFIX_LTR),
    ("/", "Float -> Float -> Float", builtins.float_divide, INFIX_LTR),
    ("&&", "Bool -> Bool -> Bool", lambda a, b: a and b, INFIX_LTR),
    ("||", "Bool -> Bool -> Bool", lambda a, b: a or b, INFIX_LTR),
    ("==", "Int -> Int -> Bool", operator.eq, INFIX_LTR),
    ("==", "Float -> Float -> Bool", operator.eq, INFIX_LTR),
    ("==", "Str -> Str -> Bool", operator.eq, INFIX_LTR),
    ("!=", "Int -> Int -> Bool", operator.ne, INFIX_LTR),
    ("!=", "Float -> Float -> Bool", operator.ne, INFIX_LTR),
    ("!=", "Str -> Str -> Bool", operator.ne, INFIX_LTR),
    ("<", "Int -> Int -> Bool", operator.lt, INFIX_LTR),
    ("<", "Float -> Float -> Bool", operator.lt, INFIX_LTR),
    ("<", "Str -> Str -> Bool", operator.lt, INFIX_LTR),
    (">", "Int -> Int -> Bool", operator.gt, INFIX_LTR),
    (">", "Float -> Float -> Bool", operator.gt, INFIX_LTR),
    (">", "Str -> Str -> Bool", operator.gt, INFIX_LTR),
    ("not", "Bool -> Bool", operator.not_, DEFAULT_ATTRIBUTES),
    ("max", "Int -> Int -> Int", max, DEFAULT_ATTRIBUTES),
    ("max", "Float -> Float -> Float", max, DEFAULT_ATTRIBUTES),
    ("toInt", "Str -> Int", builtins.to_int, DEFAULT_ATTRIBUTES),
    ("toInt", "Str -> Int -> Int", builtins.to_int_radix, DEFAULT_ATTRIBUTES),
    ("toStr", "Int -> Str", builtins.to_str, DEFAULT_ATTRIBUTES),
    ("toStr", "Float -> Str", builtins.to_str, DEFAULT_ATTRIBUTES),
    ("toStr", "Bool -> Str", builtins.to_str, DEFAULT_ATTRIBUTES),
    ("toFloat", "Int -> Float", float, DEFAULT_ATTRIBUTES),
    ("echo", "Str -> TextWriter", builtins.echo, DEFAULT_ATTRIBUTES),
    ("cat", "Str -> TextReader", builtins.cat, DEFAULT_ATTRIBUTES),
    ("pcsv", "TextReader -> LineSeq (List Str)", builtins.parse_csv, DEFAULT_ATTRIBUTES),
    ("elementAt", "Int -> LineSeq (List Str) -> LineSeq Str", builtins.element_at, DEFAULT_ATTRIBUTES),
    ("distinct", "LineSeq Str -> LineSeq Str", builtins.distinct, DEFAULT_ATTRIBUTES),
    ("count", "LineSeq a -> Int", builtins.count_items, DEFAULT_ATTRIBUTES),
    ("pair", "a -> b -> Pair a b", builtins.make_pair, DEFAULT_ATTRIBUTES),
    ("fst", "Pair a b -> a", lambda p: p.first, DEFAULT_ATTRIBUTES),
    ("snd", "Pair a b -> b", lambda p: p.second, DEFAULT_ATTRIBUTES),
)

# Defined in the language itself.
DEFINITIONS = (
    ("|", "f -> g -> g f", INFIX_LTR),
)


def bind_type(env: TypeEnvironment, name: str, t: Expression) -> TypeEnvironment:
    return env.bind(name, DEFAULT_ATTRIBUTES, t, scheme=TypeScheme.monomorphic(t.annotation))


def bind_value(env: TypeEnvironment, name: str, value: Constant) -> TypeEnvironment:
    return env.bind(name, DEFAULT_ATTRIBUTES, value, scheme=TypeScheme.monomorphic(value.annotation))


def define(env: TypeEnvironment, name: str, source: str, attributes: BoundAttributes) -> TypeEnvironment:
    """Bind ``name`` to ``source`` evaluated by the engine."""
    expr = normalize(parse_annotated(tokenize(source)), env)
    typed = infer(expr, env, mode=ResolutionMode.SCRIPT)
    return env.bind(name, attributes, typed, scheme=generalize(typed.annotation, env))


def install_prelude(env: Optional[TypeEnvironment] = None) -> TypeEnvironment:
    """Bind the standard names into ``env`` (a fresh one by default)."""
    env = env or TypeEnvironment()
    for t in TYPES:
        env = bind_type(env, t.name, t)
    env = bind_type(env, "bool", BOOL)
    env = env.bind("->", INFIX_RTL, BuiltinTerm(name="->"))
    env = env.bind("=", INFIX_RTL, BuiltinTerm(name="="))
    env = bind_value(env, "true", Constant(value=True, annotation=BOOL))
    env = bind_value(env, "false", Constant(value=False, annotation=BOOL))
    for source, target, implementation, priority, name in CONVERSIONS:
        env = register_conversion(env, source, target, implementation, priority, name)
    for name, signature, implementation, attributes in HOST_FUNCTIONS:
        env = register_host_function(env, name, signature, implementation, attributes)
    for name, source, attributes in DEFINITIONS:
        env = define(env, name, source, attributes)
    logger.info(f"[PRELUDE] installed {len(env.names())} names")
    return env
