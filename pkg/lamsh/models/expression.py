"""The uniform expression tree shared by every engine stage.

Nodes are immutable pydantic models. Equality is structural over fields;
source spans and the parser's grouping marks live in private attributes so
they never take part in comparisons.
"""
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr

from lamsh.schemas.command import CommandSpec

Span = Tuple[int, int]


class Expression(BaseModel):
    """Base node. ``annotation`` holds the node's type, or None before inference."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    annotation: Optional["Expression"] = None

    _span: Optional[Span] = PrivateAttr(default=None)
    _group: bool = PrivateAttr(default=False)
    _placed: bool = PrivateAttr(default=False)

    def __eq__(self, other: Any) -> bool:
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self) -> int:
        return hash((type(self).__name__, *(_hashable(v) for v in self.__dict__.values())))

    def children(self) -> Tuple["Expression", ...]:
        return ()

    def replace_children(self, children: Tuple["Expression", ...]) -> "Expression":
        return self

    @property
    def span(self) -> Optional[Span]:
        if self._span is not None:
            return self._span
        spans = [c.span for c in self.children() if c.span is not None]
        if not spans:
            return None
        return (min(s[0] for s in spans), max(s[1] for s in spans))

    @property
    def is_group(self) -> bool:
        """True when the parser saw this node as a parenthesized group."""
        return self._group

    @property
    def is_placed(self) -> bool:
        """True for operators already moved into prefix position."""
        return self._placed

    def with_annotation(self, annotation: Optional["Expression"]) -> "Expression":
        return self.model_copy(update={"annotation": annotation})

    def located(self, span: Optional[Span]) -> "Expression":
        copy = self.model_copy()
        copy._span = span
        return copy

    def grouped(self) -> "Expression":
        copy = self.model_copy()
        copy._group = True
        return copy

    def placed(self) -> "Expression":
        copy = self.model_copy()
        copy._placed = True
        return copy

    def __str__(self) -> str:
        return serialize(self)

    def __repr__(self) -> str:
        return serialize(self)


def _hashable(value: Any) -> Any:
    try:
        hash(value)
    except TypeError:
        return id(value)
    return value


class Variable(Expression):
    name: str


class Constant(Expression):
    value: Any


class Apply(Expression):
    function: Expression
    argument: Expression

    def children(self) -> Tuple[Expression, ...]:
        return (self.function, self.argument)

    def replace_children(self, children: Tuple[Expression, ...]) -> Expression:
        function, argument = children
        if function is self.function and argument is self.argument:
            return self
        return self.model_copy(update={"function": function, "argument": argument})


class Lambda(Expression):
    parameter: str
    parameter_type: Optional[Expression] = None
    body: Expression

    def children(self) -> Tuple[Expression, ...]:
        return (self.body,)

    def replace_children(self, children: Tuple[Expression, ...]) -> Expression:
        (body,) = children
        if body is self.body:
            return self
        return self.model_copy(update={"body": body})


class TypeTerm(Expression):
    """A fully applied host type such as ``Int``."""
    name: str


class TypeConstructorTerm(Expression):
    """A host type constructor such as ``List`` awaiting ``arity`` types."""
    name: str
    arity: int = Field(ge=1)


class ArrowType(Expression):
    """Function type ``parameter -> result``."""
    parameter: Expression
    result: Expression

    def children(self) -> Tuple[Expression, ...]:
        return (self.parameter, self.result)

    def replace_children(self, children: Tuple[Expression, ...]) -> Expression:
        parameter, result = children
        if parameter is self.parameter and result is self.result:
            return self
        return self.model_copy(update={"parameter": parameter, "result": result})


class KindStar(Expression):
    """The kind of fully applied types, written ``*``."""


class Placeholder(Expression):
    """An unresolved inference variable."""
    id: int


class BuiltinTerm(Expression):
    """Syntax-level built-ins (``->`` and ``=``) handled by the engine itself."""
    name: str


class HostFunctionTerm(Expression):
    """A curried host function, possibly partially applied."""
    name: str
    signature: Expression
    arity: int = Field(ge=1)
    implementation: Callable[..., Any]
    arguments: Tuple[Expression, ...] = ()

    @property
    def saturated(self) -> bool:
        return len(self.arguments) >= self.arity

    def children(self) -> Tuple[Expression, ...]:
        return self.arguments

    def replace_children(self, children: Tuple[Expression, ...]) -> Expression:
        if children == self.arguments:
            return self
        return self.model_copy(update={"arguments": tuple(children)})


class CommandTerm(Expression):
    """An external command typed ``Str^leading -> input -> Stream``.

    ``input_type`` is None for the standalone variant that runs with an
    empty stdin.
    """
    spec: CommandSpec
    signature: Expression
    leading: int = Field(ge=0)
    input_type: Optional[Expression] = None
    arguments: Tuple[Expression, ...] = ()

    @property
    def arity(self) -> int:
        return self.leading + (0 if self.input_type is None else 1)

    @property
    def saturated(self) -> bool:
        return len(self.arguments) >= self.arity

    def children(self) -> Tuple[Expression, ...]:
        return self.arguments

    def replace_children(self, children: Tuple[Expression, ...]) -> Expression:
        if children == self.arguments:
            return self
        return self.model_copy(update={"arguments": tuple(children)})


for _model in (
    Expression, Variable, Constant, Apply, Lambda, TypeTerm, TypeConstructorTerm,
    ArrowType, KindStar, Placeholder, BuiltinTerm, HostFunctionTerm, CommandTerm,
):
    _model.model_rebuild()

KIND_STAR = KindStar()


def type_term(name: str) -> TypeTerm:
    return TypeTerm(name=name, annotation=KIND_STAR)


def type_constructor(name: str, arity: int) -> TypeConstructorTerm:
    kind: Expression = KIND_STAR
    for _ in range(arity):
        kind = ArrowType(parameter=KIND_STAR, result=kind)
    return TypeConstructorTerm(name=name, arity=arity, annotation=kind)


INT = type_term("Int")
FLOAT = type_term("Float")
BOOL = type_term("Bool")
CHAR = type_term("Char")
STR = type_term("Str")
UNIT = type_term("Unit")
STREAM = type_term("Stream")
TEXT_READER = type_term("TextReader")
TEXT_WRITER = type_term("TextWriter")
EXIT_STATUS = type_term("ExitStatus")
LIST = type_constructor("List", 1)
LINE_SEQ = type_constructor("LineSeq", 1)
PAIR = type_constructor("Pair", 2)


def apply_type(constructor: Expression, *arguments: Expression) -> Expression:
    result = constructor
    for argument in arguments:
        result = Apply(function=result, argument=argument)
    return result


def arrow(*types: Expression) -> Expression:
    """Right-nested function type ``t1 -> t2 -> ... -> tn``."""
    result = types[-1]
    for parameter in reversed(types[:-1]):
        result = ArrowType(parameter=parameter, result=result)
    return result


def fold_apply(terms: Iterable[Expression]) -> Expression:
    """Left-fold terms into nested applications."""
    iterator = iter(terms)
    result = next(iterator)
    for term in iterator:
        result = Apply(function=result, argument=term)
    return result


def flatten_apply(expr: Expression, *, stop_at_groups: bool = False) -> Tuple[Expression, List[Expression]]:
    """Split an application spine into its head and arguments."""
    arguments: List[Expression] = []
    node = expr
    while isinstance(node, Apply):
        if node is not expr and (node.annotation is not None or (stop_at_groups and node.is_group)):
            break
        arguments.append(node.argument)
        node = node.function
    arguments.reverse()
    return node, arguments


def split_arrows(t: Expression) -> Tuple[List[Expression], Expression]:
    parameters: List[Expression] = []
    while isinstance(t, ArrowType):
        parameters.append(t.parameter)
        t = t.result
    return parameters, t


def leaves(expr: Expression) -> List[Expression]:
    """In-order leaf terms of an application tree."""
    if isinstance(expr, Apply):
        return leaves(expr.function) + leaves(expr.argument)
    return [expr]


def placeholders(t: Optional[Expression]) -> List[int]:
    """Placeholder ids occurring in a type, in first-occurrence order."""
    found: Dict[int, None] = {}

    def walk(node: Optional[Expression]) -> None:
        if node is None:
            return
        if isinstance(node, Placeholder):
            found.setdefault(node.id, None)
            return
        if isinstance(node, (Apply, ArrowType)):
            for child in node.children():
                walk(child)

    walk(t)
    return list(found)


def map_annotations(expr: Expression, fn: Callable[[Expression], Expression]) -> Expression:
    """Rewrite every annotation (and lambda parameter type) in a tree."""
    children = tuple(map_annotations(child, fn) for child in expr.children())
    node = expr.replace_children(children) if children else expr
    updates: Dict[str, Any] = {}
    if node.annotation is not None:
        updates["annotation"] = fn(node.annotation)
    if isinstance(node, Lambda) and node.parameter_type is not None:
        updates["parameter_type"] = fn(node.parameter_type)
    return node.model_copy(update=updates) if updates else node


# --- text forms -----------------------------------------------------------

def quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def format_literal(value: Any, annotation: Optional[Expression] = None) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        if annotation == CHAR:
            return f"'{value}'"
        return quote(value)
    if isinstance(value, (int, float)):
        return repr(value)
    return str(value)


def format_type(t: Optional[Expression], names: Optional[Dict[int, str]] = None) -> str:
    """Render a type in arrow notation.

    With ``names`` given, placeholders print as letters ``a``, ``b``, ...
    in order of first appearance.
    """
    if t is None:
        return "?"
    if isinstance(t, Placeholder):
        if names is None:
            return f"?{t.id}"
        if t.id not in names:
            names[t.id] = _letter(len(names))
        return names[t.id]
    if isinstance(t, (TypeTerm, TypeConstructorTerm)):
        return t.name
    if isinstance(t, KindStar):
        return "*"
    if isinstance(t, ArrowType):
        left = format_type(t.parameter, names)
        if isinstance(t.parameter, ArrowType):
            left = f"({left})"
        return f"{left} -> {format_type(t.result, names)}"
    if isinstance(t, Apply):
        head = format_type(t.function, names)
        argument = format_type(t.argument, names)
        if isinstance(t.argument, (Apply, ArrowType)):
            argument = f"({argument})"
        return f"{head} {argument}"
    return serialize(t)


def pretty_type(t: Optional[Expression]) -> str:
    return format_type(t, {})


def _letter(index: int) -> str:
    letters = "abcdefghijklmnopqrstuvwxyz"
    if index < len(letters):
        return letters[index]
    return f"t{index}"


def serialize(expr: Expression) -> str:
    """Canonical text form: node, children, then annotation when known."""
    annotation = expr.annotation
    if isinstance(expr, Variable):
        if annotation is None or isinstance(annotation, Placeholder):
            return expr.name
        return f"Variable({expr.name}, {format_type(annotation)})"
    if isinstance(expr, Constant):
        return f"Constant({format_literal(expr.value, annotation)}, {format_type(annotation)})"
    if isinstance(expr, Apply):
        inner = f"{serialize(expr.function)}, {serialize(expr.argument)}"
    elif isinstance(expr, Lambda):
        inner = f"{expr.parameter}, {serialize(expr.body)}"
    elif isinstance(expr, TypeTerm):
        return f"Type({expr.name})"
    elif isinstance(expr, TypeConstructorTerm):
        return f"TypeConstructor({expr.name}, {expr.arity})"
    elif isinstance(expr, (ArrowType, KindStar, Placeholder)):
        return format_type(expr)
    elif isinstance(expr, BuiltinTerm):
        return expr.name
    elif isinstance(expr, HostFunctionTerm):
        inner = ", ".join([expr.name, *(serialize(a) for a in expr.arguments)])
        return f"HostFunction({inner})"
    elif isinstance(expr, CommandTerm):
        inner = ", ".join([expr.spec.name, *(serialize(a) for a in expr.arguments)])
        return f"Command({inner})"
    else:
        return f"{type(expr).__name__}()"
    if annotation is None or isinstance(annotation, Placeholder):
        return f"{type(expr).__name__}({inner})"
    return f"{type(expr).__name__}({inner}, {format_type(annotation)})"
