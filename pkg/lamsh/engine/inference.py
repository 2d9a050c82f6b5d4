"""Hindley-Milner inference over normalized trees.

Names bound to a single value are replaced by that value, instantiated
fresh. Overloaded names (and external commands) become pending sites that
are resolved once every constraint of the expression is known.
"""
from typing import Any, Callable, Dict, List, Optional, Sequence
import logging

from lamsh.core.errors import EngineError, InferError, UnifyError
from lamsh.engine.typesys import (
    Ambiguity,
    OverloadCandidate,
    ResolutionMode,
    Selected,
    Substitution,
    instantiation,
    resolve_overloads,
    to_type,
    unify,
)
from lamsh.models.attributes import DEFAULT_ATTRIBUTES
from lamsh.models.expression import (
    BOOL,
    CHAR,
    FLOAT,
    INT,
    KIND_STAR,
    STR,
    Apply,
    ArrowType,
    BuiltinTerm,
    CommandTerm,
    Constant,
    Expression,
    HostFunctionTerm,
    KindStar,
    Lambda,
    Placeholder,
    TypeConstructorTerm,
    TypeTerm,
    Variable,
    arrow,
    flatten_apply,
    fold_apply,
    format_type,
    map_annotations,
)
from lamsh.models.scheme import TypeScheme
from lamsh.models.values import ByteStreamValue
from lamsh.repositories.environment import Overload, TypeEnvironment

logger = logging.getLogger(__name__)

ARROW = "->"
BIND = "="

CommandLookup = Callable[[str, int], Optional[Sequence[Overload]]]


def literal_type(value: Any) -> Optional[Expression]:
    """Type of a Python literal produced by the parser."""
    if isinstance(value, bool):
        return BOOL
    if isinstance(value, int):
        return INT
    if isinstance(value, float):
        return FLOAT
    if isinstance(value, str):
        return STR
    return None


def _is_parameter(overload: Overload, name: str) -> bool:
    """Lambda parameters are bound to a variable of their own name."""
    return isinstance(overload.value, Variable) and overload.value.name == name


class OverloadSite(Expression):
    """Stand-in for an overloaded name until resolution picks a candidate."""
    site: int
    name: str


OverloadSite.model_rebuild()


class PendingSite:
    def __init__(
        self,
        index: int,
        name: str,
        placeholder: Placeholder,
        arg_count: int,
        candidates: List[OverloadCandidate],
        span,
    ):
        self.index = index
        self.name = name
        self.placeholder = placeholder
        self.arg_count = arg_count
        self.candidates = candidates
        self.span = span
        self.chosen: Optional[Selected] = None


class InferenceSession:
    """State of one inference run: fresh-name supply, substitution, sites."""

    def __init__(
        self,
        env: TypeEnvironment,
        mode: ResolutionMode = ResolutionMode.REPL,
        command_lookup: Optional[CommandLookup] = None,
    ):
        self.env = env
        self.mode = mode
        self.command_lookup = command_lookup
        self.substitution = Substitution()
        self.sites: List[PendingSite] = []
        self.type_variables: Dict[str, Placeholder] = {}
        self._counter = 0

    def fresh(self) -> Placeholder:
        self._counter += 1
        return Placeholder(id=self._counter)

    def infer(self, expr: Expression, expected: Optional[Expression] = None) -> Expression:
        typed = self._infer(expr, self.env)
        if expected is not None:
            self._unify(typed.annotation, self.to_type(expected), expr.span)
        self._resolve_sites()
        result = map_annotations(self._replace_sites(typed), self.substitution.apply)
        # DEBUG: Log inferred type (inference.py:infer)
        logger.debug(f"[INFER] {expr} : {format_type(result.annotation, {})}")
        return result

    # --- helpers ----------------------------------------------------------

    def to_type(self, annotation: Expression) -> Expression:
        return to_type(annotation, self.env, self.fresh, self.type_variables)

    def _unify(self, found: Optional[Expression], expected: Expression, span) -> None:
        try:
            self.substitution = unify(found or self.fresh(), expected, self.substitution)
        except UnifyError as e:
            raise e.with_span(span)

    def _annotate(self, typed: Expression, source: Expression) -> Expression:
        """Unify with the user's annotation on ``source``, if any."""
        if source.annotation is not None and not isinstance(source, (Constant, TypeTerm, TypeConstructorTerm)):
            self._unify(typed.annotation, self.to_type(source.annotation), source.span)
        return typed

    def _instantiate(self, overload: Overload, span) -> Expression:
        value = overload.value
        if isinstance(value, Constant) and isinstance(value.value, ByteStreamValue):
            # every use of a bound stream reads its own run
            value = value.model_copy(update={"value": value.value.reopen()})
        scheme = overload.scheme or TypeScheme.monomorphic(value.annotation or self.fresh())
        renaming = instantiation(scheme, self.fresh)
        if scheme.variables:
            value = map_annotations(value, renaming.apply)
        return value.with_annotation(renaming.apply(scheme.body)).located(span)

    def _builtin(self, name: str, scope: TypeEnvironment) -> Optional[str]:
        overloads = scope.lookup(name)
        if overloads and isinstance(overloads[0].value, BuiltinTerm):
            return overloads[0].value.name
        return None

    # --- traversal --------------------------------------------------------

    def _infer(self, expr: Expression, scope: TypeEnvironment, arg_count: int = 0) -> Expression:
        if isinstance(expr, Apply):
            return self._infer_apply(expr, scope)
        if isinstance(expr, Variable):
            return self._annotate(self._infer_variable(expr, scope, arg_count), expr)
        if isinstance(expr, Lambda):
            return self._annotate(self._infer_lambda(expr, scope), expr)
        if isinstance(expr, Constant):
            return self._infer_constant(expr)
        if isinstance(expr, (TypeTerm, TypeConstructorTerm)):
            return expr
        if isinstance(expr, (ArrowType, Placeholder)):
            return expr.with_annotation(KIND_STAR)
        if isinstance(expr, (HostFunctionTerm, CommandTerm)):
            return expr if expr.annotation is not None else expr.with_annotation(expr.signature)
        if isinstance(expr, BuiltinTerm):
            raise self._builtin_misuse(expr.name, expr.span)
        if isinstance(expr, KindStar):
            return expr
        raise InferError(f"cannot infer a type for {expr}", reason=InferError.SYNTAX, span=expr.span)

    def _builtin_misuse(self, name: str, span) -> InferError:
        if name == BIND:
            return InferError(
                "'=' binds names only at the start of a line",
                reason=InferError.SYNTAX,
                span=span,
                hint="write `name = expr` on its own line",
            )
        return InferError(
            f"{name!r} needs a parameter and a body",
            reason=InferError.SYNTAX,
            span=span,
            hint="write `x -> body`",
        )

    def _infer_constant(self, expr: Constant) -> Expression:
        natural = CHAR if expr.annotation == CHAR else literal_type(expr.value)
        if natural is None:
            # host value carried over from an earlier evaluation
            return expr.with_annotation(self.to_type(expr.annotation) if expr.annotation else self.fresh())
        if expr.annotation is not None and expr.annotation != natural:
            self._unify(natural, self.to_type(expr.annotation), expr.span)
        return expr.with_annotation(natural)

    def _infer_variable(self, expr: Variable, scope: TypeEnvironment, arg_count: int) -> Expression:
        overloads = scope.lookup(expr.name)
        if overloads and _is_parameter(overloads[-1], expr.name):
            parameter_type = overloads[-1].scheme.body if overloads[-1].scheme else self.fresh()
            return expr.with_annotation(parameter_type)
        if overloads:
            if isinstance(overloads[0].value, BuiltinTerm):
                raise self._builtin_misuse(overloads[0].value.name, expr.span)
            if len(overloads) == 1 and overloads[0].conversion_priority is None:
                return self._instantiate(overloads[0], expr.span)
            return self._site(expr, overloads, arg_count)
        commands = self.command_lookup(expr.name, arg_count) if self.command_lookup else None
        if not commands:
            raise InferError(
                f"unbound identifier {expr.name!r}",
                reason=InferError.UNBOUND,
                span=expr.span,
                hint="bind it with `name = ...` or put a command of that name on PATH",
            )
        return self._site(expr, commands, arg_count)

    def _site(self, expr: Variable, overloads: Sequence[Overload], arg_count: int) -> Expression:
        candidates = []
        for index, overload in enumerate(overloads):
            value = self._instantiate(overload, expr.span)
            candidates.append(
                OverloadCandidate(
                    signature=value.annotation,
                    registration_index=index,
                    conversion_priority=overload.conversion_priority,
                    value=value,
                    name=expr.name,
                )
            )
        placeholder = self.fresh()
        site = PendingSite(len(self.sites), expr.name, placeholder, arg_count, candidates, expr.span)
        self.sites.append(site)
        return OverloadSite(site=site.index, name=expr.name, annotation=placeholder).located(expr.span)

    def _infer_apply(self, expr: Apply, scope: TypeEnvironment) -> Expression:
        head, arguments = flatten_apply(expr)
        if isinstance(head, Variable) and self._builtin(head.name, scope) == ARROW:
            return self._infer(self._make_lambda(expr, arguments), scope)
        typed_head = self._infer(head, scope, arg_count=len(arguments))
        typed_arguments = [self._infer(argument, scope) for argument in arguments]
        result = self.fresh()
        function_type = arrow(*(a.annotation for a in typed_arguments), result)
        self._unify(function_type, typed_head.annotation, expr.span)
        node = typed_head
        remaining = function_type
        for argument in typed_arguments:
            assert isinstance(remaining, ArrowType)
            remaining = remaining.result
            node = Apply(function=node, argument=argument, annotation=remaining)
        return self._annotate(node, expr)

    def _make_lambda(self, expr: Apply, arguments: List[Expression]) -> Expression:
        if len(arguments) < 2:
            raise self._builtin_misuse(ARROW, expr.span)
        parameter = arguments[0]
        if not isinstance(parameter, Variable):
            raise InferError(
                "a lambda parameter must be a name",
                reason=InferError.SYNTAX,
                span=parameter.span,
            )
        lam = Lambda(
            parameter=parameter.name,
            parameter_type=parameter.annotation,
            body=arguments[1],
        ).located(expr.span)
        return fold_apply([lam, *arguments[2:]]).with_annotation(expr.annotation)

    def _infer_lambda(self, expr: Lambda, scope: TypeEnvironment) -> Expression:
        parameter_type = self.to_type(expr.parameter_type) if expr.parameter_type is not None else self.fresh()
        inner = scope.push_frame().bind(
            expr.parameter,
            DEFAULT_ATTRIBUTES,
            Variable(name=expr.parameter),
            scheme=TypeScheme.monomorphic(parameter_type),
        )
        body = self._infer(expr.body, inner)
        return Lambda(
            parameter=expr.parameter,
            parameter_type=parameter_type,
            body=body,
            annotation=ArrowType(parameter=parameter_type, result=body.annotation),
        ).located(expr.span)

    # --- overload sites ---------------------------------------------------

    def _resolve(self, site: PendingSite, mode: Optional[ResolutionMode]):
        t = self.substitution.apply(site.placeholder)
        arg_types = []
        for _ in range(site.arg_count):
            if not isinstance(t, ArrowType):
                break
            arg_types.append(t.parameter)
            t = t.result
        return resolve_overloads(site.candidates, arg_types, t, mode, self.substitution)

    def _choose(self, site: PendingSite, selected: Selected) -> None:
        site.chosen = selected
        self.substitution = selected.substitution
        logger.debug(f"[INFER] {site.name} resolved to {format_type(selected.candidate.signature, {})}")

    def _resolve_sites(self) -> None:
        pending = [site for site in self.sites if site.chosen is None]
        while pending:
            progress = False
            for site in pending:
                outcome = self._resolve(site, None)
                if isinstance(outcome, Selected):
                    self._choose(site, outcome)
                    progress = True
                elif outcome.is_mismatch:
                    raise self._no_match(site)
            pending = [site for site in pending if site.chosen is None]
            if pending and not progress:
                site = pending[0]
                outcome = self._resolve(site, self.mode)
                if isinstance(outcome, Ambiguity):
                    raise InferError(
                        f"ambiguous use of {site.name!r}: {outcome.describe()}",
                        reason=InferError.AMBIGUOUS,
                        span=site.span,
                        hint="add a type annotation, e.g. `(expr : Int)`",
                    )
                self._choose(site, outcome)
                pending = pending[1:]

    def _no_match(self, site: PendingSite) -> InferError:
        wanted = format_type(self.substitution.apply(site.placeholder), {})
        offered = "; ".join(format_type(c.signature, {}) for c in site.candidates)
        return InferError(
            f"no overload of {site.name!r} fits {wanted}",
            reason=InferError.NO_MATCH,
            span=site.span,
            hint=f"available: {offered}",
        )

    def _replace_sites(self, node: Expression) -> Expression:
        if isinstance(node, OverloadSite):
            chosen = self.sites[node.site].chosen
            assert chosen is not None and chosen.candidate.value is not None
            return chosen.candidate.value.with_annotation(node.annotation).located(node.span)
        children = node.children()
        if not children:
            return node
        return node.replace_children(tuple(self._replace_sites(child) for child in children))


def infer(
    expr: Expression,
    env: TypeEnvironment,
    *,
    mode: ResolutionMode = ResolutionMode.REPL,
    command_lookup: Optional[CommandLookup] = None,
    expected: Optional[Expression] = None,
) -> Expression:
    """Annotate every node of ``expr`` with its type."""
    try:
        return InferenceSession(env, mode, command_lookup).infer(expr, expected)
    except EngineError as e:
        raise e.with_span(expr.span)
