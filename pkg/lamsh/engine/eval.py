"""β-reduction of typed trees.

``Reducer`` evaluates big-step: lambdas substitute their argument (normal
order by default), host functions take their arguments by value and run
once saturated, external commands turn into lazy pipeline plans. ``step``
performs one leftmost-outermost step for traces and step-limited runs.
"""
from enum import Enum
from typing import Any, FrozenSet, Iterator, Optional, Set
import logging

from lamsh.core.config import settings
from lamsh.core.errors import EngineError, EvalError
from lamsh.models.expression import (
    STREAM,
    Apply,
    ArrowType,
    CommandTerm,
    Constant,
    Expression,
    HostFunctionTerm,
    Lambda,
    TypeConstructorTerm,
    Variable,
    split_arrows,
)
from lamsh.models.values import ByteStreamValue
from lamsh.repositories.environment import TypeEnvironment
from lamsh.schemas.command import PipelinePlan, Stage
from lamsh.services.conversions import adapt_stream
from lamsh.streaming.pump import StreamHandle

logger = logging.getLogger(__name__)


class ReductionStrategy(str, Enum):
    NORMAL = "normal"
    APPLICATIVE = "applicative"


# --- substitution ---------------------------------------------------------

def free_variables(expr: Expression) -> Set[str]:
    if isinstance(expr, Variable):
        return {expr.name}
    if isinstance(expr, Lambda):
        return free_variables(expr.body) - {expr.parameter}
    names: Set[str] = set()
    for child in expr.children():
        names |= free_variables(child)
    return names


def _fresh_name(base: str, taken: Set[str]) -> str:
    index = 1
    while f"{base}_{index}" in taken:
        index += 1
    return f"{base}_{index}"


def substitute(body: Expression, name: str, value: Expression) -> Expression:
    """Replace free occurrences of ``name`` in ``body``, renaming binders
    that would capture a free variable of ``value``."""
    if isinstance(body, Variable):
        if body.name != name:
            return body
        if value.annotation is None and body.annotation is not None:
            return value.with_annotation(body.annotation)
        return value
    if isinstance(body, Lambda):
        if body.parameter == name or name not in free_variables(body.body):
            return body
        inner = body.body
        parameter = body.parameter
        value_free = free_variables(value)
        if parameter in value_free:
            parameter = _fresh_name(body.parameter, value_free | free_variables(inner) | {name})
            inner = substitute(inner, body.parameter, Variable(name=parameter))
        return body.model_copy(update={"parameter": parameter, "body": substitute(inner, name, value)})
    children = body.children()
    if not children:
        return body
    return body.replace_children(tuple(substitute(child, name, value) for child in children))


# --- reduction ------------------------------------------------------------

def is_neutral(expr: Expression) -> bool:
    """An application spine stuck on a variable (only seen under full reduction)."""
    return isinstance(_head(expr), Variable)


def host_argument(value: Expression) -> Any:
    """What a host implementation receives for an evaluated argument."""
    return value.value if isinstance(value, Constant) else value


class Reducer:
    def __init__(
        self,
        env: TypeEnvironment,
        strategy: ReductionStrategy = ReductionStrategy.NORMAL,
        max_depth: Optional[int] = None,
        full: bool = False,
    ):
        self.env = env
        self.strategy = strategy
        self.max_depth = max_depth or settings.MAX_REDUCTION_DEPTH
        self.full = full
        self._depth = 0
        self._bound: Set[str] = set()

    def evaluate(self, expr: Expression) -> Expression:
        self._depth += 1
        try:
            if self._depth > self.max_depth:
                raise EvalError(
                    f"reduction exceeded {self.max_depth} nested steps",
                    reason=EvalError.DEPTH,
                    span=expr.span,
                    hint="the expression may not terminate",
                )
            return self._evaluate(expr)
        except RecursionError:
            raise EvalError(
                "reduction nested too deeply",
                reason=EvalError.DEPTH,
                span=expr.span,
            ) from None
        finally:
            self._depth -= 1

    def _evaluate(self, expr: Expression) -> Expression:
        if isinstance(expr, Apply):
            return self._evaluate_apply(expr)
        if isinstance(expr, Variable):
            return self._evaluate_variable(expr)
        if isinstance(expr, Lambda) and self.full:
            return self._evaluate_body(expr)
        if isinstance(expr, CommandTerm) and expr.saturated:
            return self.run_command(expr, expr)
        return expr

    def _evaluate_body(self, expr: Lambda) -> Expression:
        shadowed = expr.parameter in self._bound
        self._bound.add(expr.parameter)
        try:
            return expr.model_copy(update={"body": self.evaluate(expr.body)})
        finally:
            if not shadowed:
                self._bound.discard(expr.parameter)

    def _evaluate_variable(self, expr: Variable) -> Expression:
        if expr.name in self._bound:
            return expr
        overloads = self.env.lookup(expr.name)
        if overloads and len(overloads) == 1 and not (
            isinstance(overloads[0].value, Variable) and overloads[0].value.name == expr.name
        ):
            return self.evaluate(overloads[0].value)
        if self.full:
            return expr
        raise EvalError(f"{expr.name!r} has no value", reason=EvalError.STUCK, span=expr.span)

    def _evaluate_apply(self, expr: Apply) -> Expression:
        function = self.evaluate(expr.function)
        if isinstance(function, Lambda):
            argument = expr.argument
            if self.strategy == ReductionStrategy.APPLICATIVE:
                argument = self.evaluate(argument)
            # DEBUG: Log beta step (eval.py:_evaluate_apply)
            logger.debug(f"[EVAL] beta {function.parameter} := {argument}")
            result = self.evaluate(substitute(function.body, function.parameter, argument))
            return result.with_annotation(expr.annotation) if expr.annotation is not None else result
        if isinstance(function, (HostFunctionTerm, CommandTerm)):
            argument = self.evaluate(expr.argument)
            if self.full and is_neutral(argument):
                return Apply(function=function, argument=argument, annotation=expr.annotation)
            return self.absorb(function, argument, expr)
        if isinstance(_head(function), TypeConstructorTerm):
            return Apply(function=function, argument=self.evaluate(expr.argument), annotation=expr.annotation)
        if self.full:
            return Apply(function=function, argument=self.evaluate(expr.argument), annotation=expr.annotation)
        raise EvalError(
            f"cannot apply {function} to an argument",
            reason=EvalError.STUCK,
            span=expr.span,
        )

    def absorb(self, function: Expression, argument: Expression, site: Expression) -> Expression:
        """Add one evaluated argument to a host or command term."""
        assert isinstance(function, (HostFunctionTerm, CommandTerm))
        term = function.model_copy(update={"arguments": (*function.arguments, argument)})
        if not term.saturated:
            return term.with_annotation(site.annotation or _partial_type(function))
        if isinstance(term, CommandTerm):
            return self.run_command(term, site)
        return self.call_host(term, site)

    def call_host(self, term: HostFunctionTerm, site: Expression) -> Expression:
        # DEBUG: Log host call (eval.py:call_host)
        logger.debug(f"[EVAL] call {term.name}/{term.arity}")
        try:
            result = term.implementation(*(host_argument(a) for a in term.arguments))
        except EngineError as e:
            raise e.with_span(site.span)
        except Exception as e:
            raise EvalError(
                f"{term.name}: {e}",
                reason=EvalError.HOST,
                span=site.span,
            ) from e
        if isinstance(result, Expression):
            return self.evaluate(result)
        annotation = site.annotation or split_arrows(term.signature)[1]
        return Constant(value=result, annotation=annotation)

    def run_command(self, term: CommandTerm, site: Expression) -> Expression:
        """Describe the pipeline a saturated command produces; nothing runs yet."""
        leading = term.arguments[:term.leading]
        for argument in leading:
            if not (isinstance(argument, Constant) and isinstance(argument.value, str)):
                raise EvalError(
                    f"{term.spec.name}: command arguments must be strings",
                    reason=EvalError.STUCK,
                    span=site.span,
                )
        stage = Stage(spec=term.spec, arguments=tuple(a.value for a in leading))
        if term.input_type is None:
            plan = PipelinePlan(stages=(stage,))
        else:
            try:
                stream = adapt_stream(term.arguments[term.leading], STREAM, self.env)
                assert isinstance(stream.value, ByteStreamValue)
                value = StreamHandle(stream.value).take()
            except EngineError as e:
                raise e.with_span(site.span)
            if value.plan is not None:
                plan = value.plan.then(stage)
            else:
                plan = PipelinePlan(stages=(stage,), source=value.data or b"")
        logger.debug(f"[EVAL] plan {' | '.join(s.spec.name for s in plan.stages)}")
        return Constant(value=ByteStreamValue(plan=plan), annotation=STREAM)


def _head(expr: Expression) -> Expression:
    while isinstance(expr, Apply):
        expr = expr.function
    return expr


def _partial_type(term: Expression) -> Optional[Expression]:
    signature = term.annotation or getattr(term, "signature", None)
    if isinstance(signature, ArrowType):
        return signature.result
    return signature


# --- small steps ----------------------------------------------------------

def step(
    expr: Expression,
    env: TypeEnvironment,
    strategy: ReductionStrategy = ReductionStrategy.NORMAL,
    full: bool = False,
    bound: FrozenSet[str] = frozenset(),
) -> Optional[Expression]:
    """One leftmost-outermost step, or None when ``expr`` is normal.

    ``bound`` holds the parameters of enclosing lambdas under full reduction.
    """
    if isinstance(expr, CommandTerm) and expr.saturated:
        return Reducer(env, strategy, full=full).run_command(expr, expr)
    if isinstance(expr, Variable):
        if expr.name in bound:
            return None
        overloads = env.lookup(expr.name)
        if overloads and len(overloads) == 1 and overloads[0].value != expr:
            return overloads[0].value
        return None
    if isinstance(expr, Lambda):
        if not full:
            return None
        body = step(expr.body, env, strategy, full, bound | {expr.parameter})
        return None if body is None else expr.model_copy(update={"body": body})
    if not isinstance(expr, Apply):
        return None
    function, argument = expr.function, expr.argument
    if isinstance(function, Lambda):
        if strategy == ReductionStrategy.APPLICATIVE:
            inner = step(argument, env, strategy, full, bound)
            if inner is not None:
                return Apply(function=function, argument=inner, annotation=expr.annotation)
        result = substitute(function.body, function.parameter, argument)
        return result.with_annotation(expr.annotation) if expr.annotation is not None else result
    inner = step(function, env, strategy, full, bound)
    if inner is not None:
        return Apply(function=inner, argument=argument, annotation=expr.annotation)
    if isinstance(function, (HostFunctionTerm, CommandTerm)):
        inner = step(argument, env, strategy, full, bound)
        if inner is not None:
            return Apply(function=function, argument=inner, annotation=expr.annotation)
        if full and is_neutral(argument):
            return None
        return Reducer(env, strategy, full=full).absorb(function, argument, expr)
    inner = step(argument, env, strategy, full, bound)
    if inner is not None:
        return Apply(function=function, argument=inner, annotation=expr.annotation)
    return None


def trace(
    expr: Expression,
    env: TypeEnvironment,
    strategy: ReductionStrategy = ReductionStrategy.NORMAL,
    full: bool = False,
) -> Iterator[Expression]:
    """Yield ``expr`` and every intermediate form until it is normal."""
    current: Optional[Expression] = expr
    while current is not None:
        yield current
        current = step(current, env, strategy, full)


def reduce_steps(
    expr: Expression,
    env: TypeEnvironment,
    limit: int,
    strategy: ReductionStrategy = ReductionStrategy.NORMAL,
    full: bool = False,
) -> Expression:
    """Apply at most ``limit`` steps and return the partially reduced term."""
    current = expr
    for _ in range(limit):
        following = step(current, env, strategy, full)
        if following is None:
            break
        current = following
    return current


def reduce(
    expr: Expression,
    env: TypeEnvironment,
    *,
    strategy: ReductionStrategy = ReductionStrategy.NORMAL,
    max_depth: Optional[int] = None,
    step_limit: Optional[int] = None,
    full: bool = False,
) -> Expression:
    """Reduce ``expr`` to a value (or to normal form when ``full``)."""
    if step_limit is not None:
        return reduce_steps(expr, env, step_limit, strategy, full)
    return Reducer(env, strategy, max_depth, full).evaluate(expr)

