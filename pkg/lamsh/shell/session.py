"""Line-by-line evaluation against a persistent environment."""
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, TextIO, Tuple, Union
import logging
import sys

from pydantic import BaseModel

from lamsh.core.errors import EngineError, EvalError
from lamsh.engine.eval import reduce
from lamsh.engine.inference import infer
from lamsh.engine.lexer import tokenize
from lamsh.engine.parser import paren_depth, parse_statement
from lamsh.engine.rewrite import Rewriter, normalize
from lamsh.engine.typesys import ResolutionMode, generalize
from lamsh.models.attributes import DEFAULT_ATTRIBUTES, BoundAttributes
from lamsh.models.expression import EXIT_STATUS, Constant, Expression, format_type, serialize
from lamsh.models.scheme import TypeScheme
from lamsh.prelude import install_prelude
from lamsh.repositories.commands import CommandRepository
from lamsh.repositories.environment import Overload, TypeEnvironment
from lamsh.schemas.result import Diagnostic, RenderedResult
from lamsh.schemas.statement import Binding
from lamsh.schemas.token import Token, TokenKind
from lamsh.services.commands import command_lookup, command_repository, resolve_command
from lamsh.shell.render import render_binding, render_diagnostic, render_evaluation
from lamsh.streaming.pump import streaming_manager

logger = logging.getLogger(__name__)

COMMENT = "#"
LAST_STATUS = "lastStatus"

Outcome = Union[RenderedResult, Diagnostic, None]


class DumpOptions(BaseModel):
    """Intermediate forms to print before a line's result."""
    ast: bool = False
    rewritten: bool = False
    types: bool = False


def strip_comment(tokens: List[Token]) -> List[Token]:
    for index, token in enumerate(tokens):
        if token.kind == TokenKind.SYMBOL and token.text.startswith(COMMENT):
            return tokens[:index]
    return tokens


def join_continued(lines: Iterable[str]) -> Iterator[Tuple[int, str]]:
    """Group physical lines into logical ones while parentheses stay open.

    Yields the 1-based number of each group's first line with its text.
    """
    buffer: List[str] = []
    first = 0
    for number, line in enumerate(lines, start=1):
        if not buffer:
            first = number
        buffer.append(line.rstrip("\n"))
        text = " ".join(buffer)
        try:
            pending = paren_depth(tokenize(text)) > 0
        except EngineError:
            pending = False
        if not pending:
            yield first, text
            buffer = []
    if buffer:
        yield first, " ".join(buffer)


class Session:
    """A shell session: environment, resolution mode and output streams."""

    def __init__(
        self,
        env: Optional[TypeEnvironment] = None,
        mode: ResolutionMode = ResolutionMode.REPL,
        dump: Optional[DumpOptions] = None,
        out: Optional[TextIO] = None,
        err: Optional[TextIO] = None,
        repository: Optional[CommandRepository] = None,
        prelude: bool = True,
    ):
        if env is None:
            env = install_prelude() if prelude else TypeEnvironment()
        self.env = env
        self.mode = mode
        self.dump = dump or DumpOptions()
        self.out = out or sys.stdout
        self.err = err or sys.stderr
        self.repository = repository or command_repository

    # --- pipeline stages --------------------------------------------------

    def is_known(self, name: str) -> bool:
        return self.env.lookup(name) is not None or resolve_command(name, self.repository) is not None

    def _emit_dump(self, label: str, expr: Expression) -> None:
        self.out.write(f"{label}: {serialize(expr)}\n")

    def _prepare(self, expr: Expression, env: TypeEnvironment) -> Expression:
        if self.dump.ast:
            self._emit_dump("ast", expr)
        normalized = normalize(expr, env, self.is_known)
        if self.dump.rewritten:
            self._emit_dump("rewritten", normalized)
        return normalized

    def _infer(self, expr: Expression, env: TypeEnvironment, expected: Optional[Expression] = None) -> Expression:
        typed = infer(
            expr,
            env,
            mode=self.mode,
            command_lookup=command_lookup(env, self.repository),
            expected=expected,
        )
        if self.dump.types:
            self._emit_dump("types", typed)
        return typed

    def tokens(self, line: str) -> List[Token]:
        return strip_comment(tokenize(line))

    def type_of(self, line: str) -> Union[str, Diagnostic]:
        """Inferred type of an expression, without evaluating it."""
        try:
            tokens = self.tokens(line)
            if not tokens:
                return ""
            statement = parse_statement(tokens)
            body = statement.body if isinstance(statement, Binding) else statement.expression
            typed = self._infer(self._prepare(body, self.env), self.env)
            return format_type(typed.annotation, {})
        except EngineError as e:
            return Diagnostic.from_error(e, line)

    # --- evaluation -------------------------------------------------------

    def eval_line(self, line: str, line_number: Optional[int] = None) -> Outcome:
        """Evaluate one logical line; the environment changes only on success."""
        try:
            tokens = self.tokens(line)
            if not tokens:
                return None
            statement = parse_statement(tokens)
            if isinstance(statement, Binding):
                return self._eval_binding(statement)
            return self._eval_expression(statement.expression)
        except RecursionError:
            error = EvalError(
                "expression nested too deeply",
                reason=EvalError.DEPTH,
                hint="bind inner parts to names first",
            )
        except EngineError as e:
            error = e
        logger.error(f"[SHELL] {error.stage}: {error.message}")
        return Diagnostic.from_error(error, line, line_number)

    def _eval_binding(self, binding: Binding) -> RenderedResult:
        env = self.env
        expected = None
        if binding.annotation is not None:
            expected = Rewriter(env).annotation_rewriter().rewrite(binding.annotation)
        typed = self._infer(self._prepare(binding.body, env), env, expected)
        value = reduce(typed, env)
        if value.annotation is None:
            value = value.with_annotation(typed.annotation)
        self.env = rebind(env, binding.name, binding.attributes, value, generalize(typed.annotation, env))
        logger.debug(f"[SHELL] bound {binding.name}")
        return render_binding(binding.name, value, self.mode)

    def _eval_expression(self, expr: Expression) -> RenderedResult:
        typed = self._infer(self._prepare(expr, self.env), self.env)
        value = reduce(typed, self.env)
        before = streaming_manager.last_results
        rendered = self._render(value)
        if streaming_manager.last_results is not before:
            self._record_status()
        return rendered

    def _render(self, value: Expression) -> RenderedResult:
        """Render a value; failures raised while streams are consumed become eval errors."""
        try:
            return render_evaluation(value, self.mode)
        except (EngineError, RecursionError):
            raise
        except Exception as e:
            raise EvalError(str(e) or type(e).__name__, reason=EvalError.HOST) from e

    def _record_status(self) -> None:
        status = streaming_manager.last_status
        if status is not None:
            constant = Constant(value=status, annotation=EXIT_STATUS)
            self.env = rebind(self.env, LAST_STATUS, DEFAULT_ATTRIBUTES, constant, TypeScheme.monomorphic(EXIT_STATUS))

    # --- drivers ----------------------------------------------------------

    def print_outcome(self, outcome: Outcome, origin: Optional[str] = None) -> bool:
        """Write an outcome to the session streams; False for a diagnostic."""
        if isinstance(outcome, Diagnostic):
            self.err.write(render_diagnostic(outcome, origin))
            self.err.flush()
            return False
        if outcome is not None and outcome.text:
            self.out.write(outcome.text)
            self.out.flush()
        return True

    def run_lines(self, lines: Iterable[str], origin: Optional[str] = None, stop_on_error: bool = True) -> int:
        status = 0
        for number, text in join_continued(lines):
            if not self.print_outcome(self.eval_line(text, number), origin):
                status = 1
                if stop_on_error:
                    break
        return status

    def run_script(self, path: Union[str, Path]) -> int:
        """Evaluate a script file; stops at the first error with status 1."""
        path = Path(path)
        logger.info(f"[SHELL] running {path}")
        with path.open(encoding="utf-8") as handle:
            return self.run_lines(handle, origin=str(path))

    def load_rc(self, path: Union[str, Path]) -> int:
        """Run a startup script quietly in REPL mode; errors are reported and skipped."""
        path = Path(path)
        if not path.is_file():
            return 0
        logger.info(f"[SHELL] loading rc {path}")
        saved_mode, saved_out = self.mode, self.out
        self.mode = ResolutionMode.REPL
        self.out = _Discard()
        try:
            with path.open(encoding="utf-8") as handle:
                return self.run_lines(handle, origin=str(path), stop_on_error=False)
        finally:
            self.mode, self.out = saved_mode, saved_out


class _Discard:
    def write(self, text: str) -> int:
        return len(text)

    def flush(self) -> None:
        pass


def _type_key(scheme: Optional[TypeScheme], value: Expression) -> str:
    return format_type(scheme.body if scheme else value.annotation, {})


def rebind(
    env: TypeEnvironment,
    name: str,
    attributes: BoundAttributes,
    value: Expression,
    scheme: TypeScheme,
) -> TypeEnvironment:
    """Bind ``name``, replacing an existing overload of the same type in place.
    A differently typed binding becomes one more overload.
    """
    existing = env.lookup(name)
    if not existing:
        return env.bind(name, attributes, value, scheme=scheme)
    key = _type_key(scheme, value)
    kept = tuple(o for o in existing if _type_key(o.scheme, o.value) != key)
    entry = Overload(value=value, attributes=attributes, scheme=scheme)
    return env.replace(name, kept + (entry,))
