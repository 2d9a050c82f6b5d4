"""Interactive loop on top of prompt_toolkit."""
from pathlib import Path
from typing import List, Optional
import logging

from prompt_toolkit import PromptSession
from prompt_toolkit.completion import WordCompleter
from prompt_toolkit.history import FileHistory, InMemoryHistory

from lamsh.core.config import settings
from lamsh.core.errors import EngineError
from lamsh.engine.lexer import tokenize
from lamsh.engine.parser import paren_depth
from lamsh.models.expression import format_type
from lamsh.schemas.result import Diagnostic
from lamsh.shell.render import render_diagnostic
from lamsh.shell.session import Session
from lamsh.streaming.pump import streaming_manager

logger = logging.getLogger(__name__)

EXIT_WORDS = {"exit", ":exit", ":quit"}
TYPE_COMMAND = ":type"
ENV_COMMAND = ":env"
HELP_COMMAND = ":help"

HELP_TEXT = """\
expressions are evaluated and printed with their type
  name = expr              bind a name (same type replaces, new type overloads)
  (op @ INFIX, LTR) = e    bind an operator with attributes
  :type expr               show the inferred type only
  :env                     list bound names
  exit                     leave (Ctrl-D works too)
"""


def needs_more(text: str) -> bool:
    """True while parentheses opened in ``text`` are still unclosed."""
    try:
        return paren_depth(tokenize(text)) > 0
    except EngineError:
        return False


def describe_env(session: Session) -> str:
    lines = []
    for name, overloads in session.env.items():
        for overload in overloads:
            scheme = overload.scheme
            type_text = format_type(scheme.body, {}) if scheme else ""
            attributes = f" @ {overload.attributes}" if overload.attributes.is_infix else ""
            lines.append(f"{name}{attributes} : {type_text}".rstrip(" :"))
    return "\n".join(lines) + "\n"


def handle_input(session: Session, text: str) -> bool:
    """Act on one complete REPL entry; False ends the loop."""
    stripped = text.strip()
    if not stripped:
        return True
    if stripped in EXIT_WORDS:
        return False
    if stripped == HELP_COMMAND:
        session.out.write(HELP_TEXT)
    elif stripped == ENV_COMMAND:
        session.out.write(describe_env(session))
    elif stripped.startswith(TYPE_COMMAND + " "):
        source = stripped[len(TYPE_COMMAND):].strip()
        result = session.type_of(source)
        if isinstance(result, Diagnostic):
            session.err.write(render_diagnostic(result))
        elif result:
            session.out.write(f"{source} : {result}\n")
    else:
        session.print_outcome(session.eval_line(text))
    return True


def _completer(session: Session) -> WordCompleter:
    return WordCompleter(lambda: session.env.names())


def _history(path: Optional[str]):
    if not path:
        return InMemoryHistory()
    try:
        return FileHistory(str(Path(path).expanduser()))
    except OSError:
        return InMemoryHistory()


def repl_loop(session: Session, prompt_session: Optional[PromptSession] = None) -> int:
    """Read, evaluate and print until ``exit`` or end of input."""
    prompt_session = prompt_session or PromptSession(history=_history(settings.HISTORY_FILE))
    completer = _completer(session)
    logger.info("[SHELL] repl started")
    while True:
        lines: List[str] = []
        try:
            lines.append(prompt_session.prompt(settings.PROMPT, completer=completer))
            while needs_more(" ".join(lines)):
                lines.append(prompt_session.prompt(settings.CONTINUATION_PROMPT, completer=completer))
        except KeyboardInterrupt:
            continue
        except EOFError:
            return 0
        except OSError as e:
            logger.error(f"[SHELL] terminal error: {e}")
            session.err.write(f"{settings.PROJECT_NAME}: terminal error: {e.strerror or e}\n")
            return 1
        try:
            if not handle_input(session, " ".join(lines)):
                return 0
        except KeyboardInterrupt:
            streaming_manager.cancel_all()
            session.err.write("^C\n")
