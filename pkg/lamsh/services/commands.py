"""External commands as overloaded, typed stream functions.

A command applied to ``k`` string arguments reads its stdin from one more
argument. Besides the raw ``Str^k -> Stream -> Stream`` form, every
conversion into ``Stream`` yields an overload taking the conversion's source
type instead, ranked by the conversion's priority. A standalone variant runs
with an empty stdin and ranks after all of them.
"""
from typing import Callable, List, Optional
import logging

from lamsh.engine.typesys import same_type
from lamsh.models.expression import STR, STREAM, CommandTerm, Expression, arrow
from lamsh.models.scheme import TypeScheme
from lamsh.repositories.commands import CommandRepository
from lamsh.repositories.environment import Overload, TypeEnvironment
from lamsh.schemas.command import CommandSpec

logger = logging.getLogger(__name__)

RAW_PRIORITY = 1

command_repository = CommandRepository()


def resolve_command(name: str, repository: Optional[CommandRepository] = None) -> Optional[CommandSpec]:
    """Find ``name`` on the search path; None when there is no such command."""
    return (repository or command_repository).get_by_name(name)


def _overload(spec: CommandSpec, leading: int, input_type: Optional[Expression], priority: int) -> Overload:
    parameters = [STR] * leading
    if input_type is not None:
        parameters.append(input_type)
    signature = arrow(*parameters, STREAM)
    term = CommandTerm(spec=spec, signature=signature, leading=leading, input_type=input_type)
    return Overload(
        value=term.with_annotation(signature),
        scheme=TypeScheme.monomorphic(signature),
        conversion_priority=priority,
    )


def wrap_command(
    spec: CommandSpec,
    env: TypeEnvironment,
    leading_args: int = 0,
    standalone: bool = False,
) -> List[Overload]:
    """Typed overloads of ``spec`` taking ``leading_args`` strings before stdin.

    With ``standalone`` the stdin-free ``Str^leading_args -> Stream`` form is
    appended after the stdin-taking ones.
    """
    overloads = [_overload(spec, leading_args, STREAM, RAW_PRIORITY)]
    lowest = RAW_PRIORITY
    for conversion in env.conversions:
        if same_type(conversion.target, STREAM) and not same_type(conversion.source, STREAM):
            overloads.append(_overload(spec, leading_args, conversion.source, conversion.priority))
            lowest = max(lowest, conversion.priority)
    if standalone:
        overloads.append(_overload(spec, leading_args, None, lowest + 1))
    return overloads


def command_overloads(spec: CommandSpec, env: TypeEnvironment, arg_count: int) -> List[Overload]:
    """Overloads for a use site applying ``spec`` to ``arg_count`` arguments.

    The last argument is either stdin or one more string, so both splits are
    offered; the standalone form comes last.
    """
    overloads: List[Overload] = []
    if arg_count > 0:
        overloads.extend(wrap_command(spec, env, arg_count - 1))
    overloads.extend(wrap_command(spec, env, arg_count))
    stdin_free = wrap_command(spec, env, arg_count, standalone=True)[-1]
    lowest = max(o.conversion_priority or 0 for o in overloads)
    overloads.append(stdin_free.model_copy(update={"conversion_priority": lowest + 1}))
    logger.debug(f"[PROC] {spec.name}/{arg_count}: {len(overloads)} overload(s)")
    return overloads


def command_lookup(
    env: TypeEnvironment,
    repository: Optional[CommandRepository] = None,
) -> Callable[[str, int], Optional[List[Overload]]]:
    """Inference hook resolving unbound names to command overload sets."""

    def lookup(name: str, arg_count: int) -> Optional[List[Overload]]:
        spec = resolve_command(name, repository)
        if spec is None:
            return None
        return command_overloads(spec, env, arg_count)

    return lookup
