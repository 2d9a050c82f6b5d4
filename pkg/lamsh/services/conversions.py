"""Moving values between stream representations at run time."""
import logging

from lamsh.core.errors import NoConversion, UnifyError
from lamsh.engine.typesys import same_type, unify
from lamsh.models.expression import Constant, Expression, format_type
from lamsh.repositories.environment import TypeEnvironment

logger = logging.getLogger(__name__)


def adapt_stream(value: Expression, target: Expression, env: TypeEnvironment) -> Constant:
    """Convert an evaluated ``value`` to ``target`` with the best registered conversion.

    Values already of the target type pass through unchanged.
    """
    if not isinstance(value, Constant) or value.annotation is None:
        raise NoConversion(f"{value} is not a stream value")
    if same_type(value.annotation, target):
        return value
    for conversion in env.conversions:
        if not same_type(conversion.target, target):
            continue
        try:
            unify(value.annotation, conversion.source)
        except UnifyError:
            continue
        logger.debug(f"[PROC] {conversion.name}: {format_type(value.annotation)} -> {format_type(target)}")
        return Constant(value=conversion.implementation(value.value), annotation=target)
    raise NoConversion(
        f"no conversion from {format_type(value.annotation, {})} to {format_type(target, {})}",
        hint="register one with register_conversion",
    )
