from typing import Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict

from lamsh.models.attributes import DEFAULT_ATTRIBUTES, BoundAttributes
from lamsh.models.expression import Expression


class Binding(BaseModel):
    """``name[: T] = expr`` or ``(sym @ ATTRS) = expr``."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    attributes: BoundAttributes = DEFAULT_ATTRIBUTES
    annotation: Optional[Expression] = None
    body: Expression
    name_span: Optional[Tuple[int, int]] = None


class Evaluation(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    expression: Expression


Statement = Union[Binding, Evaluation]
