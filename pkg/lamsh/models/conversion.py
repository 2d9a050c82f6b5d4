from typing import Any, Callable

from pydantic import BaseModel, ConfigDict

from lamsh.models.expression import Expression, format_type


class Conversion(BaseModel):
    """A registered adapter between two stream representations.

    Lower ``priority`` wins when several conversions apply.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    source: Expression
    target: Expression
    priority: int
    implementation: Callable[[Any], Any]

    def __str__(self) -> str:
        return f"{self.name}: {format_type(self.source)} -> {format_type(self.target)} (priority {self.priority})"
