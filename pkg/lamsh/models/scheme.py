from typing import Set, Tuple

from pydantic import BaseModel, ConfigDict

from lamsh.models.expression import Expression, format_type, placeholders


class TypeScheme(BaseModel):
    """A type with universally quantified placeholder ids."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    variables: Tuple[int, ...] = ()
    body: Expression

    @classmethod
    def monomorphic(cls, body: Expression) -> "TypeScheme":
        return cls(body=body)

    def free_placeholders(self) -> Set[int]:
        return set(placeholders(self.body)) - set(self.variables)

    def __str__(self) -> str:
        names: dict = {}
        body = format_type(self.body, names)
        if not self.variables:
            return body
        bound = " ".join(names.get(v, f"?{v}") for v in self.variables)
        return f"forall {bound}. {body}"
