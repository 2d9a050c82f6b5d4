from enum import Enum
from typing import Iterable

from pydantic import BaseModel, ConfigDict


class Fixity(str, Enum):
    PREFIX = "PREFIX"
    INFIX = "INFIX"


class Associativity(str, Enum):
    LTR = "LTR"
    RTL = "RTL"


class BoundAttributes(BaseModel):
    """Fixity and associativity carried by every binding."""
    model_config = ConfigDict(frozen=True)

    fixity: Fixity = Fixity.PREFIX
    associativity: Associativity = Associativity.LTR

    @property
    def is_infix(self) -> bool:
        return self.fixity == Fixity.INFIX

    @property
    def is_right_associative(self) -> bool:
        return self.associativity == Associativity.RTL

    @classmethod
    def parse(cls, names: Iterable[str]) -> "BoundAttributes":
        """Build attributes from names such as ``INFIX`` and ``RTL``.

        Raises ValueError on unknown or conflicting names.
        """
        fixity = None
        associativity = None
        for name in names:
            if name in Fixity.__members__:
                if fixity is not None and fixity != Fixity(name):
                    raise ValueError(f"conflicting fixity {name}")
                fixity = Fixity(name)
            elif name in Associativity.__members__:
                if associativity is not None and associativity != Associativity(name):
                    raise ValueError(f"conflicting associativity {name}")
                associativity = Associativity(name)
            else:
                raise ValueError(f"unknown attribute {name!r}")
        return cls(
            fixity=fixity or Fixity.PREFIX,
            associativity=associativity or Associativity.LTR,
        )

    def __str__(self) -> str:
        return f"{self.fixity.value},{self.associativity.value}"


DEFAULT_ATTRIBUTES = BoundAttributes()
INFIX_LTR = BoundAttributes(fixity=Fixity.INFIX, associativity=Associativity.LTR)
INFIX_RTL = BoundAttributes(fixity=Fixity.INFIX, associativity=Associativity.RTL)
