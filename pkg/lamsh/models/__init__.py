from .attributes import Associativity, BoundAttributes, DEFAULT_ATTRIBUTES, Fixity
from .conversion import Conversion
from .expression import (
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
)
from .scheme import TypeScheme

__all__ = [
    "Apply", "ArrowType", "Associativity", "BoundAttributes", "BuiltinTerm",
    "CommandTerm", "Constant", "Conversion", "DEFAULT_ATTRIBUTES", "Expression",
    "Fixity", "HostFunctionTerm", "KindStar", "Lambda", "Placeholder",
    "TypeConstructorTerm", "TypeScheme", "TypeTerm", "Variable",
]
