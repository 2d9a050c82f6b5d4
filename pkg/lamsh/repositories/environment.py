from types import MappingProxyType
from typing import Iterator, List, Mapping, Optional, Set, Tuple
import logging

from pydantic import BaseModel, ConfigDict

from lamsh.models.attributes import DEFAULT_ATTRIBUTES, BoundAttributes
from lamsh.models.conversion import Conversion
from lamsh.models.expression import Expression
from lamsh.models.scheme import TypeScheme

logger = logging.getLogger(__name__)

Frame = Mapping[str, Tuple["Overload", ...]]


class Overload(BaseModel):
    """One entry of a name's overload set."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    value: Expression
    attributes: BoundAttributes = DEFAULT_ATTRIBUTES
    scheme: Optional[TypeScheme] = None
    conversion_priority: Optional[int] = None


class TypeEnvironment:
    """Persistent, lexically scoped binding store.

    Every mutating operation returns a new environment; holders of the old
    one keep observing the old state.
    """

    def __init__(
        self,
        frames: Optional[Tuple[Frame, ...]] = None,
        conversions: Tuple[Conversion, ...] = (),
    ):
        self._frames: Tuple[Frame, ...] = frames or (MappingProxyType({}),)
        self._conversions = conversions

    def bind(
        self,
        name: str,
        attributes: BoundAttributes,
        value: Expression,
        *,
        scheme: Optional[TypeScheme] = None,
        conversion_priority: Optional[int] = None,
    ) -> "TypeEnvironment":
        """Append an overload for ``name`` to the innermost frame."""
        entry = Overload(
            value=value,
            attributes=attributes,
            scheme=scheme,
            conversion_priority=conversion_priority,
        )
        inner = dict(self._frames[-1])
        inner[name] = inner.get(name, ()) + (entry,)
        logger.debug(f"[ENV] bind {name} ({attributes}) -> {len(inner[name])} overload(s)")
        return TypeEnvironment(self._frames[:-1] + (MappingProxyType(inner),), self._conversions)

    def replace(self, name: str, overloads: Tuple[Overload, ...]) -> "TypeEnvironment":
        """Set the whole overload set of ``name`` in the innermost frame."""
        inner = dict(self._frames[-1])
        inner[name] = tuple(overloads)
        logger.debug(f"[ENV] replace {name} -> {len(inner[name])} overload(s)")
        return TypeEnvironment(self._frames[:-1] + (MappingProxyType(inner),), self._conversions)

    def push_frame(self) -> "TypeEnvironment":
        return TypeEnvironment(self._frames + (MappingProxyType({}),), self._conversions)

    def lookup(self, name: str) -> Optional[Tuple[Overload, ...]]:
        """Innermost overload set for ``name``, or None."""
        for frame in reversed(self._frames):
            if name in frame:
                return frame[name]
        return None

    def attributes(self, name: str) -> Optional[BoundAttributes]:
        overloads = self.lookup(name)
        if not overloads:
            return None
        return overloads[0].attributes

    def names(self) -> List[str]:
        seen: dict = {}
        for frame in reversed(self._frames):
            for name in frame:
                seen.setdefault(name, None)
        return sorted(seen)

    def items(self) -> Iterator[Tuple[str, Tuple[Overload, ...]]]:
        for name in self.names():
            overloads = self.lookup(name)
            if overloads:
                yield name, overloads

    @property
    def depth(self) -> int:
        return len(self._frames)

    @property
    def conversions(self) -> Tuple[Conversion, ...]:
        return self._conversions

    def with_conversion(self, conversion: Conversion) -> "TypeEnvironment":
        """Register a conversion, replacing one with the same source and target."""
        kept = []
        for existing in self._conversions:
            if existing.source == conversion.source and existing.target == conversion.target:
                logger.warning(f"[ENV] conversion {existing.name} replaced by {conversion.name}")
                continue
            kept.append(existing)
        kept.append(conversion)
        kept.sort(key=lambda c: c.priority)
        return TypeEnvironment(self._frames, tuple(kept))

    def free_placeholders(self) -> Set[int]:
        free: Set[int] = set()
        for frame in self._frames:
            for overloads in frame.values():
                for overload in overloads:
                    if overload.scheme is not None:
                        free |= overload.scheme.free_placeholders()
        return free
