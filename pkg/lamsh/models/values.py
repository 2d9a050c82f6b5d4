"""Runtime host values carried by Constant nodes.

Scalars are plain Python values (int, float, bool, str). Everything else is
an immutable description; stream-like values only touch the operating system
when they are consumed.
"""
from typing import Any, Callable, Iterable, Iterator, Optional, Tuple

from pydantic import BaseModel, ConfigDict, PrivateAttr

from lamsh.schemas.command import PipelinePlan


class HostValue(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class UnitValue(HostValue):
    def __str__(self) -> str:
        return "()"


UNIT_VALUE = UnitValue()


class ListValue(HostValue):
    """A finite list; ``element_type`` is the type every item conforms to."""
    items: Tuple[Any, ...] = ()
    element_type: Any = None

    def __iter__(self) -> Iterator[Any]:  # type: ignore[override]
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)


class PairValue(HostValue):
    first: Any
    second: Any


class ExitStatusValue(HostValue):
    code: int

    def __str__(self) -> str:
        return f"ExitStatus {self.code}"


class ByteStreamValue(HostValue):
    """Raw bytes, either literal ``data`` or the stdout of ``plan``.

    A value has one consumer. ``reopen`` gives an unread value with the same
    contents, which re-runs ``plan`` when read.
    """
    data: Optional[bytes] = None
    plan: Optional[PipelinePlan] = None
    _consumed: bool = PrivateAttr(default=False)

    @property
    def consumed(self) -> bool:
        return self._consumed

    def mark_consumed(self) -> None:
        self._consumed = True

    def reopen(self) -> "ByteStreamValue":
        return ByteStreamValue(data=self.data, plan=self.plan)

    def __str__(self) -> str:
        if self.plan is not None:
            names = " | ".join(stage.spec.name for stage in self.plan.stages)
            return f"<stream: {names}>"
        return "<stream>"


class TextWriterValue(HostValue):
    """Text written by a host function, readable back as a stream."""
    text: str = ""

    def __str__(self) -> str:
        return "<writer>"


class TextReaderValue(HostValue):
    """A text source: a file path, literal text or a byte stream."""
    path: Optional[str] = None
    text: Optional[str] = None
    stream: Optional[ByteStreamValue] = None

    def __str__(self) -> str:
        if self.path is not None:
            return f"<reader: {self.path}>"
        return "<reader>"


class LineSeqValue(HostValue):
    """A lazy, re-iterable sequence.

    ``producer`` is called afresh for every iteration.
    """
    producer: Callable[[], Iterable[Any]]
    element_type: Any = None

    def __iter__(self) -> Iterator[Any]:  # type: ignore[override]
        return iter(self.producer())

    def __str__(self) -> str:
        return "<lines>"
