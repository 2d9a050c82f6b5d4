from abc import ABC, abstractmethod
from typing import Callable, List, Optional, Sequence

from lamsh.schemas.command import CommandResult, Stage

Sink = Callable[[bytes], None]


class ProcessAdapter(ABC):
    """Base class for ways of running external pipelines."""

    @abstractmethod
    def spawn_pipeline(
        self,
        stages: Sequence[Stage],
        source: Optional[bytes] = None,
        sink: Optional[Sink] = None,
    ) -> List[CommandResult]:
        """Run ``stages`` connected stdout to stdin and wait for all of them.

        ``source`` feeds the first stage (None means an empty stdin). Final
        stdout goes to ``sink`` chunk by chunk, or into the last result's
        ``stdout`` when no sink is given.
        """
        pass

    @abstractmethod
    def cancel(self) -> None:
        """Stop the pipeline currently running, if any."""
        pass

    @abstractmethod
    def is_available(self) -> bool:
        """Whether this adapter can spawn processes on this host."""
        pass
